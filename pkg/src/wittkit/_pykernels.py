"""Pure-Python twins of the compiled kernels (same signatures and results)."""

from __future__ import annotations

from array import array


class ModTable:
    def __init__(self, m, hint=1024):
        if m >= (1 << 31) or m < 2:
            raise ValueError("modulus must lie in [2, 2**31)")
        self.m = m
        self.acc: dict[int, int] = {}

    def add_products(self, ka, ca, kb, cb, scale=1):
        acc = self.acc
        get = acc.get
        m = self.m
        pairs_b = list(zip(kb, cb))
        for ki, ci in zip(ka, ca):
            ci = ci * scale % m
            if not ci:
                continue
            for kj, cj in pairs_b:
                k = ki + kj
                acc[k] = get(k, 0) + ci * cj

    def add_terms(self, k, c, scale=1):
        acc = self.acc
        get = acc.get
        for ki, ci in zip(k, c):
            acc[ki] = get(ki, 0) + ci * scale

    def items(self):
        out_k = array("Q")
        out_c = array("Q")
        m = self.m
        for k, v in self.acc.items():
            v %= m
            if v:
                out_k.append(k)
                out_c.append(v)
        return out_k, out_c


def mul_mod(ka, ca, kb, cb, m):
    table = ModTable(m)
    table.add_products(ka, ca, kb, cb)
    return table.items()


def eval_mod(coefs, exps, nvars, cols, npts, m):
    nterms = len(coefs)
    terms = [
        (coefs[t], [(v, exps[t * nvars + v]) for v in range(nvars) if exps[t * nvars + v]])
        for t in range(nterms)
    ]
    out = array("Q", bytes(8 * npts))
    for i in range(npts):
        total = 0
        for c, mono in terms:
            for v, e in mono:
                c = c * pow(cols[v * npts + i], e, m) % m
            total += c
        out[i] = total % m
    return out
