# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: sparse products and batch evaluation modulo m < 2**31."""

from array import array

from libc.stdint cimport uint64_t
from libc.stdlib cimport free, malloc



cdef extern from *:
    """
    #define WK_EMPTY 0xFFFFFFFFFFFFFFFFULL
    #define WK_LAZY_LIMIT 0x8000000000000000ULL
    """
    uint64_t LAZY_LIMIT "WK_LAZY_LIMIT"  # reduce an accumulator once it reaches 2**63
    uint64_t EMPTY "WK_EMPTY"  # packed keys use at most 63 bits


cdef inline uint64_t _slot(uint64_t key, int shift) nogil:
    return (key * <uint64_t>11400714819323198485ULL) >> shift


cdef struct Entry:
    uint64_t key
    uint64_t val


cdef class _Table:
    """Open addressing with key and value side by side (one cache line per probe)."""

    cdef Entry* slots
    cdef Py_ssize_t cap
    cdef Py_ssize_t count
    cdef int shift

    def __cinit__(self, Py_ssize_t hint):
        cdef Py_ssize_t cap = 1024
        cdef int bits = 10
        while cap < 2 * hint and bits < 40:
            cap <<= 1
            bits += 1
        self._alloc(cap, bits)

    cdef void _alloc(self, Py_ssize_t cap, int bits):
        cdef Py_ssize_t i
        self.cap = cap
        self.shift = 64 - bits
        self.count = 0
        self.slots = <Entry*> malloc(cap * sizeof(Entry))
        if self.slots == NULL:
            raise MemoryError()
        for i in range(cap):
            self.slots[i].key = EMPTY

    def __dealloc__(self):
        free(self.slots)

    cdef int _grow(self, uint64_t m) except -1:
        cdef Entry* old = self.slots
        cdef Py_ssize_t old_cap = self.cap, i
        self._alloc(old_cap * 2, 64 - self.shift + 1)
        for i in range(old_cap):
            if old[i].key != EMPTY:
                self.add(old[i].key, old[i].val % m, m)
        free(old)
        return 0

    cdef inline int add(self, uint64_t key, uint64_t prod, uint64_t m) except -1:
        cdef Py_ssize_t mask = self.cap - 1
        cdef Py_ssize_t s = <Py_ssize_t> _slot(key, self.shift)
        cdef Entry* e = &self.slots[s]
        cdef uint64_t v
        while e.key != EMPTY:
            if e.key == key:
                v = e.val + prod
                if v >= LAZY_LIMIT:
                    v %= m
                e.val = v
                return 0
            s = (s + 1) & mask
            e = &self.slots[s]
        e.key = key
        e.val = prod
        self.count += 1
        if 2 * self.count > self.cap:
            self._grow(m)
        return 0


cdef class ModTable:
    """Accumulator of packed terms with coefficients mod ``m`` (``m < 2**31``)."""

    cdef _Table table
    cdef readonly uint64_t m

    def __cinit__(self, uint64_t m, Py_ssize_t hint=1024):
        if m >= (1 << 31) or m < 2:
            raise ValueError("modulus must lie in [2, 2**31)")
        self.m = m
        self.table = _Table(hint)

    def add_products(self, const uint64_t[::1] ka, const uint64_t[::1] ca,
                     const uint64_t[::1] kb, const uint64_t[::1] cb, uint64_t scale=1):
        """Accumulate ``scale * a * b`` (coefficients already reduced mod m)."""
        cdef Py_ssize_t na = ka.shape[0], nb = kb.shape[0], i, j
        cdef uint64_t ki, ci, m = self.m
        cdef _Table t = self.table
        scale %= m
        for i in range(na):
            ki = ka[i]
            ci = ca[i] * scale % m
            if ci == 0:
                continue
            for j in range(nb):
                t.add(ki + kb[j], ci * cb[j], m)

    def add_terms(self, const uint64_t[::1] k, const uint64_t[::1] c, uint64_t scale=1):
        cdef Py_ssize_t n = k.shape[0], i
        cdef uint64_t m = self.m
        scale %= m
        for i in range(n):
            self.table.add(k[i], c[i] % m * scale, m)

    def items(self):
        """``(keys, coefs)`` of the nonzero residues as ``array('Q')``."""
        out_k = array('Q')
        out_c = array('Q')
        cdef _Table t = self.table
        cdef uint64_t v
        cdef Py_ssize_t i
        for i in range(t.cap):
            if t.slots[i].key != EMPTY:
                v = t.slots[i].val % self.m
                if v:
                    out_k.append(t.slots[i].key)
                    out_c.append(v)
        return out_k, out_c


def mul_mod(const uint64_t[::1] ka, const uint64_t[::1] ca,
            const uint64_t[::1] kb, const uint64_t[::1] cb, uint64_t m):
    """Product of two packed sparse polynomials with coefficients mod ``m``.

    Keys are packed exponent vectors (field widths chosen by the caller so
    that sums never carry).  Returns ``(keys, coefs)`` as ``array('Q')``
    holding only the nonzero residues.
    """
    table = ModTable(m, max(ka.shape[0], kb.shape[0]) * 4)
    table.add_products(ka, ca, kb, cb)
    return table.items()


cdef inline uint64_t _powmod(uint64_t base, uint64_t e, uint64_t m) nogil:
    cdef uint64_t r = 1 % m
    base %= m
    while e:
        if e & 1:
            r = r * base % m
        base = base * base % m
        e >>= 1
    return r


def eval_mod(const uint64_t[::1] coefs, const uint64_t[::1] exps, Py_ssize_t nvars,
             const uint64_t[::1] cols, Py_ssize_t npts, uint64_t m):
    """Evaluate one polynomial at ``npts`` points modulo ``m``.

    ``exps`` is term-major (``nterms * nvars``); ``cols`` is variable-major
    (``nvars * npts``) with entries already reduced mod ``m``.
    """
    if m >= (1 << 31):
        raise ValueError("modulus must be below 2**31")
    cdef Py_ssize_t nterms = coefs.shape[0], t, v, i
    cdef uint64_t acc, total, e
    out = array('Q', bytes(8 * npts))
    cdef uint64_t[::1] res = out
    with nogil:
        for i in range(npts):
            total = 0
            for t in range(nterms):
                acc = coefs[t]
                for v in range(nvars):
                    e = exps[t * nvars + v]
                    if e:
                        acc = acc * _powmod(cols[v * npts + i], e, m) % m
                total += acc
                if total >= m:
                    total -= m
            res[i] = total
    return out
