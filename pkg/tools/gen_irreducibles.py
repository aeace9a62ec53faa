"""Regenerate src/wittkit/data/irreducibles.txt.

For each (p, d) the entry is the first monic irreducible of degree d over F_p
when the lower coefficients (c_0, ..., c_{d-1}) are read as base-p digits of
0, 1, 2, ...
"""

import itertools
from pathlib import Path

from wittkit.substrate.rings import is_irreducible_mod_p

PRIMES = (2, 3, 5, 7, 11, 13)
MAX_DEGREE = 12


def first_irreducible(p, d):
    for n in itertools.count():
        low = [(n // p ** i) % p for i in range(d)]
        if is_irreducible_mod_p(low + [1], p):
            return low + [1]


def main():
    lines = ["# p d c_0 c_1 ... c_d (monic, constant term first)"]
    for p in PRIMES:
        for d in range(1, MAX_DEGREE + 1):
            lines.append(" ".join(str(x) for x in [p, d, *first_irreducible(p, d)]))
    out = Path(__file__).resolve().parents[1] / "src" / "wittkit" / "data" / "irreducibles.txt"
    out.write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
