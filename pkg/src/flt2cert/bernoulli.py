"""Generalized Bernoulli residues B_{1, omega^-k} mod p and the irregularity index."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from sympy.ntheory import isprime

ORACLE_CEILING = 2000

_bernoulli_cache: list[Fraction] = [Fraction(1)]


def _check_prime(p: int) -> None:
    if p < 3 or not isprime(p):
        raise ValueError(f"p must be an odd prime, got {p}")


def teichmuller(a: int, p: int, K: int = 2) -> int:
    """omega(a) mod p^K, the (p-1)-th root of unity congruent to a mod p."""
    mod = p**K
    return pow(a, p ** (K - 1), mod)


def bernoulli_char(p: int, k: int) -> Fraction:
    """B_{1, omega^-k} modulo p Z_p, for odd 1 <= k <= p-2.

    Returned as an integer in [0, p) when the value is p-integral. For k = 1
    the value has a simple pole at p and is returned as u/p with 0 < u < p^2.
    """
    _check_prime(p)
    if not 1 <= k <= p - 2:
        raise ValueError(f"k must lie in 1..{p - 2}")
    if k % 2 == 0:
        raise ValueError("only odd characters are used")
    mod = p * p
    s = 0
    for a in range(1, p):
        w = teichmuller(a, p, 2)
        s += a * pow(w, -k, mod)
    s %= mod
    if s % p == 0:
        return Fraction((s // p) % p)
    return Fraction(s, p)


def bernoulli_numbers(m: int) -> list[Fraction]:
    """B_0..B_m from sum_{j<=n} C(n+1, j) B_j = 0, exact."""
    cache = _bernoulli_cache
    for n in range(len(cache), m + 1):
        acc = Fraction(0)
        for j in range(n):
            acc += comb(n + 1, j) * cache[j]
        cache.append(-acc / (n + 1))
    return cache[: m + 1]


def bernoulli_oracle(p: int, ceiling: int = ORACLE_CEILING) -> list[int]:
    """Odd k in 3..p-2 with p | B_{p-k}, via the classical recurrence."""
    _check_prime(p)
    if p > ceiling:
        raise ValueError(f"p = {p} exceeds the oracle ceiling {ceiling}")
    bs = bernoulli_numbers(max(p - 3, 0))
    out = []
    for k in range(3, p - 1, 2):
        b = bs[p - k]
        # von Staudt-Clausen: p does not divide the denominator of B_m for m < p-1
        assert b.denominator % p != 0
        if b.numerator % p == 0:
            out.append(k)
    return out


@dataclass(frozen=True)
class IrregularityReport:
    p: int
    i_p: int
    irregular_ks: list[int] = field(default_factory=list)
    D: int = 0
    n_list: list[int] = field(default_factory=list)

    @property
    def irregular_exponents(self) -> list[int]:
        """Odd indices r = p - 1 - k, i.e. those with p | B_{r+1}; 37 gives [31]."""
        return sorted(self.p - 1 - k for k in self.irregular_ks)

    def as_dict(self) -> dict:
        return {
            "p": self.p,
            "i_p": self.i_p,
            "D": self.D,
            "irregular_ks": list(self.irregular_ks),
            "irregular_exponents": self.irregular_exponents,
        }


def irregularity_index(p: int) -> IrregularityReport:
    _check_prime(p)
    q = (p - 1) // 2
    irregular, regular = [], []
    for k in range(1, p - 1, 2):
        (irregular if bernoulli_char(p, k) == 0 else regular).append(k)
    return IrregularityReport(p, len(irregular), irregular, q - len(irregular), regular)
