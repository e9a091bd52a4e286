"""Exact arithmetic in Q(zeta_p) and truncated arithmetic in Z_p[zeta].

Elements are stored on the basis zeta, zeta^2, ..., zeta^(p-1); the constant 1
is the vector with every coefficient equal to -1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from sympy.ntheory import isprime, primitive_root

INF = math.inf

MAX_PRIME = 1 << 20


@dataclass(frozen=True)
class PrimeContext:
    """An odd prime p with a fixed generator g of (Z/pZ)^*."""

    p: int
    g: int = 0

    def __post_init__(self) -> None:
        p = self.p
        if not isinstance(p, int) or p < 3 or p >= MAX_PRIME or not isprime(p):
            raise ValueError(f"p must be an odd prime below 2^20, got {p!r}")
        if self.g == 0:
            object.__setattr__(self, "g", int(primitive_root(p)))
        elif pow(self.g, (p - 1) // 2, p) == 1 or _order(self.g, p) != p - 1:
            raise ValueError(f"{self.g} does not generate (Z/{p}Z)^*")

    @property
    def q(self) -> int:
        return (self.p - 1) // 2

    def units(self) -> range:
        return range(1, self.p)

    def inv(self, c: int) -> int:
        return pow(c, -1, self.p)

    def zeta(self, k: int = 1) -> CycNum:
        return CycNum.zeta(self.p, k)

    def one(self) -> CycNum:
        return CycNum.from_int(self.p, 1)

    @cached_property
    def lam(self) -> CycNum:
        return self.one() - self.zeta()

    @cached_property
    def mu(self) -> CycNum:
        # p^2 / lambda = p * prod_{c >= 2} (1 - zeta^c)
        acc = CycNum.from_int(self.p, self.p)
        one = self.one()
        for c in range(2, self.p):
            acc = acc * (one - self.zeta(c))
        return acc


def _order(g: int, p: int) -> int:
    k, x = 1, g % p
    while x != 1:
        x = x * g % p
        k += 1
    return k


class CycNum:
    """Element of Q(zeta_p) as an integer numerator vector over a positive denominator."""

    __slots__ = ("p", "num", "den", "_hash")

    def __init__(self, p: int, num: Sequence[int], den: int = 1) -> None:
        if len(num) != p - 1:
            raise ValueError(f"expected {p - 1} coefficients, got {len(num)}")
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if den < 0:
            num = [-a for a in num]
            den = -den
        g = den
        for a in num:
            if g == 1:
                break
            g = math.gcd(g, a)
        if g != 1:
            num = [a // g for a in num]
            den //= g
        self.p = p
        self.num = tuple(num)
        self.den = den
        self._hash = None

    # construction

    @classmethod
    def from_coeffs(cls, p: int, coeffs: Iterable[Fraction | int]) -> CycNum:
        fr = [Fraction(c) for c in coeffs]
        den = 1
        for f in fr:
            den = den * f.denominator // math.gcd(den, f.denominator)
        return cls(p, [f.numerator * (den // f.denominator) for f in fr], den)

    @classmethod
    def from_int(cls, p: int, n: int | Fraction) -> CycNum:
        n = Fraction(n)
        return cls(p, [-n.numerator] * (p - 1), n.denominator)

    @classmethod
    def zero(cls, p: int) -> CycNum:
        return cls(p, [0] * (p - 1))

    @classmethod
    def zeta(cls, p: int, k: int = 1) -> CycNum:
        k %= p
        if k == 0:
            return cls.from_int(p, 1)
        num = [0] * (p - 1)
        num[k - 1] = 1
        return cls(p, num)

    @classmethod
    def from_poly(cls, p: int, poly: Sequence[int | Fraction]) -> CycNum:
        """Element sum_k poly[k] zeta^k for any length of ``poly``."""
        full = [Fraction(0)] * p
        for k, a in enumerate(poly):
            full[k % p] += Fraction(a)
        return cls.from_coeffs(p, [full[c] - full[0] for c in range(1, p)])

    # readout

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(a, self.den) for a in self.num)

    def coeff(self, c: int) -> Fraction:
        return Fraction(self.num[c - 1], self.den)

    def is_integral(self) -> bool:
        return self.den == 1

    def is_zero(self) -> bool:
        return not any(self.num)

    def is_rational(self) -> bool:
        return all(a == self.num[0] for a in self.num)

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("element is not rational")
        return Fraction(-self.num[0], self.den)

    def __repr__(self) -> str:
        body = ", ".join(str(c) for c in self.coeffs)
        return f"CycNum(p={self.p}, [{body}])"

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = CycNum.from_int(self.p, other)
        if not isinstance(other, CycNum):
            return NotImplemented
        return self.p == other.p and self.den == other.den and self.num == other.num

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.p, self.num, self.den))
        return self._hash

    # ring operations

    def _coerce(self, other: object) -> CycNum:
        if isinstance(other, CycNum):
            if other.p != self.p:
                raise ValueError("mixing elements of different cyclotomic fields")
            return other
        if isinstance(other, (int, Fraction)):
            return CycNum.from_int(self.p, other)
        raise TypeError(f"cannot combine CycNum with {type(other).__name__}")

    def __add__(self, other: object) -> CycNum:
        o = self._coerce(other)
        if self.den == o.den:
            return CycNum(self.p, [a + b for a, b in zip(self.num, o.num)], self.den)
        return CycNum(
            self.p,
            [a * o.den + b * self.den for a, b in zip(self.num, o.num)],
            self.den * o.den,
        )

    __radd__ = __add__

    def __neg__(self) -> CycNum:
        return CycNum(self.p, [-a for a in self.num], self.den)

    def __sub__(self, other: object) -> CycNum:
        return self + (-self._coerce(other))

    def __rsub__(self, other: object) -> CycNum:
        return self._coerce(other) - self

    def __mul__(self, other: object) -> CycNum:
        if isinstance(other, (int, Fraction)):
            f = Fraction(other)
            return CycNum(self.p, [a * f.numerator for a in self.num], self.den * f.denominator)
        o = self._coerce(other)
        return CycNum(self.p, _cyc_mul(self.p, self.num, o.num), self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other: object) -> CycNum:
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other: object) -> CycNum:
        return self._coerce(other) * self.inverse()

    def __pow__(self, e: int) -> CycNum:
        if e < 0:
            return self.inverse() ** (-e)
        result = CycNum.from_int(self.p, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def inverse(self) -> CycNum:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        others = CycNum.from_int(self.p, 1)
        for c in range(2, self.p):
            others = others * self.galois(c)
        n = (others * self).to_rational()
        return others * (1 / n)

    # Galois structure

    def galois(self, c: int) -> CycNum:
        """sigma_c: zeta -> zeta^c."""
        p = self.p
        c %= p
        if c == 0:
            raise ValueError("sigma_c needs c prime to p")
        out = [0] * (p - 1)
        for k, a in enumerate(self.num, start=1):
            out[k * c % p - 1] = a
        return CycNum(p, out, self.den)

    def conj(self) -> CycNum:
        return self.galois(self.p - 1)

    def trace(self) -> Fraction:
        # Tr(zeta^k) = -1 for every k prime to p
        return Fraction(-sum(self.num), self.den)

    def norm(self) -> Fraction:
        acc = self
        for c in range(2, self.p):
            acc = acc * self.galois(c)
        return acc.to_rational()

    def augmentation(self) -> Fraction:
        """Image under zeta -> 1; the class of an integral element mod lambda."""
        return Fraction(sum(self.num), self.den)


def _cyc_mul(p: int, a: Sequence[int], b: Sequence[int]) -> list[int]:
    res = [0] * p
    bl = list(enumerate(b, start=1))
    for i, ai in enumerate(a, start=1):
        if ai:
            for j, bj in bl:
                if bj:
                    res[(i + j) % p] += ai * bj
    r0 = res[0]
    return [res[c] - r0 for c in range(1, p)]


def galois_apply(c: int, x: CycNum) -> CycNum:
    return x.galois(c)


def trace(x: CycNum) -> Fraction:
    return x.trace()


def norm(x: CycNum) -> Fraction:
    return x.norm()


def _div_lambda(p: int, num: Sequence[int]) -> list[int]:
    """Exact division by 1 - zeta of an integral element whose augmentation is 0 mod p."""
    s = sum(num)
    if s % p:
        raise ValueError("element is not divisible by lambda")
    t = s // p
    # b(x) - t * Phi_p(x) vanishes at x = 1; divide it by (1 - x) via partial sums
    b = [-t] + [a - t for a in num]
    y = []
    acc = 0
    for k in range(p - 1):
        acc += b[k]
        y.append(acc)
    y0 = y[0]
    return [y[c] - y0 for c in range(1, p - 1)] + [-y0]


def lambda_valuation(x: CycNum) -> int | float:
    """Exponent of lambda in x (negative when x has p in its denominator); ``INF`` for zero."""
    if x.is_zero():
        return INF
    p = x.p
    num = list(x.num)
    den, shift = x.den, 0
    while den % p == 0:
        den //= p
        shift += p - 1
    # p = unit * lambda^(p-1); strip common p-power content first
    g = 0
    for a in num:
        g = math.gcd(g, a)
    k = 0
    while g % p == 0:
        g //= p
        k += 1
    if k:
        num = [a // p**k for a in num]
    v = k * (p - 1)
    while sum(num) % p == 0:
        num = _div_lambda(p, num)
        v += 1
    return v - shift


@dataclass(frozen=True)
class LambdaExpansion:
    p: int
    digits: tuple[int, ...]
    offset: int
    truncation: int

    def __post_init__(self) -> None:
        if any(not 0 <= d < self.p for d in self.digits):
            raise ValueError("digit out of range")

    def value(self) -> CycNum:
        lam = PrimeContext(self.p).lam
        acc = CycNum.zero(self.p)
        power = lam**self.offset
        for d in self.digits:
            if d:
                acc = acc + power * d
            power = power * lam
        return acc


def lambda_expand(x: CycNum, truncation: int) -> LambdaExpansion:
    """Digits a_j in {0..p-1} with x = sum a_j lambda^j + O(lambda^truncation)."""
    if not x.is_integral():
        raise ValueError("lambda_expand needs an integral element")
    if truncation < 1:
        raise ValueError("truncation must be positive")
    p = x.p
    num = list(x.num)
    digits = []
    for _ in range(truncation):
        d = sum(num) % p
        digits.append(d)
        if d:
            num = [a + d for a in num]  # subtract d * 1 = d * (-sum zeta^c)
        num = _div_lambda(p, num)
    return LambdaExpansion(p, tuple(digits), 0, truncation)


class PadicCyc:
    """Element of Z_p[zeta] / p^K on the basis zeta..zeta^(p-1)."""

    __slots__ = ("p", "K", "mod", "coeffs")

    def __init__(self, p: int, K: int, coeffs: Sequence[int]) -> None:
        if K < 1:
            raise ValueError("precision must be at least 1")
        self.p = p
        self.K = K
        self.mod = p**K
        self.coeffs = tuple(a % self.mod for a in coeffs)

    @classmethod
    def one(cls, p: int, K: int) -> PadicCyc:
        return cls(p, K, [-1] * (p - 1))

    def __repr__(self) -> str:
        return f"PadicCyc(p={self.p}, K={self.K}, {list(self.coeffs)})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PadicCyc):
            return NotImplemented
        return (self.p, self.K, self.coeffs) == (other.p, other.K, other.coeffs)

    def __hash__(self) -> int:
        return hash((self.p, self.K, self.coeffs))

    def _check(self, o: PadicCyc) -> None:
        if (o.p, o.K) != (self.p, self.K):
            raise ValueError("precision or prime mismatch")

    def __add__(self, o: PadicCyc) -> PadicCyc:
        self._check(o)
        return PadicCyc(self.p, self.K, [a + b for a, b in zip(self.coeffs, o.coeffs)])

    def __sub__(self, o: PadicCyc) -> PadicCyc:
        self._check(o)
        return PadicCyc(self.p, self.K, [a - b for a, b in zip(self.coeffs, o.coeffs)])

    def __neg__(self) -> PadicCyc:
        return PadicCyc(self.p, self.K, [-a for a in self.coeffs])

    def __mul__(self, o: PadicCyc | int) -> PadicCyc:
        if isinstance(o, int):
            return PadicCyc(self.p, self.K, [a * o for a in self.coeffs])
        self._check(o)
        return PadicCyc(self.p, self.K, _cyc_mul(self.p, self.coeffs, o.coeffs))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> PadicCyc:
        if e < 0:
            return self.inverse() ** (-e)
        result = PadicCyc.one(self.p, self.K)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def galois(self, c: int) -> PadicCyc:
        p = self.p
        c %= p
        if c == 0:
            raise ValueError("sigma_c needs c prime to p")
        out = [0] * (p - 1)
        for k, a in enumerate(self.coeffs, start=1):
            out[k * c % p - 1] = a
        return PadicCyc(p, self.K, out)

    def is_unit(self) -> bool:
        return sum(self.coeffs) % self.p != 0

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def inverse(self) -> PadicCyc:
        if not self.is_unit():
            raise ZeroDivisionError("element is not a unit of Z_p[zeta]")
        others = PadicCyc.one(self.p, self.K)
        for c in range(2, self.p):
            others = others * self.galois(c)
        n = -(others * self).coeffs[0]
        return others * pow(n, -1, self.mod)

    def valuation(self) -> int | float:
        """p-adic valuation of the content, capped by the precision."""
        if self.is_zero():
            return INF
        g = 0
        for a in self.coeffs:
            g = math.gcd(g, a)
        v = 0
        while g % self.p == 0:
            g //= self.p
            v += 1
        return v


def reduce_padic(x: CycNum, K: int) -> PadicCyc:
    p = x.p
    if x.den % p == 0:
        raise ValueError("denominator divisible by p; element not p-integral")
    mod = p**K
    inv = pow(x.den, -1, mod)
    return PadicCyc(p, K, [a * inv for a in x.num])
