"""Binomial power series f[theta](T) = (1 - mu T)^(theta/p) over Q(zeta_p)."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import mpmath

from .cyclotomic import CycNum, PadicCyc, PrimeContext, lambda_valuation, reduce_padic
from .group_ring import GroupRingElem, NotInStickelbergerIdeal, act, relative_weight, stickelberger_member

# a rational strictly below pi
PI_LOWER = Fraction(314159265358979, 10**14)


class TruncSeries:
    """sum_{n <= degree} coeffs[n] T^n + O(T^(degree+1))."""

    __slots__ = ("p", "coeffs")

    def __init__(self, p: int, coeffs: Sequence[CycNum]) -> None:
        if not coeffs:
            raise ValueError("a truncated series needs at least the constant term")
        self.p = p
        self.coeffs = tuple(coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def constant(cls, p: int, c: CycNum | int, degree: int) -> TruncSeries:
        c = c if isinstance(c, CycNum) else CycNum.from_int(p, c)
        return cls(p, [c] + [CycNum.zero(p)] * degree)

    @classmethod
    def linear(cls, c0: CycNum, c1: CycNum, degree: int) -> TruncSeries:
        """c0 + c1 T, truncated at ``degree``."""
        p = c0.p
        coeffs = [c0, c1] + [CycNum.zero(p)] * (degree - 1)
        return cls(p, coeffs[: degree + 1])

    def __repr__(self) -> str:
        return f"TruncSeries(p={self.p}, degree={self.degree})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return self.p == other.p and self.coeffs == other.coeffs

    def truncate(self, degree: int) -> TruncSeries:
        if degree > self.degree:
            raise ValueError("cannot extend a truncated series")
        return TruncSeries(self.p, self.coeffs[: degree + 1])

    def __add__(self, o: TruncSeries) -> TruncSeries:
        d = min(self.degree, o.degree)
        return TruncSeries(self.p, [a + b for a, b in zip(self.coeffs[: d + 1], o.coeffs)])

    def __sub__(self, o: TruncSeries) -> TruncSeries:
        d = min(self.degree, o.degree)
        return TruncSeries(self.p, [a - b for a, b in zip(self.coeffs[: d + 1], o.coeffs)])

    def scale(self, c: CycNum | int | Fraction) -> TruncSeries:
        return TruncSeries(self.p, [a * c for a in self.coeffs])

    def __mul__(self, o: TruncSeries) -> TruncSeries:
        d = min(self.degree, o.degree)
        a, b = self.coeffs, o.coeffs
        out = []
        for n in range(d + 1):
            acc = CycNum.zero(self.p)
            for k in range(n + 1):
                if not a[k].is_zero() and not b[n - k].is_zero():
                    acc = acc + a[k] * b[n - k]
            out.append(acc)
        return TruncSeries(self.p, out)

    def __pow__(self, e: int) -> TruncSeries:
        if e < 0:
            raise ValueError("use explicit inversion for negative powers")
        result = TruncSeries.constant(self.p, 1, self.degree)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def galois(self, c: int) -> TruncSeries:
        return TruncSeries(self.p, [a.galois(c) for a in self.coeffs])

    def conj(self) -> TruncSeries:
        return self.galois(self.p - 1)

    def evaluate(self, t: CycNum) -> CycNum:
        acc = CycNum.zero(self.p)
        for a in reversed(self.coeffs):
            acc = acc * t + a
        return acc


def binom_frac(k: int, p: int, n: int) -> Fraction:
    """The generalized binomial coefficient C(k/p, n)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    r = Fraction(k, p)
    acc = Fraction(1)
    for i in range(n):
        acc *= (r - i) / (i + 1)
    return acc


def binom_rational(r: Fraction, n: int) -> Fraction:
    acc = Fraction(1)
    for i in range(n):
        acc *= (r - i) / (i + 1)
    return acc


def e_exponent(n: int, p: int) -> int:
    """p-power divided out of a_n; clamped at 0 for n = 0."""
    return max(n - 1 - n // (p - 1), 0)


@lru_cache(maxsize=None)
def _trig_brackets(p: int) -> tuple[tuple[Fraction, Fraction, Fraction, Fraction], ...]:
    """Certified rational brackets (cos_lo, cos_hi, sin_lo, sin_hi) of 2 pi k / p."""
    out = []
    iv = mpmath.iv
    saved, iv.prec = iv.prec, 160
    try:
        for k in range(p):
            x = iv.mpf(2) * iv.pi * k / p
            cs, sn = iv.cos(x), iv.sin(x)
            (cl, ch), (sl, sh) = cs._mpi_, sn._mpi_
            out.append((_mpf_frac(cl), _mpf_frac(ch), _mpf_frac(sl), _mpf_frac(sh)))
    finally:
        iv.prec = saved
    return tuple(out)


def _mpf_frac(x: tuple) -> Fraction:
    """Exact value of a raw (sign, man, exp, bc) endpoint."""
    sign, man, exp, _ = x
    man = -int(man) if sign else int(man)
    return Fraction(man * 2**exp) if exp >= 0 else Fraction(man, 2 ** (-exp))


def _interval_sum(terms: list[tuple[Fraction, Fraction]]) -> tuple[Fraction, Fraction]:
    return sum(t[0] for t in terms), sum(t[1] for t in terms)


def _scaled(w: Fraction, lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    a, b = w * lo, w * hi
    return (a, b) if a <= b else (b, a)


def _sq_bounds(iv: tuple[Fraction, Fraction]) -> tuple[Fraction, Fraction]:
    lo, hi = iv
    top = max(lo * lo, hi * hi)
    if lo <= 0 <= hi:
        return Fraction(0), top
    return min(lo * lo, hi * hi), top


def abs_sq_bracket(x: CycNum, c: int = 1) -> tuple[Fraction, Fraction]:
    """Rational (lower, upper) bounds on |sigma_c(x)|^2 under zeta -> exp(2 pi i / p)."""
    p = x.p
    if x.is_rational():
        r = x.to_rational()
        return r * r, r * r
    br = _trig_brackets(p)
    re_terms, im_terms = [], []
    for k, w in enumerate(x.coeffs, start=1):
        if w:
            cl, ch, sl, sh = br[c * k % p]
            re_terms.append(_scaled(w, cl, ch))
            im_terms.append(_scaled(w, sl, sh))
    if not re_terms:
        return Fraction(0), Fraction(0)
    r_lo, r_hi = _sq_bounds(_interval_sum(re_terms))
    i_lo, i_hi = _sq_bounds(_interval_sum(im_terms))
    return r_lo + i_lo, r_hi + i_hi


def max_abs_sq_upper(x: CycNum) -> Fraction:
    return max(abs_sq_bracket(x, c)[1] for c in range(1, x.p))


def certified_mu_bound(p: int) -> Fraction:
    """Rational M >= |sigma_c(mu)| = p^2 / (2 sin(pi c / p)) for every c."""
    x = PI_LOWER / p
    sin_lower = x - x**3 / 6
    return Fraction(p * p) / (2 * sin_lower)


@dataclass(frozen=True)
class SeriesContext:
    ctx: PrimeContext
    mu: CycNum
    M: Fraction

    @classmethod
    def build(cls, p: int | PrimeContext) -> SeriesContext:
        ctx = p if isinstance(p, PrimeContext) else PrimeContext(p)
        return cls(ctx, ctx.mu, certified_mu_bound(ctx.p))

    @property
    def p(self) -> int:
        return self.ctx.p


def _additive_action(theta: GroupRingElem, x: CycNum) -> CycNum:
    """sum_c n_c sigma_c(x)."""
    acc = CycNum.zero(x.p)
    for c, n in enumerate(theta.coeffs, start=1):
        if n:
            acc = acc + x.galois(c) * n
    return acc


_series_cache: dict[tuple[tuple[int, ...], int, int], TruncSeries] = {}


def f_theta(theta: GroupRingElem, deg: int, sctx: SeriesContext) -> TruncSeries:
    """Truncation of prod_c (1 - sigma_c(mu) T)^(n_c / p) at degree ``deg``.

    Uses the logarithmic derivative: f'/f = sum_k g_k T^k with
    g_k = -(1/p) sum_c n_c sigma_c(mu^(k+1)).
    """
    if deg < 0:
        raise ValueError("degree must be nonnegative")
    p = sctx.p
    key = (theta.coeffs, p, deg)
    hit = _series_cache.get(key)
    if hit is not None:
        return hit
    for (coeffs, pp, d), s in _series_cache.items():
        if coeffs == theta.coeffs and pp == p and d > deg:
            return s.truncate(deg)
    g = []
    mu_pow = sctx.mu
    for _ in range(deg):
        g.append(_additive_action(theta, mu_pow) * Fraction(-1, p))
        mu_pow = mu_pow * sctx.mu
    a = [CycNum.from_int(p, 1)]
    for n in range(deg):
        acc = CycNum.zero(p)
        for k in range(n + 1):
            if not a[n - k].is_zero() and not g[k].is_zero():
                acc = acc + g[k] * a[n - k]
        a.append(acc * Fraction(1, n + 1))
    out = TruncSeries(p, a)
    _series_cache[key] = out
    return out


def f_single(k: int, c: int, deg: int, sctx: SeriesContext) -> TruncSeries:
    """(1 - sigma_c(mu) T)^(k/p) = sum_n C(k/p, n) (-sigma_c(mu))^n T^n."""
    p = sctx.p
    m = -sctx.mu.galois(c)
    coeffs = []
    power = CycNum.from_int(p, 1)
    for n in range(deg + 1):
        coeffs.append(power * binom_frac(k, p, n))
        power = power * m
    return TruncSeries(p, coeffs)


def f_theta_product(theta: GroupRingElem, deg: int, sctx: SeriesContext) -> TruncSeries:
    """The same series built literally as a product of single binomial series."""
    acc = TruncSeries.constant(sctx.p, 1, deg)
    for c, n in enumerate(theta.coeffs, start=1):
        if n:
            acc = acc * f_single(n, c, deg, sctx)
    return acc


def one_minus_mu_power(theta: GroupRingElem, deg: int, sctx: SeriesContext) -> tuple[TruncSeries, TruncSeries]:
    """(numerator, denominator) polynomials of (1 - mu T)^theta, truncated."""
    p = sctx.p
    num = TruncSeries.constant(p, 1, deg)
    den = TruncSeries.constant(p, 1, deg)
    one = CycNum.from_int(p, 1)
    for c, n in enumerate(theta.coeffs, start=1):
        if n:
            lin = TruncSeries.linear(one, -sctx.mu.galois(c), deg)
            if n > 0:
                num = num * lin**n
            else:
                den = den * lin ** (-n)
    return num, den


@dataclass
class Verdict:
    ok: bool
    detail: str = ""
    witness: int | None = None

    def __bool__(self) -> bool:
        return self.ok


def verify_pth_power(theta: GroupRingElem, deg: int, sctx: SeriesContext) -> Verdict:
    """f[theta]^p * (1-mu T)^(theta_-) == (1-mu T)^(theta_+) through degree ``deg``."""
    if deg < 1:
        raise ValueError("degree must be at least 1")
    f = f_theta(theta, deg, sctx)
    num, den = one_minus_mu_power(theta, deg, sctx)
    lhs = f ** sctx.p * den
    for n, (a, b) in enumerate(zip(lhs.coeffs, num.coeffs)):
        if a != b:
            return Verdict(False, f"coefficient mismatch at degree {n}", n)
    return Verdict(True, f"identity holds through degree {deg}")


@dataclass
class NormalizedCoeffs:
    """alpha[n] = a_n / p^e[n]."""

    alpha: list[CycNum]
    e: list[int]


def guaranteed_exponent(n: int, p: int) -> int:
    """Largest k with p^k | a_n(theta) for every theta, from v_lambda(a_n) >= n(p-2) - (p-1) v_p(n!)."""
    if n == 0:
        return 0
    return n - _vp_factorial(n, p) - -(-n // (p - 1))


def _vp_factorial(n: int, p: int) -> int:
    v, m = 0, n
    while m:
        m //= p
        v += m
    return v


def normalize(series: TruncSeries, exponent=e_exponent) -> NormalizedCoeffs:
    p = series.p
    es = [exponent(n, p) for n in range(series.degree + 1)]
    return NormalizedCoeffs([a * Fraction(1, p**e) for a, e in zip(series.coeffs, es)], es)


@dataclass
class BoundReport:
    theta: GroupRingElem
    weight: int | None
    mass: int
    integral: Verdict
    normalized_integral: Verdict
    series_bound: Verdict
    fact_bound: Verdict | None = None
    fact_bound_weak: Verdict | None = None

    @property
    def ok(self) -> bool:
        checks = [self.integral, self.normalized_integral, self.series_bound]
        checks += [v for v in (self.fact_bound, self.fact_bound_weak) if v is not None]
        return all(checks)


def _first_nonintegral(xs: Sequence[CycNum]) -> int | None:
    return next((n for n, a in enumerate(xs) if not a.is_integral()), None)


def series_bound(f: TruncSeries, mass: int, M: Fraction) -> Verdict:
    """|sigma_c(a_n)| <= M^n |C(-mass/p, n)| for every embedding."""
    p = f.p
    for n, a in enumerate(f.coeffs):
        rhs = M**n * abs(binom_frac(-mass, p, n))
        if max_abs_sq_upper(a) > rhs * rhs:
            return Verdict(False, "archimedean series bound violated", n)
    return Verdict(True, f"|a_n| <= M^n |C(-{mass}/p, n)| through degree {f.degree}")


def fact_bounds(alphas: Sequence[CycNum], weight: int, p: int) -> tuple[Verdict, Verdict]:
    """Coefficient and embedding sizes of normalized coefficients against
    2 C(n+l-1, n) (p^2/6)^(n+1) and, for n >= 1, n^l (2p/3)^(2(n+1)), where weight = 2l."""
    l = Fraction(weight, 2)
    strong = Verdict(True, "within 2 C(n+l-1,n) (p^2/6)^(n+1)")
    weak = Verdict(True, "within n^l (2p/3)^(2(n+1))")
    for n, alpha in enumerate(alphas):
        u_max = max(abs(c) for c in alpha.coeffs)
        emb_sq = max_abs_sq_upper(alpha)
        bound = 2 * binom_rational(n + l - 1, n) * Fraction(p * p, 6) ** (n + 1)
        if strong and (u_max >= bound or emb_sq >= bound * bound):
            strong = Verdict(False, "coefficient bound violated", n)
        if n >= 1 and weak:
            # n^l with l possibly half-integral: compare squares
            wb_sq = Fraction(n) ** weight * Fraction(2 * p, 3) ** (4 * (n + 1))
            if u_max * u_max >= wb_sq or emb_sq >= wb_sq:
                weak = Verdict(False, "weak coefficient bound violated", n)
    return strong, weak


def integrality_and_bounds(theta: GroupRingElem, deg: int, sctx: SeriesContext) -> tuple[NormalizedCoeffs, BoundReport]:
    p = sctx.p
    f = f_theta(theta, deg, sctx)
    norm = normalize(f)
    try:
        weight = relative_weight(theta)
    except ValueError:
        weight = None
    mass = sum(abs(n) for n in theta.coeffs)

    bad = _first_nonintegral(f.coeffs)
    integral = Verdict(bad is None, "a_n in Z[zeta]" if bad is None else "non-integral a_n", bad)
    bad = _first_nonintegral(norm.alpha)
    nint = Verdict(bad is None, "alpha_n integral" if bad is None else "non-integral alpha_n", bad)
    report = BoundReport(theta, weight, mass, integral, nint, series_bound(f, mass, sctx.M))
    if weight is not None and weight > 0:
        report.fact_bound, report.fact_bound_weak = fact_bounds(norm.alpha, weight, p)
    return norm, report


def required_degree(p: int, t_val: int, K: int) -> int:
    """Least degree D such that every term a_n T^n with n > D lies in p^K.

    t_val is v_lambda(T); uses v_lambda(a_n T^n) >= n(p - 3 + t_val) + 1 for n >= 1.
    """
    slope = p - 3 + t_val
    if slope <= 0:
        raise ValueError("series does not converge at this argument")
    need = (p - 1) * K - 1
    # smallest n with n * slope >= need, minus one
    return max(-(-need // slope) - 1, 0)


def padic_eval(series: TruncSeries, t: CycNum, K: int) -> PadicCyc:
    """sum_n a_n t^n in Z_p[zeta] / p^K, refusing if the truncation is too short."""
    p = series.p
    if t.is_zero():
        return reduce_padic(series.coeffs[0], K)
    tv = lambda_valuation(t)
    if tv < 0:
        raise ValueError("argument is not p-integral")
    need = required_degree(p, int(tv), K)
    if series.degree < need:
        raise ValueError(f"series degree {series.degree} too small for precision p^{K}; need {need}")
    tp = reduce_padic(t, K)
    acc = PadicCyc(p, K, [0] * (p - 1))
    for a in reversed(series.coeffs[: need + 1]):
        acc = acc * tp + reduce_padic(a, K)
    return acc


@dataclass(frozen=True)
class CharacteristicReport:
    alpha: CycNum
    integral: bool
    vp_sum: int
    v_lambda_shift: int | float


def characteristic_alpha(x: int, y: int, p: int) -> CharacteristicReport:
    """alpha = (x + y)/(1 - zeta) - y and v_lambda(alpha + y)."""
    if x + y == 0:
        raise ValueError("x + y must be nonzero")
    lam = PrimeContext(p).lam
    shifted = CycNum.from_int(p, x + y) / lam
    alpha = shifted - y
    return CharacteristicReport(alpha, alpha.is_integral(), _vp(x + y, p), lambda_valuation(shifted))


def _vp(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def synthetic_pair(p: int, v: int, rng: random.Random, bits: int = 24) -> tuple[int, int]:
    """Coprime (x, y) with p not dividing y and v_p(x + y) exactly v."""
    while True:
        u = rng.randrange(1, 2**bits)
        if u % p == 0:
            continue
        y = rng.randrange(-(2**bits), 2**bits)
        if y == 0 or y % p == 0:
            continue
        x = p**v * u - y
        if math.gcd(x, y) == 1:
            return x, y


def _minus_stickelberger(theta: GroupRingElem) -> bool:
    if theta.conj() != -theta:
        return False
    try:
        stickelberger_member(theta)
    except NotInStickelbergerIdeal:
        return False
    return True


def verify_gamma_identity(theta: GroupRingElem, x: int, y: int, K: int, sctx: SeriesContext) -> Verdict:
    """f[theta](T)^p against prod sigma_c(-alpha/y)^(n_c) mod p^K, with T = (x+y)/(y p^2).

    The right side comes from the characteristic number alone; negative
    exponents are moved across so no inversion is needed.
    """
    p = sctx.p
    if not _minus_stickelberger(theta):
        raise ValueError("theta must lie in the minus part of the Stickelberger ideal")
    if math.gcd(x, y) != 1 or y % p == 0:
        raise ValueError("need gcd(x, y) = 1 and p not dividing y")
    if (x + y) % (p * p):
        raise ValueError("need p^2 | x + y")
    t = CycNum.from_int(p, 1) * Fraction(x + y, y * p * p)
    need = required_degree(p, lambda_valuation(t), K)
    lhs = padic_eval(f_theta(theta, need, sctx), t, K) ** p

    base = reduce_padic(characteristic_alpha(x, y, p).alpha * Fraction(-1, y), K)
    pos = act(theta.positive_part(), base, K)
    neg = act(theta.negative_part(), base, K)
    left, right = lhs * neg, pos
    if left == right:
        return Verdict(True, f"identity holds mod p^{K}")
    diff = left - right
    return Verdict(False, f"identity fails; agreement only mod p^{diff.valuation()}", int(diff.valuation()))
