"""Coordinate maps on Q(zeta_p), coefficient streams of orbit families, and exact rank profiles."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .cyclotomic import CycNum
from .group_ring import GroupRingElem
from .series import SeriesContext, f_theta, guaranteed_exponent


def kappa(x: CycNum) -> tuple[Fraction, ...]:
    """Basis coordinates w_c = (Tr(zeta^-c x) - Tr(x)) / p, computed through traces."""
    p = x.p
    t = x.trace()
    return tuple((Fraction((CycNum.zeta(p, -c) * x).trace()) - t) / p for c in range(1, p))


def nu(x: CycNum) -> tuple[CycNum, ...]:
    """Vector of conjugates (sigma_1 x, ..., sigma_{p-1} x)."""
    return tuple(x.galois(c) for c in range(1, x.p))


def kappa_from_conjugates(v: Sequence[CycNum]) -> tuple[Fraction, ...]:
    """Coordinates of x recovered from its conjugate vector alone."""
    p = len(v) + 1
    total = sum((y for y in v), CycNum.zero(p))
    tr = total.to_rational()
    out = []
    for c in range(1, p):
        # Tr(zeta^-c x) = sum_d sigma_d(zeta^-c) sigma_d(x)
        acc = CycNum.zero(p)
        for d, y in enumerate(v, start=1):
            acc = acc + CycNum.zeta(p, -c * d) * y
        out.append((acc.to_rational() - tr) / p)
    return tuple(out)


def kappa_inverse(w: Sequence[Fraction | int]) -> tuple[CycNum, ...]:
    """nu(sum_c w_c zeta^c)."""
    return nu(CycNum.from_coeffs(len(w) + 1, w))


def u_vectors(theta: GroupRingElem, deg: int, sctx: SeriesContext, normalized: bool = False) -> list[list[Fraction]]:
    """Streams u[c-1][n] with x_n = sum_c u[c-1][n] zeta^c, where x_n is a_n(theta),
    or a_n(theta) / p^k(n) with the guaranteed p-power k(n) removed when ``normalized``."""
    p = sctx.p
    f = f_theta(theta, deg, sctx)
    streams: list[list[Fraction]] = [[] for _ in range(p - 1)]
    for n, a in enumerate(f.coeffs):
        x = a * Fraction(1, p ** guaranteed_exponent(n, p)) if normalized else a
        for c, u in enumerate(kappa(x)):
            streams[c].append(u)
    return streams


def verify_u_vectors(theta: GroupRingElem, deg: int, sctx: SeriesContext) -> bool:
    """Both directions of the orbit/coefficient correspondence, exactly.

    Forward: p u^(c) = Tr(zeta^-c a) - Tr(a) agrees with the stored coordinates.
    Backward: a_n(sigma_d theta) = sigma_d(sum_c u_n^(c) zeta^c) for every d.
    """
    p = sctx.p
    f = f_theta(theta, deg, sctx)
    streams = u_vectors(theta, deg, sctx)
    for n, a in enumerate(f.coeffs):
        if tuple(s[n] for s in streams) != a.coeffs:
            return False
    for d in range(2, p):
        g = f_theta(theta.translate(d), deg, sctx)
        for n in range(deg + 1):
            rebuilt = CycNum.from_coeffs(p, [s[n] for s in streams]).galois(d)
            if rebuilt != g.coeffs[n]:
                return False
    return True


@dataclass
class OrbitFamily:
    """Orbit representatives; the family itself is the union of their G-orbits."""

    reps: list[GroupRingElem]

    def __post_init__(self) -> None:
        if not self.reps:
            raise ValueError("an orbit family needs at least one representative")
        p = self.reps[0].p
        seen: dict[tuple[int, ...], int] = {}
        for i, r in enumerate(self.reps):
            if r.p != p:
                raise ValueError("representatives over different primes")
            if r.is_zero():
                raise ValueError("zero representative")
            if len(set(r.orbit())) != p - 1:
                raise ValueError(f"representative {i} has a nontrivial stabilizer")
            key = r.canonical()
            if key in seen:
                raise ValueError(f"representatives {seen[key]} and {i} lie in the same orbit")
            seen[key] = i

    @property
    def p(self) -> int:
        return self.reps[0].p

    @property
    def orbit_size(self) -> int:
        return self.p - 1

    @property
    def N_prime(self) -> int:
        return len(self.reps)

    @property
    def N(self) -> int:
        return self.orbit_size * len(self.reps)

    def members(self) -> list[GroupRingElem]:
        return [r.translate(d) for r in self.reps for d in range(1, self.p)]


@dataclass(frozen=True)
class RowVector:
    """Row n: the concatenated coefficient blocks of every representative."""

    n: int
    entries: tuple[int, ...]
    block_size: int

    def block(self, i: int) -> tuple[int, ...]:
        b = self.block_size
        return self.entries[i * b : (i + 1) * b]

    def __len__(self) -> int:
        return len(self.entries)


def family_rows(family: OrbitFamily, deg: int, sctx: SeriesContext) -> list[RowVector]:
    """Integral rows from the normalized coefficient streams of each representative."""
    per_rep = [u_vectors(r, deg, sctx, normalized=True) for r in family.reps]
    rows = []
    for n in range(deg + 1):
        entries: list[int] = []
        for streams in per_rep:
            for s in streams:
                u = s[n]
                if u.denominator != 1:
                    raise ArithmeticError(f"normalized coefficient not integral at n={n}")
                entries.append(u.numerator)
        rows.append(RowVector(n, tuple(entries), family.orbit_size))
    return rows


def _as_ints(row: Sequence[Fraction | int]) -> list[int]:
    den = 1
    for a in row:
        if isinstance(a, Fraction):
            den = den * a.denominator // math.gcd(den, a.denominator)
    return [int(a * den) for a in row]


def _primitive(v: list[int]) -> list[int]:
    g = 0
    for a in v:
        g = math.gcd(g, a)
    return [a // g for a in v] if g > 1 else v


class Echelon:
    """Incremental integer echelon form; rows are kept primitive, pivots sorted."""

    def __init__(self, width: int) -> None:
        self.width = width
        self.rows: list[tuple[int, list[int]]] = []

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, row: Sequence[Fraction | int]) -> list[int]:
        v = _as_ints(row)
        if len(v) != self.width:
            raise ValueError(f"row length {len(v)} does not match width {self.width}")
        for piv, r in self.rows:
            a = v[piv]
            if a:
                b = r[piv]
                v = _primitive([b * x - a * y for x, y in zip(v, r)])
        return v

    def contains(self, row: Sequence[Fraction | int]) -> bool:
        return not any(self.reduce(row))

    def add(self, row: Sequence[Fraction | int]) -> bool:
        """Insert ``row``; True when it enlarged the span."""
        v = self.reduce(row)
        piv = next((i for i, a in enumerate(v) if a), None)
        if piv is None:
            return False
        v = _primitive(v)
        pos = next((k for k, (pv, _) in enumerate(self.rows) if pv > piv), len(self.rows))
        self.rows.insert(pos, (piv, v))
        return True

    def copy(self) -> Echelon:
        e = Echelon(self.width)
        e.rows = [(p, list(r)) for p, r in self.rows]
        return e


@dataclass(frozen=True)
class RankProfile:
    d: tuple[int, ...]
    S: tuple[int, ...]
    width: int = 0

    @property
    def d_inf(self) -> int:
        return self.d[-1] if self.d else 0

    @property
    def stabilization(self) -> int | None:
        """Last index at which the span grew."""
        return self.S[-1] if self.S else None


def _entries(row) -> Sequence[Fraction | int]:
    return row.entries if isinstance(row, RowVector) else row


def rank_profile(rows: Iterable[RowVector | Sequence[Fraction | int]]) -> RankProfile:
    ech: Echelon | None = None
    d, S = [], []
    for m, row in enumerate(rows):
        e = _entries(row)
        if ech is None:
            ech = Echelon(len(e))
        if ech.add(e):
            S.append(m)
        d.append(ech.rank)
    return RankProfile(tuple(d), tuple(S), ech.width if ech else 0)


@dataclass
class IndependenceReport:
    ok: bool
    N: int
    d_inf: int
    stabilization_degree: int | None
    profile: RankProfile
    witness: list[int] | None = field(default=None)


def independence_check(family: OrbitFamily, deg: int, sctx: SeriesContext) -> IndependenceReport:
    """Full column rank of the coefficient rows: the N series of the family are independent."""
    from .lattice import kernel_basis

    rows = family_rows(family, deg, sctx)
    prof = rank_profile(rows)
    ok = prof.d_inf == family.N
    witness = None
    if not ok:
        basis = kernel_basis([list(r.entries) for r in rows])
        witness = basis[0] if basis else None
    return IndependenceReport(ok, family.N, prof.d_inf, prof.stabilization, prof, witness)
