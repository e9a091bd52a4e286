"""Assemble a delta combination of binomial series that vanishes to a prescribed order."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Iterator

from .cyclotomic import CycNum
from .group_ring import GroupRingElem, fueter
from .lattice import SmallSolution, _candidates, _inf, kernel_basis, mat_vec, siegel_solve, within_siegel_bound
from .linalg import Echelon, OrbitFamily, RankProfile, RowVector, family_rows, rank_profile
from .series import SeriesContext, f_theta, guaranteed_exponent, synthetic_pair

CONVENTION = "both thresholds over the jump set; lower n, upper m-n; twist at the upper index"


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Nonnegative compositions, lexicographically decreasing in (c_1, ..., c_parts)."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def is_free(theta: GroupRingElem) -> bool:
    return len(set(theta.orbit())) == theta.p - 1


@dataclass
class JReport:
    p: int
    w: int
    j0_size: int
    j0_formula: int
    orbit_reps: list[GroupRingElem]
    dropped: list[GroupRingElem]
    j_size: int
    truncated: bool
    family: OrbitFamily


def build_J(p: int, w: int, cap: int | None = None) -> JReport:
    """Weight-w sums of Fueter elements, their G-orbits, and the family of free minus parts.

    Orbits whose minus part has a nontrivial stabilizer cannot contribute p-1
    independent series and are reported in ``dropped``.
    """
    if w < 1:
        raise ValueError("weight budget must be positive")
    q = (p - 1) // 2
    psis = [fueter(p, j) for j in range(1, q + 1)]
    seen: set[tuple[int, ...]] = set()
    reps, dropped, j0 = [], [], 0
    j_size = 0
    truncated = False
    for combo in _compositions(w, q):
        j0 += 1
        theta = GroupRingElem.zero(p)
        for c, psi in zip(combo, psis):
            if c:
                theta = theta + psi * c
        key = theta.canonical()
        if key in seen:
            continue
        seen.add(key)
        j_size += len(set(theta.orbit()))
        minus = theta.minus_part()
        if minus.is_zero() or not is_free(minus):
            dropped.append(theta)
            continue
        if cap is not None and len(reps) >= cap:
            truncated = True
            continue
        reps.append(theta)
    if not reps:
        raise ValueError(f"no free orbit of weight {w} at p={p}")
    family = OrbitFamily([t.minus_part() for t in reps])
    return JReport(p, w, j0, comb(w + q - 1, q - 1), reps, dropped, j_size, truncated, family)


@dataclass
class ConstructionParams:
    w: int
    N_prime: int
    N: int
    m_prime: int
    n_prime: int
    m: int
    n: int
    deg: int
    R_lo: int | None = None
    R_hi: int | None = None
    convention: str = CONVENTION

    @classmethod
    def for_family(cls, family: OrbitFamily, w: int, deg: int) -> ConstructionParams:
        p, Np = family.p, family.N_prime
        mp, np_ = Np // 2, Np // p
        return cls(w, Np, family.N, mp, np_, (p - 1) * mp, (p - 1) * np_, deg)


class InsufficientDegree(ValueError):
    pass


def _next_jump(S: tuple[int, ...], at_least: int) -> int | None:
    return next((s for s in S if s >= at_least), None)


def resolve_jumps(profile: RankProfile, params: ConstructionParams) -> tuple[int, int]:
    if len(profile.d) <= params.m:
        raise InsufficientDegree(f"profile has {len(profile.d)} rows, need more than m={params.m}")
    lo = _next_jump(profile.S, params.n)
    hi = _next_jump(profile.S, params.m - params.n)
    if lo is None or hi is None:
        raise InsufficientDegree("no jump at or beyond the threshold within the computed degree")
    params.R_lo, params.R_hi = lo, hi
    return lo, hi


@dataclass(frozen=True)
class TwistChoice:
    rep_index: int
    psi: GroupRingElem
    j: int
    phi: tuple[int, ...]


def twist_candidates(rows: list[RowVector], profile: RankProfile, R_hi: int, family: OrbitFamily) -> Iterator[TwistChoice]:
    """Single-block unit rows outside the span of the rows up to R_hi, in scan order."""
    b = family.orbit_size
    width = family.N
    ech = Echelon(width)
    for s in profile.S:
        if s > R_hi:
            break
        ech.add(rows[s].entries)
    if ech.rank >= width:
        return
    for i, rep in enumerate(family.reps):
        for j in range(1, b + 1):
            phi = [0] * width
            phi[i * b + j - 1] = 1
            if not ech.contains(phi):
                yield TwistChoice(i, rep, j, tuple(phi))


def choose_twist(rows: list[RowVector], profile: RankProfile, R_hi: int, family: OrbitFamily) -> TwistChoice:
    first = next(twist_candidates(rows, profile, R_hi, family), None)
    if first is None:
        raise ValueError("rows up to R_hi already span the whole space")
    return first


def ell_from_block(block: tuple[int, ...] | list[int], p: int) -> CycNum:
    """sum_c w_c (zeta^c - 1); satisfies Tr(ell * conj(a)) = p * (w . kappa(a))."""
    s = sum(block)
    return CycNum.from_coeffs(p, [a for a in block]) - s


def trace_pairing(ells: list[CycNum], series_coeffs: list[CycNum]) -> int:
    acc = Fraction(0)
    for ell, a in zip(ells, series_coeffs):
        acc += (ell * a.conj()).trace()
    if acc.denominator != 1:
        raise ArithmeticError("trace pairing is not integral")
    return acc.numerator


def delta_series(reps: list[GroupRingElem], ells: list[CycNum], deg: int, sctx: SeriesContext) -> list[int]:
    """Coefficients of sum_theta Tr(ell(theta) conj f[theta](T)) through ``deg``."""
    series = [f_theta(r, deg, sctx) for r in reps]
    return [trace_pairing(ells, [s.coeffs[n] for s in series]) for n in range(deg + 1)]


@dataclass
class DeltaCertificate:
    p: int
    w: int
    params: ConstructionParams
    twist: TwistChoice
    solution: SmallSolution
    ell: list[CycNum]
    H: int
    vanish_order: int | None
    leading_exponent: int
    delta: list[int]
    reps: list[GroupRingElem]
    checks: dict[str, bool] = field(default_factory=dict)
    retries: int = 0
    dbar: int = 0
    timings: dict[str, int] = field(default_factory=dict)
    matrix: list[list[int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def as_dict(self) -> dict:
        pr = self.params
        return {
            "p": str(self.p),
            "w": str(self.w),
            "params": {
                "N": str(pr.N), "N_prime": str(pr.N_prime), "m_prime": str(pr.m_prime),
                "n_prime": str(pr.n_prime), "m": str(pr.m), "n": str(pr.n), "deg": str(pr.deg),
                "R_lo": str(pr.R_lo), "R_hi": str(pr.R_hi), "dbar": str(self.dbar),
                "convention": pr.convention,
            },
            "twist": {"psi": ",".join(map(str, self.twist.psi.coeffs)), "j": str(self.twist.j)},
            "ell": {
                ",".join(map(str, rep.coeffs)): [str(c) for c in ell.coeffs]
                for rep, ell in zip(self.reps, self.ell)
            },
            "H": str(self.H),
            "vanish_order": str(self.vanish_order),
            "leading_exponent": str(self.leading_exponent),
            "solution": {"w": [str(a) for a in self.solution.w], "inf_norm": str(self.solution.inf_norm),
                         "bound": str(self.solution.certified_bound)},
            "checks": {k: bool(v) for k, v in self.checks.items()},
            "retries": str(self.retries),
            "timings": {k: str(v) for k, v in self.timings.items()},
        }


def _solve_with_twist(base: list[list[int]], row: RowVector, twist: TwistChoice, b: int, alternatives: bool):
    A = base + [[a + f for a, f in zip(row.entries, twist.phi)]]
    col = twist.rep_index * b + twist.j - 1
    if not alternatives:
        sol = siegel_solve(A)
        return A, (sol if sol.w[col] != 0 else None)
    n = len(A[0])
    M = max(abs(a) for r in A for a in r)
    for v in sorted(_candidates(kernel_basis(A, n)), key=_inf):
        if v[col] != 0:
            sol = SmallSolution(tuple(v), _inf(v), len(A), n, M, "kernel-candidate")
            return A, sol
    return A, None


def construct_delta(p: int, w: int, deg: int, seed: int = 0, cap: int | None = None) -> DeltaCertificate:
    t0 = time.perf_counter()
    sctx = SeriesContext.build(p)
    jrep = build_J(p, w, cap)
    family = jrep.family
    rows = family_rows(family, deg, sctx)
    profile = rank_profile(rows)
    params = ConstructionParams.for_family(family, w, deg)
    _, R_hi = resolve_jumps(profile, params)
    t1 = time.perf_counter()

    b = family.orbit_size
    base = [list(rows[s].entries) for s in profile.S if s < R_hi]
    chosen = None
    retries = 0
    for alternatives in (False, True):
        for twist in twist_candidates(rows, profile, R_hi, family):
            A, sol = _solve_with_twist(base, rows[R_hi], twist, b, alternatives)
            if sol is not None:
                chosen = (A, twist, sol)
                break
            retries += 1
        if chosen:
            break
    if chosen is None:
        raise RuntimeError("every twist and kernel candidate gives H = 0")
    A, twist, sol = chosen
    t2 = time.perf_counter()

    ells = [ell_from_block(sol.w[i * b : (i + 1) * b], p) for i in range(family.N_prime)]
    H = -(CycNum.zeta(p, -twist.j) * ells[twist.rep_index]).trace()
    H = int(H)
    k_hi = guaranteed_exponent(R_hi, p)
    # primary path: through the rows and the solution vector
    delta = [p ** guaranteed_exponent(n, p) * p * sum(a * x for a, x in zip(rows[n].entries, sol.w)) for n in range(deg + 1)]
    vanish = next((n for n, d in enumerate(delta) if d), None)

    checks = {
        "kernel": not any(mat_vec(A, sol.w)),
        "siegel_bound": within_siegel_bound(sol.inf_norm, sol.base, sol.rows, sol.cols - sol.rows),
        "H_nonzero": H != 0,
        "vanish_order_at_R_hi": vanish == R_hi,
        "leading_equals_H": vanish is not None and delta[vanish] == p**k_hi * H,
    }
    # independent path: raw series of every representative, no use of rows or A
    raw = delta_series(family.reps, ells, deg, sctx)
    checks["reverify"] = raw == delta
    checks["orthogonality"] = all(raw[s] == 0 for s in profile.S if s < R_hi)
    d = 1 + (seed % (p - 2))
    shifted = delta_series([r.translate(d) for r in family.reps], [e.galois(d) for e in ells], deg, sctx)
    checks["covariance"] = shifted == raw
    checks["leading_unit"] = _unit_check(raw, vanish, p, seed)
    t3 = time.perf_counter()

    cert = DeltaCertificate(
        p, w, params, twist, sol, ells, H, vanish, k_hi, raw, list(family.reps), checks, retries, len(A),
        {"rows_ms": int((t1 - t0) * 1000), "solve_ms": int((t2 - t1) * 1000), "verify_ms": int((t3 - t2) * 1000)},
        A,
    )
    return cert


def _vp(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _unit_check(delta: list[int], vanish: int | None, p: int, seed: int) -> bool:
    """delta / (T^R delta_R) is 1 + (terms of positive p-valuation) at a synthetic T."""
    if vanish is None:
        return False
    x, y = synthetic_pair(p, 2 * p - 1, random.Random(seed))
    vt = _vp(x + y, p) - 2
    lead = _vp(delta[vanish], p)
    return all(_vp(c, p) - lead + i * vt > 0 for i, c in enumerate(delta[vanish + 1 :], start=1) if c)


@dataclass
class EntryBoundReport:
    applicable: bool
    entries_ok: bool | None = None
    chain_ok: bool | None = None
    witness: tuple[int, int] | None = None


def entry_bound_report(A: list[list[int]], N: int, p: int, w: int) -> EntryBoundReport:
    """Entries against (N/2)^q (2p/3)^(N+2), and that bound against p^N / ((2p+1)^2 N)."""
    if w != p - 1:
        return EntryBoundReport(False)
    q = (p - 1) // 2
    # (N/2)^q (2p/3)^(N+2) = N^q p^(N+2) 2^(N+2-q) / 3^(N+2)
    top = N**q * p ** (N + 2) * 2 ** (N + 2 - q)
    den = 3 ** (N + 2)
    witness = None
    for i, row in enumerate(A):
        for j, a in enumerate(row):
            if abs(a) * den > top:
                witness = (i, j)
                break
        if witness:
            break
    chain = top * (2 * p + 1) ** 2 * N < p**N * den
    return EntryBoundReport(True, witness is None, chain, witness)
