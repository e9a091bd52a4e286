"""Integer kernels and certified small solutions of underdetermined homogeneous systems."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from sympy.polys.domains import ZZ
from sympy.polys.matrices import DomainMatrix

ENUM_MAX_COLS = 12

Matrix = Sequence[Sequence[int]]


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def _shape(A: Matrix, ncols: int | None) -> tuple[int, int]:
    rows = len(A)
    if rows:
        n = len(A[0])
        if any(len(r) != n for r in A):
            raise ValueError("ragged matrix")
        if ncols is not None and ncols != n:
            raise ValueError("column count mismatch")
        return rows, n
    if ncols is None:
        raise ValueError("empty matrix needs an explicit column count")
    return 0, ncols


def mat_vec(A: Matrix, w: Sequence[int]) -> list[int]:
    return [sum(a * x for a, x in zip(row, w)) for row in A]


def _primitive(v: list[int]) -> list[int]:
    g = 0
    for a in v:
        g = math.gcd(g, a)
    if g > 1:
        v = [a // g for a in v]
    first = next((a for a in v if a), 0)
    return [-a for a in v] if first < 0 else v


def kernel_basis(A: Matrix, ncols: int | None = None, reduce: bool = True) -> list[list[int]]:
    """Z-basis of {w in Z^N : A w = 0} via unimodular column operations.

    The result spans the full (saturated) kernel lattice; with ``reduce`` it is
    LLL-reduced before being returned.
    """
    m, n = _shape(A, ncols)
    cols = [[int(A[i][j]) for i in range(m)] for j in range(n)]
    U = [[int(i == j) for i in range(n)] for j in range(n)]
    r = 0
    for i in range(m):
        if r == n:
            break
        for j in range(r + 1, n):
            b = cols[j][i]
            if not b:
                continue
            a = cols[r][i]
            g, s, t = _egcd(a, b)
            ag, bg = a // g, b // g
            for vecs in (cols, U):
                x, y = vecs[r], vecs[j]
                vecs[r] = [s * u + t * v for u, v in zip(x, y)]
                vecs[j] = [ag * v - bg * u for u, v in zip(x, y)]
        if cols[r][i]:
            r += 1
    basis = [U[j] for j in range(r, n)]
    if reduce and len(basis) > 1:
        basis = lll(basis)
    return [_primitive(b) if reduce else b for b in basis]


def lll(basis: list[list[int]]) -> list[list[int]]:
    dm = DomainMatrix([[ZZ(int(a)) for a in row] for row in basis], (len(basis), len(basis[0])), ZZ)
    red = dm.lll()
    return [[int(a) for a in row] for row in red.to_list()]


@dataclass(frozen=True)
class SmallSolution:
    """w with A w = 0 and |w|_inf^(N - rows) <= (N M)^rows."""

    w: tuple[int, ...]
    inf_norm: int
    rows: int
    cols: int
    max_entry: int
    method: str = "lll"

    @property
    def base(self) -> int:
        # M is floored at 1 so that the zero matrix still admits its unit vectors
        return self.cols * max(self.max_entry, 1)

    @property
    def certified_bound(self) -> int:
        """floor((N M)^(rows / (N - rows)))."""
        return bound_floor(self.base, self.rows, self.cols - self.rows)

    def within_bound(self) -> bool:
        return within_siegel_bound(self.inf_norm, self.base, self.rows, self.cols - self.rows)


def within_siegel_bound(x: int, base: int, num: int, den: int) -> bool:
    return x**den <= base**num


def bound_floor(base: int, num: int, den: int) -> int:
    """Largest integer b with b^den <= base^num."""
    target = base**num
    lo, hi = 0, 1
    while hi**den <= target:
        hi *= 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if mid**den <= target:
            lo = mid
        else:
            hi = mid
    return lo


class SiegelFailure(RuntimeError):
    pass


def _inf(v: Sequence[int]) -> int:
    return max(abs(a) for a in v)


def _candidates(basis: list[list[int]]) -> list[list[int]]:
    out = list(basis)
    k = len(basis)
    for i in range(k):
        for j in range(i + 1, k):
            out.append([a + b for a, b in zip(basis[i], basis[j])])
            out.append([a - b for a, b in zip(basis[i], basis[j])])
    return [v for v in out if any(v)]


def _gram_schmidt(basis: list[list[int]]) -> tuple[list[list[Fraction]], list[Fraction]]:
    k = len(basis)
    mu = [[Fraction(0)] * k for _ in range(k)]
    star: list[list[Fraction]] = []
    norms: list[Fraction] = []
    for i, b in enumerate(basis):
        v = [Fraction(a) for a in b]
        for j in range(i):
            mu[i][j] = sum(Fraction(a) * s for a, s in zip(b, star[j])) / norms[j]
            v = [x - mu[i][j] * s for x, s in zip(v, star[j])]
        star.append(v)
        norms.append(sum(x * x for x in v))
    return mu, norms


def shortest_inf(basis: list[list[int]], radius: int) -> list[int] | None:
    """Nonzero lattice vector of least max-norm among those with max-norm <= radius.

    Enumerates every lattice vector with squared length <= N radius^2 (which
    contains the max-norm box), so the answer is exact.
    """
    if not basis:
        return None
    n = len(basis[0])
    k = len(basis)
    mu, norms = _gram_schmidt(basis)
    bound = Fraction(n * radius * radius)
    best: list[list[int] | None] = [None]
    best_norm = [radius + 1]
    coeffs = [0] * k

    def rec(level: int, partial: Fraction) -> None:
        # center of coefficient at this level given deeper choices
        c = -sum(coeffs[j] * mu[j][level] for j in range(level + 1, k))
        rem = bound - partial
        if rem < 0:
            return
        width = math.isqrt(int(rem / norms[level]) + 1) + 1
        lo, hi = math.floor(c) - width, math.ceil(c) + width
        for x in range(lo, hi + 1):
            d = (x - c) ** 2 * norms[level]
            if partial + d > bound:
                continue
            coeffs[level] = x
            if level == 0:
                if any(coeffs):
                    v = [sum(coeffs[i] * basis[i][t] for i in range(k)) for t in range(n)]
                    nv = _inf(v)
                    if nv < best_norm[0]:
                        best_norm[0], best[0] = nv, v
            else:
                rec(level - 1, partial + d)
        coeffs[level] = 0

    rec(k - 1, Fraction(0))
    return best[0]


def siegel_solve(A: Matrix, ncols: int | None = None) -> SmallSolution:
    """Certified small nonzero integer solution of A w = 0."""
    m, n = _shape(A, ncols)
    if m >= n:
        raise ValueError(f"need fewer rows than columns, got {m} x {n}")
    M = max((abs(int(a)) for row in A for a in row), default=0)
    if M == 0:
        w = tuple([1] + [0] * (n - 1))
        return SmallSolution(w, 1, m, n, 0, "trivial")
    basis = kernel_basis(A, n)
    best = min(_candidates(basis), key=_inf)
    sol = SmallSolution(tuple(best), _inf(best), m, n, M, "lll")
    if not sol.within_bound() and n <= ENUM_MAX_COLS:
        v = shortest_inf(basis, sol.certified_bound)
        if v is not None:
            sol = SmallSolution(tuple(_primitive(v)), _inf(v), m, n, M, "enumeration")
    if any(mat_vec(A, sol.w)):
        raise SiegelFailure("returned vector is not in the kernel")
    if not sol.within_bound():
        raise SiegelFailure(f"no solution within the box bound found (best max-norm {sol.inf_norm})")
    return sol


def l1_bound_check(A: Matrix, w: Sequence[int]) -> bool:
    """max |w_i| < N M, the coarse bound used for the size of delta."""
    n = len(w)
    M = max((abs(int(a)) for row in A for a in row), default=0)
    if M == 0:
        return _inf(w) <= 1
    return _inf(w) < n * M
