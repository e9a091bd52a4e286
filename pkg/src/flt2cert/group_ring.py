"""The integer group ring Z[G] of G = Gal(Q(zeta_p)/Q) and its Stickelberger ideal."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .cyclotomic import CycNum, PadicCyc, reduce_padic


class GroupRingElem:
    """sum_c coeffs[c-1] * sigma_c, c = 1..p-1."""

    __slots__ = ("p", "coeffs")

    def __init__(self, p: int, coeffs: Sequence[int]) -> None:
        if len(coeffs) != p - 1:
            raise ValueError(f"expected {p - 1} coefficients, got {len(coeffs)}")
        self.p = p
        self.coeffs = tuple(int(a) for a in coeffs)

    @classmethod
    def zero(cls, p: int) -> GroupRingElem:
        return cls(p, [0] * (p - 1))

    @classmethod
    def sigma(cls, p: int, c: int, n: int = 1) -> GroupRingElem:
        v = [0] * (p - 1)
        v[c % p - 1] = n
        return cls(p, v)

    @classmethod
    def norm_element(cls, p: int) -> GroupRingElem:
        return cls(p, [1] * (p - 1))

    @classmethod
    def from_inverse_coeffs(cls, p: int, n: Sequence[int]) -> GroupRingElem:
        """Build sum_c n[c-1] * sigma_c^{-1}."""
        v = [0] * (p - 1)
        for c, a in enumerate(n, start=1):
            v[pow(c, -1, p) - 1] += a
        return cls(p, v)

    def coeff(self, c: int) -> int:
        return self.coeffs[c % self.p - 1]

    def inverse_coeffs(self) -> tuple[int, ...]:
        """Coefficients n_c of sigma_c^{-1}."""
        p = self.p
        return tuple(self.coeffs[pow(c, -1, p) - 1] for c in range(1, p))

    def __repr__(self) -> str:
        return f"GroupRingElem(p={self.p}, {list(self.coeffs)})"

    def __str__(self) -> str:
        return format_elem(self)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroupRingElem):
            return NotImplemented
        return self.p == other.p and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.p, self.coeffs))

    def __add__(self, o: GroupRingElem) -> GroupRingElem:
        return GroupRingElem(self.p, [a + b for a, b in zip(self.coeffs, o.coeffs)])

    def __sub__(self, o: GroupRingElem) -> GroupRingElem:
        return GroupRingElem(self.p, [a - b for a, b in zip(self.coeffs, o.coeffs)])

    def __neg__(self) -> GroupRingElem:
        return GroupRingElem(self.p, [-a for a in self.coeffs])

    def __mul__(self, o: GroupRingElem | int) -> GroupRingElem:
        if isinstance(o, int):
            return GroupRingElem(self.p, [a * o for a in self.coeffs])
        p = self.p
        out = [0] * (p - 1)
        for a, x in enumerate(self.coeffs, start=1):
            if x:
                for b, y in enumerate(o.coeffs, start=1):
                    if y:
                        out[a * b % p - 1] += x * y
        return GroupRingElem(p, out)

    __rmul__ = __mul__

    def translate(self, d: int) -> GroupRingElem:
        """sigma_d * self."""
        p = self.p
        out = [0] * (p - 1)
        for c, a in enumerate(self.coeffs, start=1):
            out[c * d % p - 1] = a
        return GroupRingElem(p, out)

    def conj(self) -> GroupRingElem:
        return self.translate(self.p - 1)

    def minus_part(self) -> GroupRingElem:
        """(1 - j) * self."""
        return self - self.conj()

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def augmentation(self) -> int:
        return sum(self.coeffs)

    def positive_part(self) -> GroupRingElem:
        return GroupRingElem(self.p, [max(a, 0) for a in self.coeffs])

    def negative_part(self) -> GroupRingElem:
        return GroupRingElem(self.p, [max(-a, 0) for a in self.coeffs])

    def orbit(self) -> list[GroupRingElem]:
        return [self.translate(d) for d in range(1, self.p)]

    def canonical(self) -> tuple[int, ...]:
        """Lexicographically smallest coefficient array in the G-orbit."""
        return min(t.coeffs for t in self.orbit())


def format_elem(theta: GroupRingElem) -> str:
    return ",".join(str(a) for a in theta.coeffs)


_TERM = re.compile(r"^\s*([+-]?\s*\d*)\s*\*?\s*(psi|sigma|s)(\d+)\s*$")


def parse_elem(text: str, p: int) -> GroupRingElem:
    """Parse the comma form ``n_1,...,n_{p-1}`` or a sum such as ``2psi1+psi2``.

    A leading ``(1-j)`` applies the minus projection; ``s<c>``/``sigma<c>`` is sigma_c.
    """
    text = text.strip()
    if "," in text or re.fullmatch(r"-?\d+", text):
        parts = [t for t in text.split(",")]
        return GroupRingElem(p, [int(t) for t in parts])
    minus = False
    if text.startswith("(1-j)"):
        minus = True
        text = text[5:].strip()
        if text.startswith("(") and text.endswith(")"):
            text = text[1:-1]
    acc = GroupRingElem.zero(p)
    for raw in re.split(r"(?=[+-])", text.replace(" ", "")):
        if not raw:
            continue
        m = _TERM.match(raw)
        if not m:
            raise ValueError(f"cannot parse group ring term {raw!r}")
        k = m.group(1).replace(" ", "")
        mult = int(k) if k not in ("", "+", "-") else (-1 if k == "-" else 1)
        idx = int(m.group(3))
        if m.group(2) == "psi":
            acc = acc + fueter(p, idx) * mult
        else:
            acc = acc + GroupRingElem.sigma(p, idx, mult)
    return acc.minus_part() if minus else acc


def stickelberger_scaled(p: int) -> GroupRingElem:
    """p * vartheta = sum_c c * sigma_c^{-1}."""
    return GroupRingElem.from_inverse_coeffs(p, range(1, p))


def _div_exact(x: GroupRingElem, d: int) -> GroupRingElem:
    if any(a % d for a in x.coeffs):
        raise ArithmeticError("group ring element is not divisible")
    return GroupRingElem(x.p, [a // d for a in x.coeffs])


def stickelberger_multiple(xi: GroupRingElem) -> GroupRingElem:
    """xi * vartheta, which must be integral."""
    return _div_exact(xi * stickelberger_scaled(xi.p), xi.p)


def theta_c(p: int, c: int) -> GroupRingElem:
    """(c - sigma_c) vartheta, integral for every c prime to p."""
    xi = GroupRingElem.sigma(p, 1, c) - GroupRingElem.sigma(p, c)
    return stickelberger_multiple(xi)


def fueter(p: int, n: int) -> GroupRingElem:
    """psi_n = (1 + sigma_n - sigma_{n+1}) vartheta for 1 <= n <= (p-1)/2."""
    q = (p - 1) // 2
    if not 1 <= n <= q:
        raise ValueError(f"Fueter index must lie in 1..{q}, got {n}")
    xi = GroupRingElem.sigma(p, 1) + GroupRingElem.sigma(p, n) - GroupRingElem.sigma(p, n + 1)
    return stickelberger_multiple(xi)


def relative_weight(theta: GroupRingElem) -> int:
    p = theta.p
    sums = {c: theta.coeff(c) + theta.coeff(p - c) for c in range(1, p)}
    values = set(sums.values())
    if len(values) != 1:
        first = sums[1]
        bad = sorted(c for c, s in sums.items() if s != first)
        raise ValueError(f"n_c + n_(p-c) is not constant; differs from c=1 at c in {bad}")
    return values.pop()


@dataclass(frozen=True)
class FueterDecomposition:
    """theta = sum_n nu[n-1] psi_n + norm * sum_c sigma_c."""

    nu: tuple[int, ...]
    norm: int = 0

    def rebuild(self, p: int) -> GroupRingElem:
        acc = GroupRingElem.norm_element(p) * self.norm
        for n, a in enumerate(self.nu, start=1):
            if a:
                acc = acc + fueter(p, n) * a
        return acc


class NotInStickelbergerIdeal(ValueError):
    def __init__(self, theta: GroupRingElem, coords: tuple[Fraction, ...] | None) -> None:
        self.theta = theta
        self.coords = coords
        if coords is None:
            msg = "element is not in the rational span of the Stickelberger ideal"
        else:
            msg = f"non-integral coordinates over the Fueter basis: {[str(c) for c in coords]}"
        super().__init__(msg)


def _solve_rational(columns: list[tuple[int, ...]], target: Sequence[int]) -> tuple[Fraction, ...] | None:
    """Solve sum_j x_j columns[j] = target exactly; None if inconsistent."""
    nrow, ncol = len(target), len(columns)
    m = [[Fraction(columns[j][i]) for j in range(ncol)] + [Fraction(target[i])] for i in range(nrow)]
    pivots = []
    r = 0
    for c in range(ncol):
        piv = next((i for i in range(r, nrow) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(nrow):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    if any(m[i][ncol] != 0 for i in range(r, nrow)):
        return None
    x = [Fraction(0)] * ncol
    for i, c in enumerate(pivots):
        x[c] = m[i][ncol]
    return tuple(x)


def stickelberger_basis(p: int) -> list[GroupRingElem]:
    q = (p - 1) // 2
    return [fueter(p, n) for n in range(1, q + 1)] + [GroupRingElem.norm_element(p)]


def stickelberger_member(theta: GroupRingElem) -> FueterDecomposition:
    """Coordinates of theta over psi_1..psi_q and the norm element.

    Raises NotInStickelbergerIdeal with the rational obstruction otherwise.
    """
    p = theta.p
    basis = stickelberger_basis(p)
    x = _solve_rational([b.coeffs for b in basis], theta.coeffs)
    if x is None or any(v.denominator != 1 for v in x):
        raise NotInStickelbergerIdeal(theta, x)
    return FueterDecomposition(tuple(int(v) for v in x[:-1]), int(x[-1]))


@dataclass(frozen=True)
class IdempotentModP:
    p: int
    k: int
    coeffs: tuple[int, ...]

    def as_elem(self) -> GroupRingElem:
        return GroupRingElem(self.p, self.coeffs)


def mul_mod_p(a: GroupRingElem, b: GroupRingElem) -> GroupRingElem:
    prod = a * b
    return GroupRingElem(a.p, [c % a.p for c in prod.coeffs])


def idempotent(p: int, k: int) -> IdempotentModP:
    """e_k = (p-1)^{-1} sum_a varpi^k(a) sigma_a^{-1} mod p, with varpi(a) = a mod p."""
    if not 0 <= k <= p - 2:
        raise ValueError(f"character index must lie in 0..{p - 2}")
    scale = pow(p - 1, -1, p)
    n = [scale * pow(a, k, p) % p for a in range(1, p)]
    return IdempotentModP(p, k, GroupRingElem.from_inverse_coeffs(p, n).coeffs)


def act(theta: GroupRingElem, x: CycNum | PadicCyc, K: int) -> PadicCyc:
    """prod_c sigma_c(x)^{n_c} in Z_p[zeta] / p^K."""
    base = x if isinstance(x, PadicCyc) else reduce_padic(x, K)
    if base.K != K:
        raise ValueError("precision mismatch")
    result = PadicCyc.one(theta.p, K)
    inv = None
    for c, n in enumerate(theta.coeffs, start=1):
        if n > 0:
            result = result * base.galois(c) ** n
        elif n < 0:
            if inv is None:
                if not base.is_unit():
                    raise ZeroDivisionError("negative exponent on a non-unit")
                inv = base.inverse()
            result = result * inv.galois(c) ** (-n)
    return result

