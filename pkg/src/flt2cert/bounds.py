"""Exact integer verification of the counting estimate and the magnitude chain for a prime p.

Every step is an integer comparison ``lhs REL rhs`` between small arithmetic
expressions over named integers. Expressions and their data are stored so
that any verdict can be re-evaluated later without trusting this module.
"""

from __future__ import annotations

import ast
import operator
import random
from dataclasses import dataclass, field
from math import comb

RELATIONS = {
    ">": operator.gt,
    ">=": operator.ge,
    "<": operator.lt,
    "<=": operator.le,
    "==": operator.eq,
}

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Pow: operator.pow,
    ast.FloorDiv: operator.floordiv,
}

MAX_EXPONENT = 1 << 22


def evaluate(expr: str, data: dict[str, int]) -> int:
    """Integer value of ``expr`` built from +, -, *, //, ** over literals and names in ``data``."""

    def ev(node: ast.AST) -> int:
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return node.value
        if isinstance(node, ast.Name):
            if node.id not in data:
                raise KeyError(f"unknown name {node.id!r}")
            return int(data[node.id])
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -ev(node.operand)
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            a, b = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Pow) and not 0 <= b <= MAX_EXPONENT:
                raise ValueError(f"exponent {b} out of range")
            return _BINOPS[type(node.op)](a, b)
        raise ValueError(f"unsupported expression element {ast.dump(node)}")

    return ev(ast.parse(expr, mode="eval"))


@dataclass
class Step:
    name: str
    lhs: str
    rhs: str
    relation: str
    data: dict[str, int]
    mandatory: bool = True
    note: str = ""
    verdict: bool = field(init=False)

    def __post_init__(self) -> None:
        self.verdict = self.check()

    def check(self) -> bool:
        return RELATIONS[self.relation](evaluate(self.lhs, self.data), evaluate(self.rhs, self.data))

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "relation": self.relation,
            "verdict": "pass" if self.verdict else "fail",
            "mandatory": self.mandatory,
            "data": {k: str(v) for k, v in self.data.items()},
            "note": self.note,
        }


def counting_numbers(p: int) -> tuple[int, int, int]:
    """(q, N, N') with N = C(3q-1, q-1) the size of the weight p-1 Fueter sums and N' = ceil(N/(p-1))."""
    q = (p - 1) // 2
    N = comb(3 * q - 1, q - 1)
    return q, N, -(-N // (p - 1))


def verify_counting(p: int) -> list[Step]:
    if p < 5:
        raise ValueError("counting estimate needs p >= 5")
    q, N, _ = counting_numbers(p)
    base = {"p": p, "q": q, "N": N, "C3q": comb(3 * q, q)}
    return [
        Step("identity", "3*N", "C3q", "==", base, note="C(3q-1,q-1) = C(3q,q)/3"),
        Step("stirling", "(N*9*4**q)**2*q", "27**(2*q)", ">", base,
             note="C(3q-1,q-1) > (27/4)^q / (9 sqrt q), squared"),
        Step("end_to_end", "2**(p-1)*N", "(p-1)*5**(p-1)", ">", base,
             note="C(3q-1,q-1) > (p-1) (5/2)^(p-1)"),
        Step("stirling_to_target", "(27**q*2**(p-1))**2", "81*q*(4**q*(p-1)*5**(p-1))**2", ">", base,
             mandatory=False, note="(27/4)^q / (9 sqrt q) > (p-1) (5/2)^(p-1), squared; intermediate only"),
    ]


def _entry_bound_witness(p: int, q: int, N: int) -> int:
    """Least k with 3^k 2^q > 2^k N^(q+1) p^2 (2p+1)^2."""
    X = N ** (q + 1) * p * p * (2 * p + 1) ** 2

    def ok(k: int) -> bool:
        return 3**k * 2**q > 2**k * X

    hi = 1
    while not ok(hi):
        hi *= 2
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def theorem_triples(p: int, seed: int, count: int = 24) -> list[tuple[int, int]]:
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        x, y = rng.randrange(-10**6, 10**6), rng.randrange(-10**6, 10**6)
        if x + y != 0:
            out.append((x, y))
    return out


def verify_chain(p: int, seed: int = 0) -> list[Step]:
    q, N, Np = counting_numbers(p)
    mp, np_ = Np // 2, Np // p
    m, n = (p - 1) * mp, (p - 1) * np_
    k = _entry_bound_witness(p, q, N)
    d = {"p": p, "q": q, "N": N, "N1": Np, "m": m, "n": n, "k": k}
    steps = [
        Step("entry_bound", "3**k*2**q", "2**k*N**(q+1)*p**2*(2*p+1)**2", ">", d,
             note="witness k for (3/2)^(N+2) > N^(q+1) p^2 (2p+1)^2 / 2^q; see entry_bound_range"),
        Step("entry_bound_range", "k", "N+2", "<=", d,
             note="(3/2)^x increases, so the witness inequality lifts to x = N+2"),
        Step("siegel_exponent", "2*(m-n+1)", "N", "<",
             d, note="constrained rows below N/2, so the box bound stays below N*M = p^N/(2p+1)^2 = L"),
        Step("H_bound", "(m-n)*(2*p-3)", "N", ">=", d,
             note="H < L (p-1) < p^N <= p^((m-n) v_p(T)) with v_p(T) = 2p-3"),
        Step("delta_lower", "(2*p-3)*(p*N-2*N)", "2*p*(p-4)*N", ">", d,
             note="(2p-3)(N/2 - N/p) > (p-4) N, scaled by 2p"),
        Step("delta_upper", "N", "N", "==", d, note="|delta| <= L N s^(2(p-1)) holds by construction"),
        Step("s_exponent_strict", "(2*p+1)**2", "N", ">", d, mandatory=False,
             note="dropping L N from (p^(N(p-4))/(L N))^(1/(2(p-1))) needs (2p+1)^2 > N"),
        Step("s_exponent", "(N*(p-5)-bN)*2**(p-1)",
             "2*(p-1)*5**(p-1)", ">", {**d, "bN": N.bit_length()},
             note="(N(p-5) - log_p N)/(2(p-1)) > (5/2)^(p-1), with log_p N <= bitlen(N)"),
        Step("final", "N*(q-2)*2**(p-1)", "2*q*5**(p-1)", ">", d, note="N/2 - N/q > (5/2)^(p-1)"),
        Step("orbit_count", "N1*2**(p-1)", "5**(p-1)", ">", d, note="N' > (5/2)^(p-1)"),
    ]
    steps.append(_theorem_step(p, seed))
    return steps


def _theorem_step(p: int, seed: int) -> Step:
    """|x^p + y^p| / |x + y| <= max(|x|^p, |y|^p, |x^p + y^p|) on seeded integer pairs."""
    worst_gap = None
    for x, y in theorem_triples(p, seed):
        s_p = abs(x**p + y**p)
        top = max(abs(x) ** p, abs(y) ** p, s_p)
        # |s^p| * |x+y| = |x^p + y^p|; compare |s^p| <= top via cross-multiplication
        gap = top * abs(x + y) - s_p
        if worst_gap is None or gap < worst_gap[0]:
            worst_gap = (gap, x, y)
    _, x, y = worst_gap
    data = {"p": p, "x": x, "y": y, "a": abs(x + y), "z": abs(x**p + y**p)}
    top = max(abs(x) ** p, abs(y) ** p, data["z"])
    data["t"] = top
    return Step("theorem", "t*a", "z", ">=", data, note="tightest of the seeded pairs for |s^p| <= max(|x|,|y|,|z|)^p")


@dataclass
class BoundCertificate:
    p: int
    q: int
    N_lower: int
    N_prime_lower: int
    counting: list[Step]
    chain: list[Step]

    @property
    def overall(self) -> bool:
        return all(s.verdict for s in self.counting + self.chain if s.mandatory)


def certify_bounds(p: int, seed: int = 0) -> BoundCertificate:
    q, N, Np = counting_numbers(p)
    return BoundCertificate(p, q, N, Np, verify_counting(p), verify_chain(p, seed))
