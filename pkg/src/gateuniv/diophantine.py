"""Bounded exhaustive scans for the exponential Diophantine equations behind
the Lie-type dimension condition.

All arithmetic is exact (Python integers / gmpy2). A scan that comes back
with the known solutions only is verification *within its bounds*.
"""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass
from math import isqrt

import gmpy2


class Equation(str, enum.Enum):
    THREE_MINUS = "ThreeMinus"  # d^N = (3^k - 1) / 2
    THREE_PLUS = "ThreePlus"  # d^N = (3^k + 1) / 2
    TWO_ALT = "TwoAlt"  # d^N = (2^k - (-1)^k) / 3


def equation_value(eq: Equation, k: int) -> int:
    if eq is Equation.THREE_MINUS:
        return (3**k - 1) // 2
    if eq is Equation.THREE_PLUS:
        return (3**k + 1) // 2
    return (2**k - (-1) ** k) // 3


@dataclass(frozen=True, order=True)
class DiophSolution:
    equation: Equation
    d: int
    N: int
    k: int

    def holds(self) -> bool:
        return self.d**self.N == equation_value(self.equation, self.k)

    def to_dict(self) -> dict:
        return {"equation": self.equation.value, "d": self.d, "N": self.N, "k": self.k}


@dataclass(frozen=True, order=True)
class RepunitSolution:
    x: int
    y: int
    n: int
    q: int

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True, order=True)
class CohnSolution:
    y: int
    z: int
    k: int

    def to_dict(self) -> dict:
        return asdict(self)


def lie_type_dimension(m: int) -> list:
    """All ``(equation, k)`` with ``m`` equal to that equation's right-hand side."""
    hits = []
    for eq in Equation:
        k = 1
        while True:
            v = equation_value(eq, k)
            if v == m:
                hits.append((eq, k))
            if v > m:
                break
            k += 1
    return hits


def scan_lie_type(d_max: int = 1000, N_max: int = 40, k_max: int = 200) -> list:
    """Every ``(eq, d, N, k)`` with ``2 <= d <= d_max``, ``2 <= N <= N_max``, ``1 <= k <= k_max``."""
    powers: dict = {}
    for d in range(2, d_max + 1):
        v = d
        for N in range(2, N_max + 1):
            v *= d
            powers.setdefault(v, []).append((d, N))
    out = []
    for eq in Equation:
        for k in range(1, k_max + 1):
            for d, N in powers.get(equation_value(eq, k), ()):
                out.append(DiophSolution(eq, d, N, k))
    return sorted(out)


def _perfect_powers(v: int, q_max: int | None) -> list:
    """All ``(y, q)`` with ``y > 1``, ``2 <= q <= q_max`` and ``y^q == v``."""
    if v < 4 or not gmpy2.is_power(v):
        return []
    top = v.bit_length() if q_max is None else min(q_max, v.bit_length())
    out = []
    for q in range(2, top + 1):
        y, exact = gmpy2.iroot(v, q)
        if exact and y > 1:
            out.append((int(y), q))
    return out


def scan_repunit(x_max: int = 10**4, n_max: int = 30, q_max: int | None = None,
                 sign: str = "minus", n_min: int | None = None) -> list:
    """Solutions of ``y^q = (x^n - 1)/(x - 1)`` (``sign="minus"``, ``n >= 3``)
    or ``y^q = (x^n + 1)/(x + 1)`` (``sign="plus"``, odd ``n >= 5``), ``2 <= x <= x_max``."""
    if sign not in ("minus", "plus"):
        raise ValueError(f"sign must be 'minus' or 'plus', got {sign!r}")
    if n_min is None:
        n_min = 3 if sign == "minus" else 5
    out = []
    for x in range(2, x_max + 1):
        for n in range(n_min, n_max + 1):
            if sign == "minus":
                v = (x**n - 1) // (x - 1)
            elif n % 2:
                v = (x**n + 1) // (x + 1)
            else:
                continue
            out.extend(RepunitSolution(x, y, n, q) for y, q in _perfect_powers(v, q_max))
    return sorted(out)


def scan_cohn(y_max: int = 10**6, z_max: int = 10**4, k_max: int = 40) -> list:
    """Solutions of ``y^2 - 2 z^k = -1`` with ``k > 2``, ``1 <= y <= y_max``, ``1 <= z <= z_max``."""
    out = []
    limit = (y_max * y_max + 1) // 2
    for z in range(1, z_max + 1):
        p = z**3
        for k in range(3, k_max + 1):
            if p > limit:
                break
            v = 2 * p - 1
            y = isqrt(v)
            if y * y == v:
                out.append(CohnSolution(y, z, k))
            p *= z
    return sorted(out)
