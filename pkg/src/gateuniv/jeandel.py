"""Controlled-involution gate families.

``B_{k,i}`` acts on ``k + 2`` qubits: it applies the two-qubit involution
``A_i`` to qubits 0 and 1 when the ``k`` control qubits ``2..k+1`` are all
0 or all 1, and does nothing otherwise.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb
from typing import NamedTuple, Sequence

import numpy as np

from . import config
from .errors import GateSetError, ResourceError
from .gates import CH, CZ, H, I2, T, X, controlled
from .gateset import GateSet, embed, make_gateset


def default_omega() -> GateSet:
    """CZ, H on either qubit, controlled-H and controlled-(T X T^dagger).

    All five are involutions. The first four are real, so on their own they
    stay inside O(4); the complex controlled reflection is what makes the
    set universal on two qubits.
    """
    v = T @ X @ T.conj().T
    mats = [CZ, np.kron(H, I2), np.kron(I2, H), CH, controlled(v)]
    return make_gateset(2, 2, mats, ["CZ", "H0", "H1", "CH", "CV"])


def as_involution(a: np.ndarray, label: str = "gate", tol: float = 1e-10) -> np.ndarray:
    """Rephase ``a`` so that ``a @ a == I``; reject matrices whose square is not scalar."""
    a = np.asarray(a, dtype=complex)
    sq = a @ a
    lam = sq[0, 0]
    if abs(abs(lam) - 1) > tol or np.linalg.norm(sq - lam * np.eye(len(a))) > tol:
        raise GateSetError(f"{label} is not an involution, even up to phase")
    return a / np.sqrt(lam)


def controlled_on_equal(a: np.ndarray, k: int) -> np.ndarray:
    """``a`` on qubits 0,1 if qubits ``2..k+1`` read all-0 or all-1, else identity."""
    m = 2**k
    proj = np.zeros((m, m))
    proj[0, 0] = proj[-1, -1] = 1
    return np.kron(a, proj) + np.kron(np.eye(len(a)), np.eye(m) - proj)


@dataclass(frozen=True)
class JeandelFamily:
    k: int
    base: tuple  # exact involutions A_i
    labels: tuple
    gates: tuple  # B_{k,i}

    def as_gateset(self) -> GateSet:
        return make_gateset(2, self.k + 2, list(self.gates), [f"B{self.k}[{lab}]" for lab in self.labels])


def build_family(omega: GateSet | Sequence[np.ndarray], k: int,
                 labels: Sequence[str] | None = None) -> JeandelFamily:
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")
    if isinstance(omega, GateSet):
        if (omega.d, omega.n) != (2, 2):
            raise GateSetError(f"omega must be a 2-qubit gate set, got d={omega.d}, n={omega.n}")
        mats, labels = omega.originals(), omega.labels[: omega.n_input]
    else:
        mats = [np.asarray(a, dtype=complex) for a in omega]
        labels = list(labels) if labels is not None else [f"A{i}" for i in range(len(mats))]
        for a, lab in zip(mats, labels):
            if a.shape != (4, 4):
                raise GateSetError(f"{lab} has shape {a.shape}, expected (4, 4)")
    base = [as_involution(a, lab) for a, lab in zip(mats, labels)]
    gates = [controlled_on_equal(a, k) for a in base]
    return JeandelFamily(k, tuple(base), tuple(labels), tuple(gates))


# ---------------------------------------------------------------------------
# parity of the activation counts


class ParityRow(NamedTuple):
    q: int
    binomial: int
    odd: bool


def parity_table(k: int, q_max: int | None = None) -> list:
    """``binom(k + q, k)`` for ``0 <= q <= q_max`` (default ``k - 1``)."""
    q_max = k - 1 if q_max is None else q_max
    return [ParityRow(q, comb(k + q, k), comb(k + q, k) % 2 == 1) for q in range(q_max + 1)]


def parity_lemma_check(j: int, q_max: int | None = None) -> list:
    """Table for ``k = 2^j``; raises if any entry with ``q <= k - 1`` is even."""
    k = 2**j
    q_max = k - 1 if q_max is None else q_max
    if not 0 <= q_max <= k - 1:
        raise ValueError(f"q_max must lie in [0, {k - 1}]")
    rows = parity_table(k, q_max)
    bad = [r for r in rows if not r.odd]
    if bad:
        raise AssertionError(f"even binomials for k={k}: {bad}")
    return rows


# ---------------------------------------------------------------------------
# compilation on 2k+1 qubits and the invariant subspace on 2k-2 qubits


class CompileCheck(NamedTuple):
    label: str
    passed: bool
    residual: float


def compile_and_verify(fam: JeandelFamily, N: int | None = None, tol: float = 1e-8,
                       dense_threshold: int | None = None) -> list:
    """Apply ``B`` once per k-subset of qubits ``2..N-1`` and compare with ``A`` on qubits 0,1.

    Subsets are taken in lexicographic order.
    """
    k = fam.k
    N = 2 * k + 1 if N is None else N
    threshold = config.dense_threshold() if dense_threshold is None else dense_threshold
    if 2**N > threshold:
        raise ResourceError(f"compilation check needs dimension 2^{N} > {threshold}")
    out = []
    for a, b, lab in zip(fam.base, fam.gates, fam.labels):
        prod = np.eye(2**N, dtype=complex)
        for ctrl in itertools.combinations(range(2, N), k):
            prod = embed(b, (0, 1) + ctrl, N, 2).apply(prod)
        target = embed(a, (0, 1), N, 2).to_dense()
        res = float(np.linalg.norm(prod - target))
        out.append(CompileCheck(lab, res <= tol, res))
    return out


def balanced_subspace(N: int, k: int) -> np.ndarray:
    """Orthonormal basis (columns) of the span of N-bit strings with at most k-1 zeros and k-1 ones."""
    idx = [x for x in range(2**N) if N - (k - 1) <= bin(x).count("1") <= k - 1]
    basis = np.zeros((2**N, len(idx)))
    basis[idx, np.arange(len(idx))] = 1
    return basis


def invariance_witness(fam: JeandelFamily, N: int | None = None, tol: float = 1e-10,
                       dense_threshold: int | None = None) -> bool:
    """Check every placement of every ``B`` fixes the balanced subspace pointwise.

    No k qubits of such a basis state agree, so no control condition fires;
    a ``True`` result certifies non-universality on ``N`` qubits.
    """
    k = fam.k
    N = 2 * k - 2 if N is None else N
    if not k + 2 <= N <= 2 * k - 2:
        raise ValueError(f"need k + 2 <= N <= 2k - 2, got k={k}, N={N}")
    threshold = config.dense_threshold() if dense_threshold is None else dense_threshold
    if 2**N > threshold:
        raise ResourceError(f"witness check needs dimension 2^{N} > {threshold}")
    basis = balanced_subspace(N, k)
    for b in fam.gates:
        for targets in itertools.permutations(range(N), 2):
            rest = [q for q in range(N) if q not in targets]
            for ctrl in itertools.permutations(rest, k):
                moved = embed(b, targets + ctrl, N, 2).apply(basis)
                if np.linalg.norm(moved - basis) > tol:
                    return False
    return True
