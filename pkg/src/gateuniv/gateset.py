"""Gate sets, register embeddings and the generator family of Gamma^N."""

from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import config
from .errors import GateSetError, ResourceError
from .tensor import QuditPermutation, TensorWordOperator, unitarity_defect

MAX_ORBIT_MEMBERS = 20000


@dataclass(frozen=True)
class GateSet:
    """Inverse-closed set of ``n``-qudit gates normalized to determinant 1.

    ``phases[i]`` is the scalar the i-th user-supplied matrix was
    multiplied by, so ``gates[i] / phases[i]`` recovers it. The first
    ``n_input`` gates came from the user; the rest are appended adjoints.
    """

    d: int
    n: int
    gates: tuple
    labels: tuple
    phases: tuple
    n_input: int

    @property
    def dim(self) -> int:
        return self.d**self.n

    def originals(self) -> list:
        return [g / p for g, p in zip(self.gates[: self.n_input], self.phases)]

    def __len__(self) -> int:
        return len(self.gates)

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "n": self.n,
            "gates": [
                {"label": lab, "matrix": encode_matrix(m)}
                for lab, m in zip(self.labels, self.originals())
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def encode_matrix(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, dtype=complex)]


def decode_matrix(rows) -> np.ndarray:
    try:
        arr = np.array(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise GateSetError(f"matrix is not a nested list of [re, im] pairs: {exc}") from exc
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise GateSetError(f"matrix entries must be [re, im] pairs, got array of shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def make_gateset(d: int, n: int, matrices: Sequence, labels: Sequence[str] | None = None,
                 tol: float = config.UNITARY_TOL) -> GateSet:
    """Validate, normalize into SU(d^n) and close under inverses."""
    if d < 2 or n < 1:
        raise GateSetError(f"need d >= 2 and n >= 1, got d={d}, n={n}")
    if not matrices:
        raise GateSetError("gate set is empty")
    m = d**n
    labels = list(labels) if labels is not None else [f"g{i}" for i in range(len(matrices))]
    if len(labels) != len(matrices):
        raise GateSetError("labels and matrices differ in length")
    gates, phases = [], []
    for lab, a in zip(labels, matrices):
        a = np.asarray(a, dtype=complex)
        if a.shape != (m, m):
            raise GateSetError(f"gate {lab!r} has shape {a.shape}, expected ({m}, {m}) for d={d}, n={n}")
        defect = unitarity_defect(a)
        if defect > tol:
            raise GateSetError(f"gate {lab!r} is not unitary: defect {defect:.3g} > {tol:.3g}")
        det = np.linalg.det(a)
        if abs(abs(det) - 1) > config.DET_TOL:
            raise GateSetError(f"gate {lab!r} has |det| = {abs(det):.12g}")
        c = np.exp(-1j * np.angle(det) / m)
        gates.append(c * a)
        phases.append(complex(c))
    closed = list(gates)
    all_labels = list(labels)
    for g, lab in zip(gates, labels):
        adj = g.conj().T
        if not any(np.linalg.norm(h - adj) <= tol for h in closed):
            closed.append(adj)
            all_labels.append(f"{lab}^dagger")
    return GateSet(d, n, tuple(closed), tuple(all_labels), tuple(phases), len(gates))


def load_gateset(text: str | bytes) -> GateSet:
    """Parse the JSON interchange format ``{"d", "n", "gates": [{"label", "matrix"}]}``."""
    try:
        obj = json.loads(text)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise GateSetError(f"not valid JSON: {exc}") from exc
    if not isinstance(obj, dict) or not {"d", "n", "gates"} <= obj.keys():
        raise GateSetError('expected an object with keys "d", "n", "gates"')
    d, n = obj["d"], obj["n"]
    if not isinstance(d, int) or not isinstance(n, int):
        raise GateSetError('"d" and "n" must be integers')
    if not isinstance(obj["gates"], list):
        raise GateSetError('"gates" must be a list')
    labels, mats = [], []
    for i, entry in enumerate(obj["gates"]):
        if not isinstance(entry, dict) or "matrix" not in entry:
            raise GateSetError(f"gate #{i} lacks a matrix")
        labels.append(str(entry.get("label", f"g{i}")))
        mats.append(decode_matrix(entry["matrix"]))
    return make_gateset(d, n, mats, labels)


# ---------------------------------------------------------------------------
# embeddings


def _infer_d(m: int, r: int) -> int:
    d = int(round(m ** (1.0 / r)))
    for cand in (d - 1, d, d + 1):
        if cand >= 2 and cand**r == m:
            return cand
    raise ValueError(f"dimension {m} is not a perfect {r}-th power")


def embed(g: np.ndarray, targets: Sequence[int], N: int, d: int | None = None) -> TensorWordOperator:
    """Operator applying ``g`` to qudits ``targets`` (in that order) of an ``N``-qudit register."""
    g = np.asarray(g)
    targets = tuple(int(t) for t in targets)
    if len(set(targets)) != len(targets):
        raise ValueError(f"duplicate targets {targets}")
    if any(t < 0 or t >= N for t in targets):
        raise ValueError(f"targets {targets} out of range for N={N}")
    if d is None:
        d = _infer_d(g.shape[0], len(targets))
    if g.shape != (d ** len(targets),) * 2:
        raise ValueError(f"gate of shape {g.shape} does not act on {len(targets)} qudits of dimension {d}")
    return TensorWordOperator.gate(g, targets, d, N)


class FamilyMode(str, enum.Enum):
    SWAP_FORM = "swap"
    FULL_ORBIT = "full"


@dataclass(frozen=True)
class GeneratorFamily:
    N: int
    base: GateSet
    members: tuple
    labels: tuple
    mode: FamilyMode

    @property
    def dim(self) -> int:
        return self.base.d**self.N


def gamma_N(gs: GateSet, N: int, mode: FamilyMode | str = FamilyMode.SWAP_FORM) -> GeneratorFamily:
    """Generators of Gamma^N.

    Swap form: the gates on qudits ``0..n-1`` plus the adjacent swaps
    ``(i, i+1)``; this generates the same group as the full orbit of
    embeddings over all ordered target tuples.
    """
    mode = FamilyMode(mode)
    if N < gs.n:
        raise ValueError(f"N={N} is smaller than the gate arity n={gs.n}")
    if gs.d**N > config.MAX_TOTAL_DIM:
        raise ResourceError(f"register dimension {gs.d}^{N} exceeds {config.MAX_TOTAL_DIM}")
    members, labels = [], []
    if mode is FamilyMode.SWAP_FORM:
        for g, lab in zip(gs.gates, gs.labels):
            members.append(embed(g, range(gs.n), N, gs.d))
            labels.append(lab)
        for i in range(N - 1):
            members.append(TensorWordOperator.permutation(QuditPermutation.swap(i, i + 1, N, gs.d)))
            labels.append(f"SWAP({i},{i + 1})")
    else:
        tuples = list(itertools.permutations(range(N), gs.n))
        if len(tuples) * len(gs.gates) > MAX_ORBIT_MEMBERS:
            raise ResourceError(f"full orbit would have {len(tuples) * len(gs.gates)} members")
        for g, lab in zip(gs.gates, gs.labels):
            for t in tuples:
                members.append(embed(g, t, N, gs.d))
                labels.append(f"{lab}@{t}")
    return GeneratorFamily(N, gs, tuple(members), tuple(labels), mode)
