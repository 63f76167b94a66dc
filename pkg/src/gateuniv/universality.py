"""Decision engine for (eventual) universality of qudit gate sets."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import gmpy2
import numpy as np

from . import config
from .diophantine import lie_type_dimension
from .errors import InconclusiveError, ResourceError, UnsupportedError
from .gates import clock, shift
from .gateset import GateSet, GeneratorFamily, gamma_N
from .moments import exact_moment, frame_potential_mc, haar_reference


def bound_new(d: int, n: int) -> int:
    """Largest register size that has to be examined: ``d^4 (n-1) + 1``."""
    if d < 2 or n < 1:
        raise ValueError(f"need d >= 2 and n >= 1, got d={d}, n={n}")
    return int(d) ** 4 * (int(n) - 1) + 1


def bound_ivanyos(d: int, n: int) -> int:
    """The earlier eighth-moment bound ``d^8 (n-1) + 1``."""
    if d < 2 or n < 1:
        raise ValueError(f"need d >= 2 and n >= 1, got d={d}, n={n}")
    return int(d) ** 8 * (int(n) - 1) + 1


def is_prime(d: int) -> bool:
    return d >= 2 and bool(gmpy2.is_prime(d))


def is_prime_power(d: int) -> bool:
    for e in range(1, d.bit_length() + 1):
        root, exact = gmpy2.iroot(d, e)
        if exact and is_prime(int(root)):
            return True
    return False


# ---------------------------------------------------------------------------
# finiteness probe


class ProbeOutcome(str, enum.Enum):
    FINITE = "Finite"
    INFINITE_LIKELY = "InfiniteLikely"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class FinitenessProbe:
    outcome: ProbeOutcome
    elements_found: int
    projective_found: int
    dedup_epsilon: float
    cap: int
    crowded: bool  # some pair of found elements lies within 10 * epsilon
    transcript: tuple  # cumulative element count after each breadth-first level

    @property
    def order(self) -> int | None:
        return self.elements_found if self.outcome is ProbeOutcome.FINITE else None

    @property
    def projective_order(self) -> int | None:
        return self.projective_found if self.outcome is ProbeOutcome.FINITE else None

    def to_dict(self) -> dict:
        return {
            "outcome": self.outcome.value,
            "order": self.order,
            "projective_order": self.projective_order,
            "elements_found": self.elements_found,
            "projective_found": self.projective_found,
            "dedup_epsilon": self.dedup_epsilon,
            "cap": self.cap,
            "crowded": self.crowded,
            "transcript": list(self.transcript),
        }


class _EpsilonNet:
    """Incremental epsilon-separated point set.

    Neighbour candidates come from a sorted random 1-d projection: points
    within distance ``r`` of each other project within ``r`` too.
    """

    def __init__(self, width: int, eps: float, seed: int = 0):
        rng = np.random.default_rng(seed)
        r = rng.standard_normal(width)
        self.r = r / np.linalg.norm(r)
        self.eps = eps
        self.window = 10 * eps
        self.points = np.empty((0, width))
        self.keys = np.empty(0)
        self.order = np.empty(0, dtype=int)
        self.crowded = False

    def __len__(self) -> int:
        return len(self.points)

    def _nearest_existing(self, cand: np.ndarray, proj: np.ndarray) -> np.ndarray:
        best = np.full(len(cand), np.inf)
        if not len(self.points):
            return best
        skeys = self.keys[self.order]
        lo = np.searchsorted(skeys, proj - self.window)
        hi = np.searchsorted(skeys, proj + self.window, side="right")
        width = hi - lo
        for j in range(int(width.max(initial=0))):
            sel = np.nonzero(width > j)[0]
            idx = self.order[lo[sel] + j]
            dist = np.linalg.norm(cand[sel] - self.points[idx], axis=1)
            best[sel] = np.minimum(best[sel], dist)
        return best

    def add(self, cand: np.ndarray) -> np.ndarray:
        """Insert the candidates farther than ``eps`` from everything; return that mask."""
        proj = cand @ self.r
        near = self._nearest_existing(cand, proj)
        if np.any((near > self.eps) & (near <= self.window)):
            self.crowded = True
        new = near > self.eps
        # deduplicate the new candidates among themselves, first in sorted order wins
        idx = np.nonzero(new)[0]
        srt = idx[np.argsort(proj[idx], kind="stable")]
        sp = proj[srt]
        dropped = np.zeros(len(srt), dtype=bool)
        pairs = []
        for j in range(1, len(srt)):
            ok = np.nonzero(sp[j:] - sp[:-j] <= self.window)[0]
            if not len(ok):
                break
            dist = np.linalg.norm(cand[srt[ok]] - cand[srt[ok + j]], axis=1)
            if np.any((dist > self.eps) & (dist <= self.window)):
                self.crowded = True
            pairs.extend((int(a), int(a + j)) for a in ok[dist <= self.eps])
        for a, b in sorted(pairs):
            if not dropped[a]:
                dropped[b] = True
        keep = np.sort(srt[~dropped])
        mask = np.zeros(len(cand), dtype=bool)
        mask[keep] = True
        if len(keep):
            self.points = np.concatenate([self.points, cand[keep]])
            self.keys = np.concatenate([self.keys, proj[keep]])
            self.order = np.argsort(self.keys, kind="stable")
        return mask


def _flat(mats: np.ndarray) -> np.ndarray:
    flat = mats.reshape(len(mats), -1)
    return np.concatenate([flat.real, flat.imag], axis=1)


def canonical_phase(mats: np.ndarray) -> np.ndarray:
    """Rephase each matrix so its first near-maximal-modulus entry is real positive."""
    flat = mats.reshape(len(mats), -1)
    mod = np.abs(flat)
    first = np.argmax(mod >= mod.max(axis=1, keepdims=True) - 1e-6, axis=1)
    piv = flat[np.arange(len(flat)), first]
    return mats * (np.abs(piv) / piv)[:, None, None]


PROBE_MEMORY_BYTES = 512 * 2**20


def finiteness_probe(fam: GeneratorFamily, epsilon: float = 1e-6, cap: int = 200_000,
                     dense_threshold: int | None = None) -> FinitenessProbe:
    """Breadth-first enumeration of the generated group up to ``cap`` elements.

    ``Finite`` when the frontier empties; ``InfiniteLikely`` when the cap is
    exceeded while all found elements stay more than ``10 * epsilon``
    apart; ``Inconclusive`` otherwise. ``cap`` is lowered if storing that
    many matrices would exceed the probe memory budget.
    """
    m = fam.dim
    threshold = config.dense_threshold() if dense_threshold is None else dense_threshold
    if m > threshold:
        raise ResourceError(f"finiteness probe is dense-only; dimension {m} > {threshold}")
    cap = int(min(cap, PROBE_MEMORY_BYTES // (32 * m * m)))
    gens = []
    for op in fam.members:
        for g in (op.to_dense(), op.to_dense().conj().T):
            g = g.astype(complex)
            if not any(np.allclose(g, h, atol=1e-12) for h in gens):
                gens.append(g)
    gens = np.stack(gens)
    net = _EpsilonNet(2 * m * m, epsilon)
    ident = np.eye(m, dtype=complex)[None]
    net.add(_flat(ident))
    found = [ident]
    frontier = ident
    transcript = [1]
    chunk = max(1, 2**21 // (len(gens) * m * m))
    exceeded = False
    while len(frontier) and not exceeded:
        nxt = []
        for start in range(0, len(frontier), chunk):
            block = frontier[start:start + chunk]
            cand = (gens[None, :] @ block[:, None]).reshape(-1, m, m)
            mask = net.add(_flat(cand))
            nxt.append(cand[mask])
            if len(net) > cap:
                exceeded = True
                break
        frontier = np.concatenate(nxt)
        found.append(frontier)
        transcript.append(len(net))
    elements = np.concatenate(found)
    proj_net = _EpsilonNet(2 * m * m, epsilon, seed=1)
    for start in range(0, len(elements), 4096):
        proj_net.add(_flat(canonical_phase(elements[start:start + 4096])))
    if not exceeded:
        outcome = ProbeOutcome.FINITE
    elif not net.crowded:
        outcome = ProbeOutcome.INFINITE_LIKELY
    else:
        outcome = ProbeOutcome.INCONCLUSIVE
    return FinitenessProbe(outcome, len(net), len(proj_net), epsilon, cap, net.crowded,
                           tuple(transcript))


def closure_elements(fam: GeneratorFamily, epsilon: float = 1e-6, cap: int = 200_000) -> np.ndarray:
    """All elements of a finite generated group (raises if the cap is hit)."""
    m = fam.dim
    gens = np.stack([op.to_dense().astype(complex) for op in fam.members]
                    + [op.to_dense().conj().T.astype(complex) for op in fam.members])
    net = _EpsilonNet(2 * m * m, epsilon)
    frontier = np.eye(m, dtype=complex)[None]
    net.add(_flat(frontier))
    found = [frontier]
    while len(frontier):
        cand = (gens[None, :] @ frontier[:, None]).reshape(-1, m, m)
        frontier = cand[net.add(_flat(cand))]
        found.append(frontier)
        if len(net) > cap:
            raise ResourceError(f"group has more than {cap} elements")
    return np.concatenate(found)


# ---------------------------------------------------------------------------
# Clifford membership


@dataclass(frozen=True)
class CliffordTest:
    per_gate: tuple
    overall: bool

    def to_dict(self) -> dict:
        return {"per_gate": list(self.per_gate), "overall": self.overall}


def _digits(d: int, n: int) -> np.ndarray:
    idx = np.arange(d**n)
    return np.stack([(idx // d ** (n - 1 - j)) % d for j in range(n)], axis=1)


def pauli_operator(a, b, d: int) -> np.ndarray:
    """Weyl operator ``X^a Z^b``: ``|x> -> w^{b.x} |x + a>`` digitwise mod ``d``."""
    a = np.asarray(a)
    b = np.asarray(b)
    n = len(a)
    dig = _digits(d, n)
    target = ((dig + a) % d) @ (d ** np.arange(n - 1, -1, -1))
    phase = np.exp(2j * np.pi * ((dig @ b) % d) / d)
    out = np.zeros((d**n, d**n), dtype=complex)
    out[target, np.arange(d**n)] = phase
    return out


def is_pauli_multiple(q: np.ndarray, d: int, n: int, tol: float = 1e-8) -> bool:
    """Whether ``q`` equals a phase times some Weyl operator."""
    col = q[:, 0]
    row = int(np.argmax(np.abs(col)))
    c = col[row]
    if abs(abs(c) - 1) > tol:
        return False
    a = _digits(d, n)[row]
    b = np.zeros(n, dtype=int)
    for j in range(n):
        x = np.zeros(n, dtype=int)
        x[j] = 1
        src = d ** (n - 1 - j)
        dst = int(((x + a) % d) @ (d ** np.arange(n - 1, -1, -1)))
        b[j] = int(np.rint(np.angle(q[dst, src] / c) * d / (2 * np.pi))) % d
    return bool(np.linalg.norm(q - c * pauli_operator(a, b, d)) <= tol)


def clifford_member_test(gs: GateSet, tol: float = 1e-8) -> CliffordTest:
    """Check, gate by gate, that conjugation maps every X_j and Z_j to a Pauli up to phase.

    Only detects Clifford gates written in the computational basis.
    """
    d, n = gs.d, gs.n
    if not is_prime(d):
        raise UnsupportedError(f"Clifford test implemented for prime d only, got d={d}")
    paulis = []
    for j in range(n):
        for local in (shift(d), clock(d)):
            ops = [np.eye(d)] * n
            ops[j] = local
            p = ops[0]
            for o in ops[1:]:
                p = np.kron(p, o)
            paulis.append(p)
    per_gate = tuple(
        all(is_pauli_multiple(g @ p @ g.conj().T, d, n, tol) for p in paulis) for g in gs.gates
    )
    return CliffordTest(per_gate, all(per_gate))


# ---------------------------------------------------------------------------
# verdicts


class VerdictKind(str, enum.Enum):
    UNIVERSAL_AT = "UniversalAt"
    EVENTUALLY_UNIVERSAL = "EventuallyUniversal"
    CLIFFORD_BLOCKED = "CliffordBlocked"
    FINITE_NON_DESIGN = "FiniteNonDesign"
    NOT_EVENTUALLY_UNIVERSAL = "NotEventuallyUniversal"
    NOT_DECIDED = "NotDecided"


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    N: int | None = None
    reason: str = ""
    evidence: dict = field(default_factory=dict)

    @property
    def decided(self) -> bool:
        return self.kind is not VerdictKind.NOT_DECIDED

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "N": self.N, "reason": self.reason, "evidence": self.evidence}


def finiteness_excluded(d: int, N: int, clifford_negative: bool) -> bool:
    """Whether the classification of finite unitary 2-groups in SU(d^N) leaves no finite option.

    Needs ``N >= 2`` and ``d^N >= 5``. The extraspecial branch needs ``d``
    a prime power and is excluded by a negative Clifford test; the
    exceptional branch is ``d = 2, N = 3``; the Lie-type branch needs
    ``d^N`` among the Lie-type dimensions.
    """
    if N < 2 or d**N < 5:
        return False
    if is_prime_power(d) and not (is_prime(d) and clifford_negative):
        return False
    if (d, N) == (2, 3):
        return False
    return not lie_type_dimension(d**N)


def decide_at(gs: GateSet, N: int, *, method: str = "auto", dense_threshold: int | None = None,
              probe_epsilon: float = 1e-6, probe_cap: int = 200_000, probe_max_dim: int = 64,
              mc_samples: int = 0, mc_word_length: int = 100, seed: int = 0) -> Verdict:
    """Universality of Gamma^N from its exact fourth moment plus finiteness evidence."""
    if N < gs.n:
        raise ValueError(f"N={N} is smaller than the gate arity n={gs.n}")
    fam = gamma_N(gs, N)
    rep = exact_moment(fam, 2, method=method, dense_threshold=dense_threshold)
    haar = haar_reference(fam.dim, 2)
    evidence: dict = {"moment": rep.to_dict(), "haar_M4": haar}
    if mc_samples:
        mc = frame_potential_mc(fam, 2, mc_word_length, mc_samples, seed, dense_threshold=dense_threshold)
        evidence["moment_mc"] = mc.to_dict()

    cliff = clifford_member_test(gs) if is_prime(gs.d) else None
    evidence["clifford"] = cliff.to_dict() if cliff else "unsupported for non-prime d"
    probe = None
    if fam.dim <= probe_max_dim:
        probe = finiteness_probe(fam, probe_epsilon, probe_cap, dense_threshold)
        evidence["probe"] = probe.to_dict()
    finite = probe is not None and probe.outcome is ProbeOutcome.FINITE

    if rep.exact != haar:
        evidence["branch"] = "moment"
        if finite:
            return Verdict(VerdictKind.FINITE_NON_DESIGN, N,
                           f"M4 = {rep.exact} != {haar} and the group is finite", evidence)
        return Verdict(VerdictKind.NOT_DECIDED, N,
                       f"M4 = {rep.exact} != {haar}: not universal at N={N}", evidence)
    if cliff is not None and cliff.overall:
        evidence["branch"] = "extraspecial"
        return Verdict(VerdictKind.CLIFFORD_BLOCKED, N,
                       "every gate is Clifford, so the generated group is finite", evidence)
    if probe is not None and probe.outcome is ProbeOutcome.INFINITE_LIKELY:
        evidence["branch"] = "probe"
        return Verdict(VerdictKind.UNIVERSAL_AT, N, "M4 = 2 and the probe found unbounded growth",
                       evidence)
    if finite:
        evidence["branch"] = "finite-2-group"
        return Verdict(VerdictKind.NOT_DECIDED, N,
                       "finite unitary 2-group not recognised as Clifford in the computational basis",
                       evidence)
    if finiteness_excluded(gs.d, N, cliff is not None and not cliff.overall):
        evidence["branch"] = "classification"
        evidence["caveat"] = "Clifford test is basis dependent; Clifford conjugates are not detected"
        return Verdict(VerdictKind.UNIVERSAL_AT, N,
                       "M4 = 2 and no finite unitary 2-group of this kind exists", evidence)
    evidence["branch"] = "undetermined"
    return Verdict(VerdictKind.NOT_DECIDED, N, "M4 = 2 but finiteness undetermined", evidence)


def decide_eventual(gs: GateSet, N_max: int, **kwargs) -> Verdict:
    """Scan N = n, n+1, ... up to the d^4 (n-1) + 1 bound or ``N_max``."""
    if N_max < gs.n:
        raise ValueError(f"N_max={N_max} is smaller than the gate arity n={gs.n}")
    bound = bound_new(gs.d, gs.n)
    upper = min(bound, N_max)
    steps = []
    evidence = {"bound_new": bound, "bound_ivanyos": bound_ivanyos(gs.d, gs.n), "per_N": steps}
    capped = upper < bound
    design_seen = False
    for N in range(gs.n, upper + 1):
        try:
            v = decide_at(gs, N, **kwargs)
        except ResourceError as exc:
            steps.append({"N": N, "error": f"resource limit: {exc}"})
            capped = True
            break
        except InconclusiveError as exc:
            steps.append({"N": N, "error": f"inconclusive: {exc}"})
            design_seen = True
            continue
        steps.append(v.to_dict())
        if v.evidence["moment"]["exact"] == 2:
            design_seen = True
        if v.kind is VerdictKind.UNIVERSAL_AT:
            return Verdict(VerdictKind.EVENTUALLY_UNIVERSAL, N, v.reason, evidence)
        clifford = v.evidence["clifford"]
        if isinstance(clifford, dict) and clifford["overall"]:
            return Verdict(VerdictKind.CLIFFORD_BLOCKED, N,
                           "all gates are Clifford: <Gamma^N> is finite for every N", evidence)
    if capped:
        return Verdict(VerdictKind.NOT_DECIDED, None, "resource-capped below the N bound", evidence)
    if not design_seen:
        last = steps[-1]
        kind = (VerdictKind.FINITE_NON_DESIGN if last["kind"] == VerdictKind.FINITE_NON_DESIGN.value
                else VerdictKind.NOT_EVENTUALLY_UNIVERSAL)
        return Verdict(kind, None, f"M4 != 2 for every N up to the bound {bound}", evidence)
    return Verdict(VerdictKind.NOT_DECIDED, None,
                   "M4 = 2 reached but finiteness undetermined up to the bound", evidence)
