"""Moments M_{2k} of the closure of <Gamma^N>.

The exact route counts the vectors fixed by every ``(g (x) conj(g))^{(x) k}``
with ``g`` running over the generators. A vector fixed by all generators is
fixed by every word in them and, by continuity, by the closure, so this
count is the Haar moment of the closure.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import asdict, dataclass

import numpy as np

from . import config
from .errors import ResourceError, UnsupportedError
from .gateset import GeneratorFamily
from .tensor import MAX_DENSE_DIM, GateFactor, TensorWordOperator, unit_eigenspace


@dataclass(frozen=True)
class MomentReport:
    N: int
    k: int
    method: str
    exact: int | None = None
    estimate: float | None = None
    stderr: float | None = None
    next_eigenvalue: float | None = None
    samples: int | None = None
    word_length: int | None = None
    seed: int | None = None

    def to_dict(self) -> dict:
        return {key: val for key, val in asdict(self).items() if val is not None}


def _same_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float = 1e-10) -> bool:
    overlap = abs(np.vdot(b, a))
    return abs(overlap - a.shape[0]) <= tol * a.shape[0]


def _distinct_generators(members) -> list:
    """Drop members equal (up to phase) to an earlier member or its adjoint."""
    kept = []
    for op in members:
        f = op.factors[0] if len(op.factors) == 1 else None
        if isinstance(f, GateFactor):
            dup = False
            for other in kept:
                g = other.factors[0] if len(other.factors) == 1 else None
                if isinstance(g, GateFactor) and g.axes == f.axes and (
                    _same_up_to_phase(f.matrix, g.matrix)
                    or _same_up_to_phase(f.matrix, g.matrix.conj().T)
                ):
                    dup = True
                    break
            if dup:
                continue
        kept.append(op)
    return kept


def moment_operators(fam: GeneratorFamily, k: int) -> list:
    return [op.moment_lift(k) for op in _distinct_generators(fam.members)]


def exact_moment(fam: GeneratorFamily, k: int = 2, method: str = "auto",
                 dense_threshold: int | None = None, **kwargs) -> MomentReport:
    """Exact M_{2k} as the dimension of the joint fixed space of the lifted generators."""
    if k not in (2, 4):
        raise UnsupportedError(f"moment order k={k} not supported (use 2 or 4)")
    dim = fam.dim ** (2 * k)
    if dim > config.MAX_TOTAL_DIM:
        raise ResourceError(f"moment space dimension {fam.dim}^{2 * k} exceeds {config.MAX_TOTAL_DIM}")
    ops = moment_operators(fam, k)
    res = unit_eigenspace(ops, dim, method, dense_threshold=dense_threshold, **kwargs)
    return MomentReport(N=fam.N, k=k, method=res.method, exact=res.dimension,
                        next_eigenvalue=res.next_eigenvalue)


# ---------------------------------------------------------------------------
# Monte Carlo frame potential


def _walk_steps(fam: GeneratorFamily, dense: bool) -> list:
    """Members, their missing inverses, and the identity (the walk is lazy)."""
    steps = []
    for op in fam.members:
        for cand in (op, op.adjoint()):
            if dense:
                cand = cand.to_dense().astype(complex)
                if any(np.allclose(cand, s, atol=1e-12) for s in steps):
                    continue
            steps.append(cand)
    if dense:
        steps.append(np.eye(fam.dim, dtype=complex))
    else:
        steps.append(None)
    return steps


def _stream_values(steps, dim: int, k: int, L: int, count: int, seed_seq, dense: bool) -> np.ndarray:
    rng = np.random.default_rng(seed_seq)
    out = np.empty(count)
    if dense:
        mats = np.stack(steps)
        chunk = max(1, min(count, 2**22 // (dim * dim)))
        for start in range(0, count, chunk):
            b = min(chunk, count - start)
            w = np.broadcast_to(np.eye(dim, dtype=complex), (b, dim, dim)).copy()
            for _ in range(L):
                w = mats[rng.integers(len(mats), size=b)] @ w
            out[start:start + b] = np.abs(np.trace(w, axis1=1, axis2=2)) ** (2 * k)
        return out
    # above the dense threshold: one word at a time, traced column block by column block
    block = max(1, 2**20 // dim)
    for s in range(count):
        word = rng.integers(len(steps), size=L)
        tr = 0j
        for start in range(0, dim, block):
            stop = min(dim, start + block)
            cols = np.zeros((dim, stop - start), dtype=complex)
            cols[np.arange(start, stop), np.arange(stop - start)] = 1
            for i in word:
                if steps[i] is not None:
                    cols = steps[i].apply(cols)
            tr += np.trace(cols[start:stop])
        out[s] = abs(tr) ** (2 * k)
    return out


def jackknife_stderr(x: np.ndarray) -> float:
    """Delete-one jackknife standard error of the mean."""
    n = len(x)
    if n < 2:
        return float("nan")
    reps = (x.sum() - x) / (n - 1)
    return float(np.sqrt((n - 1) / n * np.sum((reps - reps.mean()) ** 2)))


def frame_potential_mc(fam: GeneratorFamily, k: int, word_length: int, samples: int, seed: int,
                       streams: int = 1, workers: int = 1,
                       dense_threshold: int | None = None) -> MomentReport:
    """Estimate M_{2k} by averaging ``|tr w|^{2k}`` over random words of length ``word_length``.

    Each step multiplies by a uniformly chosen member, member inverse, or
    the identity. Samples are split over ``streams`` independent seeded
    streams, merged in stream order, so the result depends only on
    ``seed`` and ``streams``.
    """
    if word_length < 1 or samples < 1:
        raise ValueError("word_length and samples must be positive")
    threshold = config.dense_threshold() if dense_threshold is None else dense_threshold
    dense = fam.dim <= min(threshold, MAX_DENSE_DIM)
    steps = _walk_steps(fam, dense)
    counts = [samples // streams + (i < samples % streams) for i in range(streams)]
    seqs = np.random.SeedSequence(seed).spawn(streams)
    jobs = [(steps, fam.dim, k, word_length, c, s, dense) for c, s in zip(counts, seqs) if c]
    if workers > 1:
        with concurrent.futures.ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda a: _stream_values(*a), jobs))
    else:
        parts = [_stream_values(*a) for a in jobs]
    x = np.concatenate(parts)
    return MomentReport(N=fam.N, k=k, method="monte-carlo", estimate=float(x.mean()),
                        stderr=jackknife_stderr(x), samples=samples, word_length=word_length,
                        seed=seed)


def haar_reference(m: int, k: int) -> int:
    """Haar value of M_{2k} on SU(m)."""
    if k == 2 and m >= 2:
        return 2
    if k == 4 and m >= 4:
        return 24
    raise UnsupportedError(f"no Haar reference for k={k} at dimension m={m}")
