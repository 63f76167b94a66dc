"""Dense and matrix-free linear algebra on qudit registers.

Ordering convention used everywhere in the package: qudit 0 is the most
significant base-``d`` digit of a basis index, so ``kron(a, b)`` puts ``a``
on qudit 0 and ``b`` on qudit 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from . import config
from .errors import InconclusiveError, ResourceError

# Dense materialization limit; 8192**2 complex entries is already 1 GiB.
MAX_DENSE_DIM = 8192
# "auto" picks the dense eigensolver only up to here; Lanczos is far faster beyond.
AUTO_DENSE_MAX = 1024
# Lanczos batch size and the memory allowed for deflation vectors plus workspace.
MAX_LANCZOS_BLOCK = 64
LANCZOS_MEMORY_BYTES = 1 << 30


def unitarity_defect(a: np.ndarray) -> float:
    """Frobenius norm of ``a^dagger a - I``."""
    a = np.asarray(a)
    return float(np.linalg.norm(a.conj().T @ a - np.eye(a.shape[0])))


def as_unitary(a, tol: float = config.UNITARY_TOL) -> np.ndarray:
    """Return ``a`` as a complex square array, checking unitarity."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
    defect = unitarity_defect(a)
    if defect > tol:
        raise ValueError(f"matrix is not unitary (defect {defect:.3g} > {tol:.3g})")
    return a


def _check_dense_dim(dim: int, limit: int) -> None:
    if dim > min(limit, MAX_DENSE_DIM):
        raise ResourceError(f"dense dimension {dim} exceeds limit {min(limit, MAX_DENSE_DIM)}")


def kron(a: np.ndarray, b: np.ndarray, max_dim: int = config.MAX_TOTAL_DIM) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    _check_dense_dim(a.shape[0] * b.shape[0], max_dim)
    return np.kron(a, b)


def kron_all(mats: Sequence[np.ndarray], max_dim: int = config.MAX_TOTAL_DIM) -> np.ndarray:
    out = np.eye(1)
    for m in mats:
        out = kron(out, m, max_dim)
    return out


@dataclass(frozen=True)
class QuditPermutation:
    """Permutation of ``N`` qudits; qudit ``q`` is moved to position ``perm[q]``."""

    N: int
    d: int
    perm: tuple

    def __post_init__(self):
        perm = tuple(int(p) for p in self.perm)
        if sorted(perm) != list(range(self.N)):
            raise ValueError(f"{perm} is not a permutation of range({self.N})")
        object.__setattr__(self, "perm", perm)

    @classmethod
    def swap(cls, i: int, j: int, N: int, d: int) -> "QuditPermutation":
        perm = list(range(N))
        perm[i], perm[j] = j, i
        return cls(N, d, tuple(perm))

    def inverse(self) -> "QuditPermutation":
        inv = [0] * self.N
        for q, p in enumerate(self.perm):
            inv[p] = q
        return QuditPermutation(self.N, self.d, tuple(inv))

    def compose(self, other: "QuditPermutation") -> "QuditPermutation":
        """``self`` after ``other``."""
        return QuditPermutation(self.N, self.d, tuple(self.perm[other.perm[q]] for q in range(self.N)))


def permutation_operator(p: QuditPermutation, max_dim: int = config.MAX_TOTAL_DIM) -> np.ndarray:
    dim = p.d**p.N
    _check_dense_dim(dim, max_dim)
    idx = np.arange(dim).reshape((p.d,) * p.N)
    # out axis j carries input axis perm^{-1}(j)
    moved = np.transpose(idx, p.inverse().perm).reshape(-1)
    out = np.zeros((dim, dim))
    out[np.arange(dim), moved] = 1.0
    return out


# ---------------------------------------------------------------------------
# matrix-free tensor-structured operators


@dataclass(frozen=True)
class GateFactor:
    matrix: np.ndarray
    axes: tuple

    def adjoint(self) -> "GateFactor":
        return GateFactor(self.matrix.conj().T, self.axes)

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.matrix)

    @property
    def is_hermitian(self) -> bool:
        return bool(np.allclose(self.matrix, self.matrix.conj().T, atol=1e-12))


@dataclass(frozen=True)
class PermFactor:
    perm: tuple  # axis q moves to position perm[q]

    def adjoint(self) -> "PermFactor":
        inv = [0] * len(self.perm)
        for q, p in enumerate(self.perm):
            inv[p] = q
        return PermFactor(tuple(inv))

    is_real = True

    @property
    def is_hermitian(self) -> bool:
        return all(self.perm[p] == q for q, p in enumerate(self.perm))


def _strip_phase(g: np.ndarray) -> np.ndarray:
    """A phase multiple of ``g`` that is Hermitian and/or real when possible."""
    g = np.asarray(g, dtype=complex)
    m = g.shape[0]
    sq = g @ g
    lam = sq[0, 0]
    if abs(abs(lam) - 1) < 1e-9 and np.allclose(sq, lam * np.eye(m), atol=1e-10):
        g = g / np.sqrt(lam)
    flat = g.reshape(-1)
    pivot = flat[np.argmax(np.abs(flat))]
    h = g * (abs(pivot) / pivot)
    if np.allclose(h.imag, 0, atol=1e-13):
        return np.ascontiguousarray(h.real)
    return g


class TensorWordOperator:
    """Product of gates and axis permutations acting on ``(C^d)^{(x) n_axes}``.

    Factors are applied in list order, so the operator is
    ``factors[-1] @ ... @ factors[0]``. Nothing is materialized unless
    :meth:`to_dense` is called.
    """

    def __init__(self, d: int, n_axes: int, factors: Sequence = ()):
        self.d = int(d)
        self.n_axes = int(n_axes)
        self.factors = tuple(factors)
        for f in self.factors:
            if isinstance(f, GateFactor):
                r = len(f.axes)
                if f.matrix.shape != (self.d**r, self.d**r):
                    raise ValueError("gate shape does not match its axes")
                if len(set(f.axes)) != r or not all(0 <= a < self.n_axes for a in f.axes):
                    raise ValueError(f"invalid axes {f.axes}")
            elif len(f.perm) != self.n_axes:
                raise ValueError("permutation size does not match n_axes")

    @property
    def dim(self) -> int:
        return self.d**self.n_axes

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> "TensorWordOperator":
        m = np.asarray(m)
        return cls(m.shape[0], 1, [GateFactor(m, (0,))])

    @classmethod
    def gate(cls, g: np.ndarray, axes: Sequence[int], d: int, n_axes: int) -> "TensorWordOperator":
        return cls(d, n_axes, [GateFactor(np.asarray(g), tuple(axes))])

    @classmethod
    def permutation(cls, p: QuditPermutation) -> "TensorWordOperator":
        return cls(p.d, p.N, [PermFactor(p.perm)])

    @property
    def is_real(self) -> bool:
        return all(f.is_real for f in self.factors)

    @property
    def is_hermitian(self) -> bool:
        if len(self.factors) == 1:
            return self.factors[0].is_hermitian
        if any(isinstance(f, PermFactor) for f in self.factors):
            return False
        seen = set()
        for f in self.factors:
            if seen.intersection(f.axes) or not f.is_hermitian:
                return False
            seen.update(f.axes)
        return True

    def adjoint(self) -> "TensorWordOperator":
        return TensorWordOperator(self.d, self.n_axes, [f.adjoint() for f in reversed(self.factors)])

    def then(self, other: "TensorWordOperator") -> "TensorWordOperator":
        """Operator applying ``self`` first, then ``other``."""
        if (other.d, other.n_axes) != (self.d, self.n_axes):
            raise ValueError("operators act on different registers")
        return TensorWordOperator(self.d, self.n_axes, self.factors + other.factors)

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x)
        vector = x.ndim == 1
        if x.shape[0] != self.dim:
            raise ValueError(f"expected leading dimension {self.dim}, got {x.shape[0]}")
        if not self.is_real:
            x = x.astype(complex, copy=False)
        t = x.reshape((self.d,) * self.n_axes + (-1,))
        for f in self.factors:
            if isinstance(f, GateFactor):
                r = len(f.axes)
                t = np.moveaxis(t, f.axes, range(r))
                shape = t.shape
                t = (f.matrix @ t.reshape(self.d**r, -1)).reshape(shape)
                t = np.moveaxis(t, range(r), f.axes)
            else:
                inv = PermFactor(f.perm).adjoint().perm
                t = np.transpose(t, inv + (self.n_axes,))
        out = t.reshape(self.dim, -1)
        return out[:, 0].copy() if vector else np.ascontiguousarray(out)

    __matmul__ = apply

    def to_dense(self, max_dim: int = MAX_DENSE_DIM) -> np.ndarray:
        _check_dense_dim(self.dim, max_dim)
        dtype = float if self.is_real else complex
        return self.apply(np.eye(self.dim, dtype=dtype))

    def moment_lift(self, k: int) -> "TensorWordOperator":
        """``(W (x) conj(W))^{(x) k}`` on ``2 k n_axes`` axes.

        Gate factors are rephased first; the lift does not depend on
        global phases, and the rephased gates are real or Hermitian
        whenever some phase multiple is.
        """
        n = self.n_axes
        copies = 2 * k
        factors = []
        for f in self.factors:
            if isinstance(f, GateFactor):
                g = _strip_phase(f.matrix)
                for c in range(copies):
                    mat = g.conj() if c % 2 else g
                    factors.append(GateFactor(mat, tuple(c * n + a for a in f.axes)))
            else:
                perm = tuple(c * n + f.perm[q] for c in range(copies) for q in range(n))
                factors.append(PermFactor(perm))
        return TensorWordOperator(self.d, copies * n, factors)


# ---------------------------------------------------------------------------
# simultaneous fixed subspace


class UnitEigenspace(NamedTuple):
    dimension: int
    next_eigenvalue: float | None  # largest eigenvalue of the averaged operator below 1
    method: str


def _averaged(ops: Sequence[TensorWordOperator]):
    """Matvec for ``A = mean over ops and their inverses``; Hermitian."""
    terms = [(op, None if op.is_hermitian else op.adjoint()) for op in ops]

    def matvec(x):
        acc = None
        for op, adj in terms:
            y = 2 * op.apply(x) if adj is None else op.apply(x) + adj.apply(x)
            acc = y if acc is None else acc + y
        return acc / (2 * len(terms))

    return matvec


def _dense_spectrum(matvec, dim: int, real: bool) -> np.ndarray:
    dtype = float if real else complex
    a = np.empty((dim, dim), dtype=dtype)
    block = max(1, min(dim, 2**22 // dim))
    for start in range(0, dim, block):
        stop = min(dim, start + block)
        cols = np.zeros((dim, stop - start), dtype=dtype)
        cols[np.arange(start, stop), np.arange(stop - start)] = 1
        a[:, start:stop] = matvec(cols)
    a = (a + a.conj().T) / 2
    return np.linalg.eigvalsh(a)


def _count(vals: np.ndarray, tol: float) -> tuple:
    fixed = vals >= 1 - tol
    rest = vals[~fixed]
    return int(fixed.sum()), (float(rest.max()) if rest.size else None)


def unit_eigenspace(
    ops: Sequence[TensorWordOperator],
    dim: int,
    method: str = "auto",
    eigen_tol: float = config.EIGEN_TOL,
    gap: float = config.EIGEN_GAP,
    maxiter: int = 5000,
    dense_threshold: int | None = None,
) -> UnitEigenspace:
    """Dimension of the common fixed space of ``ops`` plus spectral gap data.

    The fixed space of a set of unitaries equals the eigenvalue-1
    eigenspace of the Hermitian average over the set and its inverses.
    ``method`` is ``"dense"``, ``"matrix-free"`` or ``"auto"``.
    """
    if not ops:
        return UnitEigenspace(dim, None, "dense")
    for op in ops:
        if op.dim != dim:
            raise ValueError(f"operator of dimension {op.dim} in a dimension-{dim} problem")
    if dim > config.MAX_TOTAL_DIM:
        raise ResourceError(f"dimension {dim} exceeds {config.MAX_TOTAL_DIM}")
    threshold = config.dense_threshold() if dense_threshold is None else dense_threshold
    if method == "auto":
        method = "dense" if dim <= min(threshold, AUTO_DENSE_MAX) else "matrix-free"
    real = all(op.is_real for op in ops)
    matvec = _averaged(ops)

    if method == "dense":
        if dim > threshold:
            raise ResourceError(f"dense method requested for dimension {dim} > {threshold}")
        count, nxt = _count(_dense_spectrum(matvec, dim, real), eigen_tol)
    elif method == "matrix-free":
        count, nxt = _lanczos_count(matvec, dim, real, eigen_tol, maxiter)
    else:
        raise ValueError(f"unknown method {method!r}")

    if nxt is not None and nxt > 1 - gap:
        raise InconclusiveError(
            f"eigenvalue {nxt:.12f} within gap {gap:g} of 1; fixed-space count {count} not trusted"
        )
    return UnitEigenspace(count, nxt, method)


def _lanczos_count(matvec, dim: int, real: bool, tol: float, maxiter: int) -> tuple:
    """Count unit eigenvalues by repeated deflated Lanczos runs.

    A single Krylov run can return fewer copies of a degenerate eigenvalue
    than its multiplicity, so found unit eigenvectors are projected out and
    the search restarts from a fresh random vector. The count is accepted
    after two consecutive runs find nothing new, the second with twice the
    iteration budget.
    """
    dtype = float if real else complex
    rng = np.random.default_rng(12345)

    def start_vector():
        v = rng.standard_normal(dim)
        if not real:
            v = v + 1j * rng.standard_normal(dim)
        return v.astype(dtype)

    q = np.zeros((dim, 0), dtype=dtype)
    itemsize = np.dtype(dtype).itemsize
    nev, clean, nxt = 4, 0, None
    while clean < 2:
        if q.shape[1] + nev >= dim - 1:
            # tiny problem or huge fixed space: assemble the averaged operator
            return _count(_dense_spectrum(matvec, dim, real), tol)
        if (q.shape[1] + 3 * nev) * dim * itemsize > LANCZOS_MEMORY_BYTES:
            raise ResourceError(
                f"fixed space has more than {q.shape[1]} dimensions; storing it in dimension {dim} "
                f"exceeds the {LANCZOS_MEMORY_BYTES >> 20} MiB budget"
            )
        basis = q

        def deflated(x, basis=basis):
            x = x - basis @ (basis.conj().T @ x)
            y = matvec(x)
            return y - basis @ (basis.conj().T @ y)

        op = LinearOperator((dim, dim), matvec=deflated, dtype=dtype)
        budget = maxiter * (2 if clean else 1)
        try:
            vals, vecs = eigsh(op, k=nev, which="LA", tol=1e-10, maxiter=budget,
                               ncv=min(dim, max(2 * nev + 1, 40)), v0=start_vector())
        except ArpackNoConvergence as exc:
            raise InconclusiveError(f"Lanczos did not converge for {nev} eigenvalues") from exc
        unit = vals >= 1 - tol
        rest = vals[~unit]
        if rest.size:
            nxt = max(float(rest.max()), nxt if nxt is not None else -1.0)
        if not unit.any():
            clean += 1
            continue
        clean = 0
        new = vecs[:, unit]
        new = new - q @ (q.conj().T @ new)
        new, _ = np.linalg.qr(new)
        q = np.concatenate([q, new.astype(dtype)], axis=1)
        if unit.all():
            nev = min(2 * nev, MAX_LANCZOS_BLOCK)
    return q.shape[1], nxt


def fixed_subspace_dimension(
    ops: Sequence[TensorWordOperator],
    dim: int,
    method: str = "auto",
    **kwargs,
) -> int:
    """``dim`` of the intersection of ``ker(op - I)`` over ``ops``."""
    return unit_eigenspace(ops, dim, method, **kwargs).dimension
