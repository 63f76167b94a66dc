"""Standard gate matrices (qudit 0 is the most significant digit)."""

import numpy as np

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
S = np.diag([1, 1j])
T = np.diag([1, np.exp(1j * np.pi / 4)])


def controlled(u: np.ndarray) -> np.ndarray:
    """Control on qubit 0, ``u`` on the remaining qubits."""
    m = u.shape[0]
    out = np.eye(2 * m, dtype=complex)
    out[m:, m:] = u
    return out


CZ = controlled(Z)
CNOT = controlled(X)
CH = controlled(H)
SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


def shift(d: int) -> np.ndarray:
    """Generalized Pauli X: |x> -> |x+1 mod d>."""
    return np.roll(np.eye(d, dtype=complex), 1, axis=0)


def clock(d: int) -> np.ndarray:
    """Generalized Pauli Z: |x> -> w^x |x>."""
    return np.diag(np.exp(2j * np.pi * np.arange(d) / d))
