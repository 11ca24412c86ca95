"""Dense complex vectors and matrices for the 2-, 4- and 16-dimensional spaces.

States and operators are plain numpy arrays (complex128).  Everything built
here is returned read-only so values can be shared freely.

Pair spaces use the Kronecker convention with the first (Alice) factor
varying slowest: index = 4 * alice + bob.
"""
from __future__ import annotations

import numpy as np

TOL = 1e-12


class UsageError(ValueError):
    """Raised when an operation is called with incompatible arguments."""


def frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=complex)
    arr.setflags(write=False)
    return arr


def identity(dim: int) -> np.ndarray:
    return frozen(np.eye(dim))


def basis(dim: int, index: int) -> np.ndarray:
    e = np.zeros(dim, dtype=complex)
    e[index] = 1.0
    return frozen(e)


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two vectors or two square matrices."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != b.ndim or a.ndim not in (1, 2):
        raise UsageError(
            f"tensor needs two vectors or two matrices, got ndim {a.ndim} and {b.ndim}"
        )
    return frozen(np.kron(a, b))


def apply(op: np.ndarray, state: np.ndarray) -> np.ndarray:
    op = np.asarray(op)
    state = np.asarray(state)
    if op.ndim != 2 or state.ndim != 1 or op.shape[1] != state.shape[0]:
        raise UsageError(f"cannot apply operator {op.shape} to state {state.shape}")
    return frozen(op @ state)


def dagger(op: np.ndarray) -> np.ndarray:
    return frozen(np.asarray(op).conj().T)


def inner(a: np.ndarray, b: np.ndarray) -> complex:
    """<a|b>, antilinear in the first argument."""
    return complex(np.vdot(a, b))


def norm(state: np.ndarray) -> float:
    return float(np.linalg.norm(state))


def normalize(state: np.ndarray) -> np.ndarray:
    n = norm(state)
    if n == 0.0:
        raise UsageError("cannot normalize the zero vector")
    return frozen(np.asarray(state) / n)


def projector(ket: np.ndarray) -> np.ndarray:
    """Rank-one projector |ket><ket|."""
    ket = np.asarray(ket, dtype=complex)
    if ket.ndim != 1:
        raise UsageError("projector expects a vector")
    if norm(ket) == 0.0:
        raise UsageError("projector of the zero vector is undefined")
    return frozen(np.outer(ket, ket.conj()))


def max_abs_diff(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def unitarity_defect(op: np.ndarray) -> float:
    """max |(M^dagger M - I)_ij|."""
    op = np.asarray(op)
    return max_abs_diff(op.conj().T @ op, np.eye(op.shape[0]))


def is_unitary(op: np.ndarray, tol: float = TOL) -> bool:
    return unitarity_defect(op) <= tol


def is_projector(op: np.ndarray, tol: float = TOL) -> bool:
    op = np.asarray(op)
    return max_abs_diff(op @ op, op) <= tol and max_abs_diff(op.conj().T, op) <= tol


def global_phase(a: np.ndarray, b: np.ndarray) -> complex:
    """Unit phase phi that best aligns phi*b with a, read off b's largest component."""
    a = np.asarray(a)
    b = np.asarray(b)
    k = int(np.argmax(np.abs(b)))
    if abs(b[k]) == 0.0 or abs(a[k]) == 0.0:
        return 1.0 + 0.0j
    ratio = a[k] / b[k]
    return complex(ratio / abs(ratio))


def equal_up_to_global_phase(a: np.ndarray, b: np.ndarray, tol: float = TOL) -> bool:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        return False
    phi = global_phase(a, b)
    return norm(a - phi * b) <= tol
