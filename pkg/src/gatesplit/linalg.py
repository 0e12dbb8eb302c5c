"""Dense complex matrix kernel.

Kronecker algebra, partial traces, Hermitian spectral routines, cross norms
and the operator reshuffle used to read off operator Schmidt coefficients.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Subsystem 1 is
the leftmost (most significant) Kronecker factor.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

DEFAULT_MAX_DIM = 4096
MAX_DIM_ENV = "GATESPLIT_MAX_DIM"

# ||M - M^dag||_F <= HERM_TOL * max(1, ||M||_F)
HERM_TOL = 1e-8


class GateSplitError(Exception):
    """Base class for all errors raised by gatesplit."""


class ShapeError(GateSplitError, ValueError):
    """Matrix has the wrong shape or fails a structural check."""


class SizeLimitError(GateSplitError, ValueError):
    """Total dimension exceeds the configured maximum."""


def max_dim() -> int:
    """Configured cap on the total Hilbert space dimension."""
    raw = os.environ.get(MAX_DIM_ENV)
    if raw is None:
        return DEFAULT_MAX_DIM
    try:
        value = int(raw)
    except ValueError:
        raise GateSplitError(f"{MAX_DIM_ENV} must be an integer, got {raw!r}") from None
    if value < 1:
        raise GateSplitError(f"{MAX_DIM_ENV} must be positive, got {value}")
    return value


def as_matrix(m, *, square: bool = False, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-d complex128 array."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] == 0 or a.shape[1] == 0:
        raise ShapeError(f"{name} must be a non-empty 2-d array, got shape {a.shape}")
    if square and a.shape[0] != a.shape[1]:
        raise ShapeError(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ShapeError(f"{name} has non-finite entries")
    return a


@dataclass(frozen=True)
class TensorSpace:
    """Ordered list of subsystem dimensions (m_1, ..., m_n)."""

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims:
            raise GateSplitError("TensorSpace needs at least one subsystem")
        if any(d < 2 for d in dims):
            raise GateSplitError(f"every subsystem dimension must be >= 2, got {dims}")
        total = math.prod(dims)
        if total > max_dim():
            raise SizeLimitError(f"total dimension {total} exceeds maximum {max_dim()}")
        object.__setattr__(self, "dims", dims)

    @property
    def n(self) -> int:
        return len(self.dims)

    @property
    def total(self) -> int:
        return math.prod(self.dims)

    @property
    def is_qubits(self) -> bool:
        return all(d == 2 for d in self.dims)

    @classmethod
    def qubits(cls, n: int) -> "TensorSpace":
        return cls((2,) * n)

    @classmethod
    def infer(cls, size: int) -> "TensorSpace":
        """All-qubit space for a power-of-two ``size``."""
        if size < 2 or size & (size - 1):
            raise GateSplitError(f"cannot infer dims for size {size}: not a power of two")
        return cls.qubits(size.bit_length() - 1)

    def sub(self, indices: Sequence[int]) -> "TensorSpace":
        """Space of the given 1-based subsystems, in the given order."""
        return TensorSpace(tuple(self.dims[i - 1] for i in indices))


@dataclass(frozen=True)
class Cut:
    """Bipartition of the 1-based subsystem indices {1..n}."""

    left: tuple[int, ...]
    right: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "left", tuple(sorted(int(i) for i in self.left)))
        object.__setattr__(self, "right", tuple(sorted(int(i) for i in self.right)))
        if not self.left or not self.right:
            raise GateSplitError("both sides of a cut must be non-empty")
        if set(self.left) & set(self.right):
            raise GateSplitError(f"cut sides overlap: {self.left} | {self.right}")

    @classmethod
    def split(cls, n: int, k: int) -> "Cut":
        """The cut {1..k} | {k+1..n}."""
        return cls(tuple(range(1, k + 1)), tuple(range(k + 1, n + 1)))

    def validate(self, space: TensorSpace) -> None:
        if set(self.left) | set(self.right) != set(range(1, space.n + 1)):
            raise GateSplitError(
                f"cut {self.left} | {self.right} does not cover subsystems 1..{space.n}"
            )

    def __str__(self) -> str:
        side = lambda s: "{" + ",".join(map(str, s)) + "}"
        return f"{side(self.left)}|{side(self.right)}"


def kron(a, b) -> np.ndarray:
    a = as_matrix(a, name="a")
    b = as_matrix(b, name="b")
    rows, cols = a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]
    if max(rows, cols) > max_dim():
        raise SizeLimitError(f"kron result {rows}x{cols} exceeds maximum dimension {max_dim()}")
    return np.kron(a, b)


def kron_all(factors: Sequence) -> np.ndarray:
    """Kronecker product of a non-empty list, leftmost factor most significant."""
    if len(factors) == 0:
        raise GateSplitError("kron_all needs at least one factor")
    return reduce(kron, factors[1:], as_matrix(factors[0]))


def embed(local, space: TensorSpace, site: int) -> np.ndarray:
    """I ⊗ ... ⊗ local ⊗ ... ⊗ I with ``local`` at 1-based ``site``."""
    factors = [np.eye(d, dtype=np.complex128) for d in space.dims]
    factors[site - 1] = local
    return kron_all(factors)


def _check_square_on(m, space: TensorSpace) -> np.ndarray:
    m = as_matrix(m, square=True)
    if m.shape[0] != space.total:
        raise ShapeError(f"matrix size {m.shape[0]} != {space.total}")
    return m


def partial_trace(m, space: TensorSpace, keep: int) -> np.ndarray:
    """Trace out every subsystem except the 1-based ``keep``."""
    m = _check_square_on(m, space)
    if not 1 <= keep <= space.n:
        raise GateSplitError(f"keep={keep} out of range 1..{space.n}")
    n = space.n
    t = m.reshape(space.dims + space.dims)
    k = keep - 1
    # move kept row/col axes to the end, then trace remaining pairs
    order = [i for i in range(n) if i != k] + [n + i for i in range(n) if i != k] + [k, n + k]
    t = t.transpose(order)
    rest = space.total // space.dims[k]
    t = t.reshape(rest, rest, space.dims[k], space.dims[k])
    return np.einsum("iiab->ab", t)


def symmetrize(m, *, tol: float = HERM_TOL) -> np.ndarray:
    """Return (M + M^dag)/2, rejecting matrices that are not Hermitian within ``tol``."""
    m = as_matrix(m, square=True)
    dev = np.linalg.norm(m - m.conj().T)
    if dev > tol * max(1.0, np.linalg.norm(m)):
        raise ShapeError(f"matrix is not Hermitian: ||M - M^dag||_F = {dev:.3e}")
    return 0.5 * (m + m.conj().T)


def hermitian_eig(m) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and unitary eigenvector columns of a Hermitian matrix."""
    return np.linalg.eigh(symmetrize(m))


def matrix_exp_i(h) -> np.ndarray:
    """exp(iH) for Hermitian H, by spectral calculus."""
    w, v = hermitian_eig(h)
    return (v * np.exp(1j * w)) @ v.conj().T


def norm(m, kind: str = "operator", p: float | None = None) -> float:
    """Cross norm of ``m``.

    ``kind`` is one of ``operator`` (largest singular value), ``frobenius``,
    ``trace`` or ``schatten`` (needs ``p >= 1``).  Short aliases ``op``,
    ``fro`` are accepted.
    """
    m = as_matrix(m)
    kind = {"op": "operator", "fro": "frobenius", "nuclear": "trace"}.get(kind, kind)
    if kind == "frobenius":
        return float(np.linalg.norm(m))
    sv = np.linalg.svd(m, compute_uv=False)
    if kind == "operator":
        return float(sv[0])
    if kind == "trace":
        return float(sv.sum())
    if kind == "schatten":
        if p is None or p < 1:
            raise GateSplitError(f"schatten norm needs p >= 1, got {p}")
        if math.isinf(p):
            return float(sv[0])
        return float(np.sum(sv**p) ** (1.0 / p))
    raise GateSplitError(f"unknown norm kind {kind!r}")


def reshuffle(u, space: TensorSpace, cut: Cut) -> np.ndarray:
    """Rearrange ``u`` so that A ⊗ B maps to vec(A) vec(B)^T across ``cut``.

    Rows index (row, col) pairs of the left subsystems, columns those of the
    right subsystems, both in row-major order.  The singular values of the
    result are the operator Schmidt coefficients of ``u``.
    """
    u = _check_square_on(u, space)
    cut.validate(space)
    n = space.n
    left = [i - 1 for i in cut.left]
    right = [i - 1 for i in cut.right]
    d_left = math.prod(space.dims[i] for i in left)
    d_right = math.prod(space.dims[i] for i in right)
    t = u.reshape(space.dims + space.dims)
    order = left + [n + i for i in left] + right + [n + i for i in right]
    return t.transpose(order).reshape(d_left * d_left, d_right * d_right)


def commutator(a, b) -> np.ndarray:
    a = as_matrix(a, square=True, name="a")
    b = as_matrix(b, square=True, name="b")
    if a.shape != b.shape:
        raise ShapeError(f"commutator shape mismatch: {a.shape} vs {b.shape}")
    return a @ b - b @ a


def permute_subsystems(m, space: TensorSpace, order: Sequence[int]) -> np.ndarray:
    """Reorder the tensor factors of square ``m``.

    ``order`` lists 1-based subsystems; position i of the result carries
    old subsystem ``order[i]``.
    """
    m = _check_square_on(m, space)
    perm = [i - 1 for i in order]
    if sorted(perm) != list(range(space.n)):
        raise GateSplitError(f"{tuple(order)} is not a permutation of 1..{space.n}")
    n = space.n
    t = m.reshape(space.dims + space.dims).transpose(perm + [n + i for i in perm])
    return t.reshape(space.total, space.total)
