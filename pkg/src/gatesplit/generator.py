"""Unitary gates and their Hermitian generators, U = exp(i t H)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .linalg import (
    GateSplitError,
    TensorSpace,
    as_matrix,
    matrix_exp_i,
    symmetrize,
)

UNITARY_TOL = 1e-8


class ValidationError(GateSplitError, ValueError):
    """Input matrix violates a gate invariant (unitarity, size)."""


def _space_for(matrix: np.ndarray, space) -> TensorSpace:
    if space is None:
        return TensorSpace.infer(matrix.shape[0])
    if not isinstance(space, TensorSpace):
        space = TensorSpace(tuple(space))
    if matrix.shape[0] != space.total:
        raise ValidationError(f"matrix size {matrix.shape[0]} != {space.total}")
    return space


@dataclass(frozen=True, eq=False)
class UnitaryGate:
    """Dense unitary on a tensor-product space.

    Unitarity is checked on construction (``||U^dag U - I||_o <= 1e-8``)
    unless ``validate=False`` is passed.
    """

    matrix: np.ndarray
    space: TensorSpace

    def __init__(self, matrix, space=None, *, validate: bool = True):
        m = as_matrix(matrix, square=True)
        space = _space_for(m, space)
        if validate:
            dev = np.linalg.norm(m.conj().T @ m - np.eye(m.shape[0]), 2)
            if dev > UNITARY_TOL:
                raise ValidationError(f"matrix is not unitary: ||U^dag U - I||_o = {dev:.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "space", space)


@dataclass(frozen=True, eq=False)
class HermitianGenerator:
    """Self-adjoint H on a tensor-product space.

    ``principal`` marks generators whose eigenvalues all lie in (-pi, pi].
    """

    matrix: np.ndarray
    space: TensorSpace
    principal: bool = False

    def __init__(self, matrix, space=None, principal: bool = False):
        m = symmetrize(matrix)
        space = _space_for(m, space)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "principal", bool(principal))


def eigenphases(u: UnitaryGate) -> tuple[np.ndarray, np.ndarray]:
    """Eigenphases in (-pi, pi] and an orthonormal eigenbasis of ``u``.

    A unitary is normal, so its Schur form is diagonal; the complex Schur
    vectors give an orthonormal eigenbasis even for degenerate spectra.
    """
    t, z = scipy.linalg.schur(u.matrix, output="complex")
    theta = np.angle(np.diag(t))
    # np.angle returns [-pi, pi]; move -pi onto the closed end of the branch
    theta = np.where(theta <= -np.pi + 1e-15, np.pi, theta)
    return theta, z


def generator_of(u: UnitaryGate) -> HermitianGenerator:
    """Principal Hermitian generator H with u = exp(iH), eigenvalues in (-pi, pi]."""
    theta, z = eigenphases(u)
    h = (z * theta) @ z.conj().T
    return HermitianGenerator(h, u.space, principal=True)


def exp_of(h: HermitianGenerator, t: float = 1.0) -> UnitaryGate:
    """The gate exp(i t H)."""
    return UnitaryGate(matrix_exp_i(t * h.matrix), h.space)
