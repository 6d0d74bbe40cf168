"""Assembly of the tomography linear system and its condition number.

A single observable M measured after d^2 - 1 different unitary evolutions
U_n determines the Bloch vector x of a state through the linear system
A x = y with

    A_nm = Tr(M U_n B_m U_n^dagger),
    y_n  = Tr(M U_n rho U_n^dagger) - Tr(M)/d.

A is real for Hermitian M and B_m; it is assembled in complex arithmetic,
the imaginary residue is checked against the numeric policy, and the matrix
is stored real (the solve and the SVD are then real as well). The 2-norm
condition number kappa = s_max/s_min of A measures how strongly measurement
errors in y can be amplified in the reconstructed x; log(kappa) is the
figure of merit used throughout. A numerically singular A is reported as
kappa = +inf rather than as an exception, so ensemble code can count and
exclude such trials explicitly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bases import OperatorBasis
from .errors import DimensionMismatchError, NotDensityError
from .numerics import (
    RealVector,
    hermiticity_defect,
    policy,
    require_hermitian,
    solve_linear,
    svd_values,
)


@dataclass(frozen=True)
class TomographySystem:
    """Observable M, operator basis, and the d^2 - 1 evolution unitaries."""

    observable: np.ndarray
    basis: OperatorBasis
    unitaries: np.ndarray  # shape (d^2 - 1, d, d)

    def __post_init__(self):
        m = require_hermitian(self.observable)
        u = np.asarray(self.unitaries, dtype=complex)
        d = self.basis.dim
        if m.shape != (d, d):
            raise DimensionMismatchError(f"observable {m.shape} does not match d={d}")
        if u.shape != (d * d - 1, d, d):
            raise DimensionMismatchError(
                f"need {d * d - 1} unitaries of shape ({d},{d}), got {u.shape}"
            )
        object.__setattr__(self, "observable", m)
        object.__setattr__(self, "unitaries", u)


def assemble_A(sys: TomographySystem) -> np.ndarray:
    """Tomography matrix A_nm = Tr(M U_n B_m U_n^dagger), stored real.

    Row n uses unitary U_n, column m basis element B_m. Raises if the
    imaginary residue before truncation exceeds the numeric policy (which
    would indicate non-Hermitian inputs).
    """
    u = sys.unitaries
    m = sys.observable
    n = len(sys.basis)
    # V_n = U_n^dagger M U_n, batched; then A_nm = sum_ij V_n,ij conj(B_m,ij).
    v = np.matmul(u.conj().transpose(0, 2, 1), np.matmul(m[None, :, :], u))
    a = v.reshape(n, -1) @ sys.basis.elements.reshape(n, -1).conj().T
    residue = float(np.max(np.abs(a.imag))) if a.size else 0.0
    if residue > policy.imag_residue_atol:
        raise DimensionMismatchError(
            f"imaginary residue {residue:.3e} in A; inputs are not Hermitian enough"
        )
    return np.ascontiguousarray(a.real)


def measurement_vector(sys: TomographySystem, rho: np.ndarray) -> RealVector:
    """y_n = Tr(M U_n rho U_n^dagger) - Tr(M)/d for a trace-1 Hermitian rho."""
    rho = np.asarray(rho, dtype=complex)
    d = sys.basis.dim
    if rho.shape != (d, d):
        raise NotDensityError(f"state shape {rho.shape} does not match d={d}")
    if hermiticity_defect(rho) > policy.density_atol or abs(np.trace(rho) - 1.0) > policy.density_atol:
        raise NotDensityError("state is not a trace-1 Hermitian matrix within tolerance")
    u = sys.unitaries
    w = np.matmul(u, np.matmul(rho[None, :, :], u.conj().transpose(0, 2, 1)))
    y = w.reshape(len(sys.basis), -1) @ sys.observable.conj().ravel()
    offset = np.trace(sys.observable).real / d
    return y.real - offset


def add_measurement_noise(y: RealVector, sigma: float, rng: np.random.Generator) -> RealVector:
    """y + eps with eps i.i.d. normal(0, sigma^2)."""
    if sigma < 0:
        raise ValueError("noise level sigma must be non-negative")
    y = np.asarray(y, dtype=float)
    if sigma == 0.0:
        return y.copy()
    return y + sigma * rng.standard_normal(y.shape)


def reconstruct(a: np.ndarray, y: RealVector) -> RealVector:
    """Solve A x = y for the Bloch vector (raises SingularMatrixError)."""
    return solve_linear(a, y)


def condition_number(a: np.ndarray) -> float:
    """2-norm condition number s_max/s_min; +inf when A is numerically singular."""
    s = svd_values(np.asarray(a, dtype=float))
    if s[0] == 0.0 or s[-1] < policy.kappa_floor:
        return math.inf
    kappa = float(s[0] / s[-1])
    return kappa if math.isfinite(kappa) else math.inf


def log_kappa(a: np.ndarray) -> float:
    """Natural log of the condition number; +inf propagates."""
    kappa = condition_number(a)
    return math.log(kappa) if math.isfinite(kappa) else math.inf
