"""Dense complex linear-algebra kernel used by every other module.

Thin, checked wrappers around numpy's LAPACK bindings. The wrappers enforce
the numeric contracts the rest of the package relies on (Hermiticity,
unitarity, singularity cutoffs) and fail loudly instead of silently
returning garbage. All tolerances live in a single module-level
:class:`NumericPolicy` instance so they can be adjusted in one place.

Matrices are plain ``numpy.ndarray`` with dtype ``complex128`` (row-major);
real vectors are 1-d ``float64`` arrays. Everything here is a pure function
of its inputs and safe to call from independent workers.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotHermitianError, NotSquareError, SingularMatrixError

# Type aliases used in signatures throughout the package.
ComplexMatrix = np.ndarray
RealVector = np.ndarray


@dataclass
class NumericPolicy:
    """Global numeric tolerances (absolute unless stated otherwise)."""

    hermiticity_atol: float = 1e-12
    unitarity_atol: float = 1e-10
    density_atol: float = 1e-10
    imag_residue_atol: float = 1e-10
    #: relative cutoff s_min/s_max below which a matrix counts as singular
    singular_rcond: float = 1e-13
    #: absolute floor under which a singular value maps to an infinite
    #: condition number instead of an overflowing quotient
    kappa_floor: float = 1e-300


policy = NumericPolicy()


def require_square(a: ComplexMatrix) -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSquareError(f"expected a square matrix, got shape {a.shape}")
    return a


def hermiticity_defect(a: ComplexMatrix) -> float:
    """Largest entrywise deviation from A = A^dagger."""
    a = require_square(a)
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def require_hermitian(a: ComplexMatrix, atol: float | None = None) -> np.ndarray:
    a = require_square(np.asarray(a, dtype=complex))
    tol = policy.hermiticity_atol if atol is None else atol
    defect = hermiticity_defect(a)
    if defect > tol:
        raise NotHermitianError(f"Hermiticity defect {defect:.3e} exceeds {tol:.1e}")
    return a


def unitarity_defect(u: ComplexMatrix) -> float:
    """Largest entrywise deviation of U^dagger U from the identity."""
    u = require_square(u)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def hermitian_eig(a: ComplexMatrix) -> tuple[RealVector, ComplexMatrix]:
    """Eigendecomposition A = V diag(w) V^dagger of a Hermitian matrix.

    Eigenvalues are returned in ascending order; V is unitary.
    """
    a = require_hermitian(a)
    w, v = np.linalg.eigh(a)
    return w, v


def svd_values(a: ComplexMatrix) -> RealVector:
    """Singular values of a (rectangular) matrix, descending, non-negative."""
    return np.linalg.svd(np.asarray(a), compute_uv=False)


def expm_i_hermitian(h: ComplexMatrix, t: float) -> ComplexMatrix:
    """exp(-i H t) for Hermitian H, via eigendecomposition.

    The eigendecomposition route keeps the result unitary to machine
    precision for any t, which matters more here than raw speed.
    """
    w, v = hermitian_eig(h)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def solve_linear(a: ComplexMatrix, y: RealVector) -> RealVector:
    """Solve the real linear system A x = y.

    Raises SingularMatrixError when s_min < rcond * s_max, i.e. when the
    system is numerically rank-deficient at the policy cutoff.
    """
    a = require_square(np.asarray(a, dtype=float))
    y = np.asarray(y, dtype=float)
    if y.shape != (a.shape[0],):
        raise NotSquareError(f"rhs length {y.shape} does not match matrix {a.shape}")
    s = svd_values(a)
    if s[0] == 0.0 or s[-1] < policy.singular_rcond * s[0]:
        raise SingularMatrixError(
            f"matrix numerically singular: s_min/s_max = {s[-1] / s[0] if s[0] else 0.0:.3e}"
        )
    return np.linalg.solve(a, y)


def qr_unitary(g: ComplexMatrix) -> ComplexMatrix:
    """Unitary Q factor of G = QR with the R diagonal made real-positive.

    Plain QR is not unique; absorbing the phases of diag(R) into Q fixes the
    gauge. With Ginibre input this is exactly the correction that makes Q
    Haar-distributed.
    """
    g = require_square(np.asarray(g, dtype=complex))
    q, r = np.linalg.qr(g)
    diag = np.diagonal(r)
    absd = np.abs(diag)
    if np.min(absd) <= policy.singular_rcond * np.max(absd):
        raise SingularMatrixError("QR input is numerically singular")
    return q * (diag / absd)
