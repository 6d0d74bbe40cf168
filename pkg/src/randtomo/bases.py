"""Orthonormal traceless Hermitian operator bases and Bloch-vector conversion.

Two basis families are provided: the generalized Gell-Mann matrices for an
arbitrary dimension d, and normalized Pauli strings for d = 2^N. Both are
orthonormal under the Hilbert-Schmidt inner product, Tr(B_n B_m) = delta_nm,
so a density matrix decomposes as

    rho = 1/d + sum_n x_n B_n,      x_n = Tr(B_n rho),

with a real coefficient vector x of length d^2 - 1 (the generalized Bloch
vector). Element ordering is fixed (see the constructors) so that matrix
assembly downstream has a reproducible column convention.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidDimensionError, LengthMismatchError, NotDensityError
from .numerics import ComplexMatrix, RealVector, hermiticity_defect, policy

GELL_MANN = "gellmann"
PAULI_PRODUCT = "pauli-product"

_SQRT2 = np.sqrt(2.0)

#: single-qubit Pauli matrices, indexed 0=identity, 1=x, 2=y, 3=z
PAULIS = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


@dataclass(frozen=True)
class OperatorBasis:
    """Ordered basis of d^2 - 1 traceless Hermitian orthonormal matrices."""

    dim: int
    kind: str
    elements: np.ndarray  # shape (d^2 - 1, d, d)

    def __len__(self) -> int:
        return self.elements.shape[0]


def gellmann_basis(d: int) -> OperatorBasis:
    """Generalized Gell-Mann basis for dimension d.

    Ordering: symmetric pair matrices (j < k, lexicographic), then the
    antisymmetric ones in the same pair order, then the diagonal matrices
    l = 1..d-1. Normalization is 1/sqrt(2) for the pair matrices and
    1/sqrt(l(l+1)) for the diagonal ones, giving Tr(B_n B_m) = delta_nm.
    """
    if d < 2:
        raise InvalidDimensionError(f"Gell-Mann basis needs d >= 2, got {d}")
    elements = np.zeros((d * d - 1, d, d), dtype=complex)
    idx = 0
    pairs = [(j, k) for j in range(d) for k in range(j + 1, d)]
    for j, k in pairs:
        elements[idx, j, k] = 1 / _SQRT2
        elements[idx, k, j] = 1 / _SQRT2
        idx += 1
    for j, k in pairs:
        elements[idx, j, k] = -1j / _SQRT2
        elements[idx, k, j] = 1j / _SQRT2
        idx += 1
    for l in range(1, d):
        norm = 1.0 / np.sqrt(l * (l + 1.0))
        for n in range(l):
            elements[idx, n, n] = norm
        elements[idx, l, l] = -l * norm
        idx += 1
    return OperatorBasis(dim=d, kind=GELL_MANN, elements=elements)


def pauli_basis(n_spins: int) -> OperatorBasis:
    """Normalized Pauli-string basis for N spins (d = 2^N).

    Element n corresponds to the base-4 digits of n over (k_1, ..., k_N)
    in {0=identity, 1=x, 2=y, 3=z}, k_1 most significant, skipping the
    all-identity string; each product carries the factor 2^(-N/2).
    """
    if n_spins < 1:
        raise InvalidDimensionError(f"Pauli basis needs N >= 1 spins, got {n_spins}")
    d = 2**n_spins
    scale = 2.0 ** (-n_spins / 2.0)
    elements = np.empty((d * d - 1, d, d), dtype=complex)
    for n in range(1, 4**n_spins):
        digits = []
        v = n
        for _ in range(n_spins):
            digits.append(v % 4)
            v //= 4
        digits.reverse()  # digits[0] = k_1, most significant
        op = PAULIS[digits[0]]
        for k in digits[1:]:
            op = np.kron(op, PAULIS[k])
        elements[n - 1] = scale * op
    return OperatorBasis(dim=d, kind=PAULI_PRODUCT, elements=elements)


def gram_matrix(basis: OperatorBasis) -> np.ndarray:
    """Hilbert-Schmidt Gram matrix Tr(B_n B_m); identity for a valid basis."""
    flat = basis.elements.reshape(len(basis), -1)
    return np.real(flat @ flat.conj().T)


def bloch_to_density(x: RealVector, basis: OperatorBasis) -> ComplexMatrix:
    """rho = 1/d + x . B. Positivity is *not* enforced (see min_eigenvalue)."""
    x = np.asarray(x, dtype=float)
    if x.shape != (len(basis),):
        raise LengthMismatchError(
            f"Bloch vector length {x.shape} does not match basis size {len(basis)}"
        )
    d = basis.dim
    return np.eye(d, dtype=complex) / d + np.tensordot(x, basis.elements, axes=1)


def density_to_bloch(rho: ComplexMatrix, basis: OperatorBasis) -> RealVector:
    """Project a density matrix onto the basis: x_n = Tr(B_n rho)."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (basis.dim, basis.dim):
        raise NotDensityError(f"density shape {rho.shape} does not match d={basis.dim}")
    if hermiticity_defect(rho) > policy.density_atol:
        raise NotDensityError("matrix is not Hermitian within tolerance")
    if abs(np.trace(rho) - 1.0) > policy.density_atol:
        raise NotDensityError(f"trace {np.trace(rho):.6g} is not 1 within tolerance")
    # Symmetrize before projecting so the coefficients are real to rounding.
    rho_h = 0.5 * (rho + rho.conj().T)
    x = np.einsum("nij,ji->n", basis.elements, rho_h)
    return np.real(x)


def min_eigenvalue(rho: ComplexMatrix) -> float:
    """Smallest eigenvalue of a Hermitian matrix; positivity diagnostic."""
    return float(np.linalg.eigvalsh(rho)[0])
