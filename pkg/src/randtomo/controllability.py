"""Numerical controllability test via the dynamical Lie-algebra dimension.

A control system H(t) = H0 + f(t) Hc is fully controllable when the real
Lie algebra generated by i*H0 and i*Hc (all nested commutators and real
linear combinations) spans su(d), i.e. has dimension d^2 - 1 after trace
components are projected out. This module computes that dimension by
iterated commutation and rank-revealing orthonormalization, no symbolics.

Anti-Hermitian elements i*H are represented by their Hermitian parts H and
the bracket (H1, H2) -> -i[H1, H2], which is again Hermitian; the real span
is tracked in the 2 d^2-dimensional real coordinate space (Re H, Im H).

For the two-spin Ising chain with h = g = 1 the first nested commutators
are, up to scale, i(y1 + y1 z2), then i(z1 + z1 z2), and so on down to the
single-spin elements i z1 and i x2 from which the full algebra follows;
tests spot-check the first of these directions.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import ControlSystem

#: relative rank tolerance for accepting a new direction during closure
RANK_RTOL = 1e-9


@dataclass(frozen=True)
class LieClosureResult:
    dimension: int
    generators_used: int
    converged: bool


def _traceless(h: np.ndarray) -> np.ndarray:
    d = h.shape[0]
    return h - (np.trace(h) / d) * np.eye(d)


def _to_vec(h: np.ndarray) -> np.ndarray:
    return np.concatenate([h.real.ravel(), h.imag.ravel()])


def _to_mat(v: np.ndarray, d: int) -> np.ndarray:
    n = d * d
    return v[:n].reshape(d, d) + 1j * v[n:].reshape(d, d)


def bracket(h1: np.ndarray, h2: np.ndarray) -> np.ndarray:
    """Hermitian representative of [i h1, i h2]: -i (h1 h2 - h2 h1)."""
    return -1j * (h1 @ h2 - h2 @ h1)


def lie_closure_dimension(system: ControlSystem, max_depth: int = 16) -> LieClosureResult:
    """Dimension of the real Lie algebra generated by the drift and control.

    Sweeps nested commutators breadth-first: each sweep brackets every
    element added in the previous sweep against all current elements,
    orthonormalizes the batch against the span found so far, and keeps
    directions whose singular value exceeds RANK_RTOL relative to the
    (unit-normalized) candidate scale. Stops when a sweep adds nothing or
    the full su(d) dimension d^2 - 1 is reached; ``converged`` is False only
    when max_depth sweeps were exhausted first.
    """
    d = system.dim
    target = d * d - 1
    basis_mats: list[np.ndarray] = []
    q_rows: list[np.ndarray] = []

    def try_add(vectors: np.ndarray) -> int:
        """Project candidate row-vectors on the orthocomplement; extend the basis."""
        if vectors.size == 0:
            return 0
        norms = np.linalg.norm(vectors, axis=1)
        vectors = vectors[norms > 1e-12] / norms[norms > 1e-12, None]
        if vectors.size == 0:
            return 0
        if q_rows:
            q = np.vstack(q_rows)
            vectors = vectors - (vectors @ q.T) @ q
        _, s, vt = np.linalg.svd(vectors, full_matrices=False)
        keep = s > RANK_RTOL * np.sqrt(len(vectors))
        added = 0
        for row in vt[keep]:
            if q_rows:  # second orthogonalization pass for numerical hygiene
                q = np.vstack(q_rows)
                row = row - (row @ q.T) @ q
            nrm = np.linalg.norm(row)
            if nrm < 1e-10:
                continue
            row = row / nrm
            q_rows.append(row)
            basis_mats.append(_to_mat(row, d))
            added += 1
        return added

    seeds = np.stack([_to_vec(_traceless(system.drift)), _to_vec(_traceless(system.control))])
    try_add(seeds)
    generators_used = len(basis_mats)

    frontier_start = 0
    converged = False
    chunk = 4096  # flush candidate batches to bound memory on large algebras
    for _ in range(max_depth):
        frontier_end = len(basis_mats)
        candidates: list[np.ndarray] = []
        added = 0
        for j in range(frontier_start, frontier_end):
            for i in range(j):
                candidates.append(_to_vec(bracket(basis_mats[i], basis_mats[j])))
                if len(candidates) >= chunk:
                    added += try_add(np.asarray(candidates))
                    candidates.clear()
        if candidates:
            added += try_add(np.asarray(candidates))
        frontier_start = frontier_end
        if len(basis_mats) >= target or added == 0:
            converged = True
            break
    return LieClosureResult(
        dimension=len(basis_mats), generators_used=generators_used, converged=converged
    )
