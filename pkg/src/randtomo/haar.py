"""Haar-distributed unitaries and Monte-Carlo checks of Haar moment identities.

Sampling uses the Ginibre + QR construction: fill a matrix with i.i.d.
standard complex Gaussians, take the QR decomposition, and absorb the phases
of diag(R) into Q so that the R diagonal is real-positive. Without that
phase correction the Q factor is *not* Haar-distributed.

Reproducibility is seed-path based: an :class:`RngSeed` is a (seed, stream)
pair, and independent substreams are derived by hashing a path of labels
into a fresh stream index. Ensembles keyed by (seed, trial index) are
therefore bit-reproducible under any parallel schedule.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import InvalidDimensionError
from .numerics import ComplexMatrix

_U64 = 2**64


def _fold_stream(stream: int, path: tuple) -> int:
    """Collapse (stream, *path) into a new 64-bit stream index."""
    h = hashlib.blake2b(digest_size=8)
    h.update(int(stream).to_bytes(8, "little"))
    for part in path:
        h.update(repr(part).encode("utf-8"))
        h.update(b"\x00")
    return int.from_bytes(h.digest(), "little")


@dataclass(frozen=True)
class RngSeed:
    """(seed, stream) pair that fully determines a random sequence."""

    seed: int
    stream: int = 0

    def __post_init__(self):
        if not (0 <= self.seed < _U64 and 0 <= self.stream < _U64):
            raise ValueError("seed and stream must be unsigned 64-bit integers")

    def child(self, *path) -> "RngSeed":
        """Derived seed with a stream index hashed from (stream, *path)."""
        return RngSeed(self.seed, _fold_stream(self.stream, path))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream,))
        return np.random.Generator(np.random.PCG64(ss))


def sample_ginibre(d: int, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """i.i.d. standard complex Gaussian matrices, shape (size, d, d) or (d, d).

    Real and imaginary parts are drawn interleaved per entry, so the k-th
    matrix of a batch equals the k-th matrix of k single draws from the same
    generator state.
    """
    pair = rng.standard_normal((1 if size is None else size, d, d, 2))
    g = (pair[..., 0] + 1j * pair[..., 1]) / np.sqrt(2.0)
    return g if size is not None else g[0]


def sample_haar(d: int, rng: np.random.Generator, size: int | None = None) -> ComplexMatrix:
    """Haar-random unitaries of dimension d (a stack of them if size is given)."""
    if d < 2:
        raise InvalidDimensionError(f"Haar sampling needs d >= 2, got {d}")
    g = sample_ginibre(d, rng, size=size if size is not None else 1)
    q, r = np.linalg.qr(g)
    diag = r[:, np.arange(d), np.arange(d)]
    q *= (diag / np.abs(diag))[:, None, :]
    return q if size is not None else q[0]


def haar_moment2_exact(d: int, i: int, j: int, k: int, l: int) -> float:
    """E[U_ij U*_kl] over the Haar measure: delta_ik delta_jl / d."""
    return (1.0 / d) if (i == k and j == l) else 0.0


def haar_moment4_exact(d: int, indices: tuple[int, int, int, int, int, int, int, int]) -> float:
    """E[U_ij U_kl U*_i'j' U*_k'l'] over the Haar measure.

    indices = (i, j, k, l, ip, jp, kp, lp). The closed form is a sum of two
    Kronecker-delta groups weighted by 1/(d^2-1) minus two cross groups
    weighted by 1/(d(d^2-1)).
    """
    i, j, k, l, ip, jp, kp, lp = indices
    direct = int(i == ip and k == kp and j == jp and l == lp) + int(
        i == kp and k == ip and j == lp and l == jp
    )
    crossed = int(i == ip and k == kp and j == lp and l == jp) + int(
        i == kp and k == ip and j == jp and l == lp
    )
    return direct / (d * d - 1.0) - crossed / (d * (d * d - 1.0))


def _estimate(values: np.ndarray) -> tuple[complex, float]:
    """Mean and standard error of a complex-valued Monte-Carlo sample."""
    n = len(values)
    mean = complex(values.mean())
    var = np.var(values.real, ddof=1) + np.var(values.imag, ddof=1)
    return mean, float(np.sqrt(var / n))


def haar_moment2_estimate(
    d: int,
    indices: tuple[int, int, int, int],
    n_samples: int,
    rng: np.random.Generator,
) -> tuple[complex, float]:
    """Monte-Carlo estimate (mean, stderr) of E[U_ij U*_kl]; 0-based indices."""
    if n_samples < 100:
        raise ValueError("need at least 100 samples for a meaningful estimate")
    i, j, k, l = indices
    u = sample_haar(d, rng, size=n_samples)
    return _estimate(u[:, i, j] * u[:, k, l].conj())


def haar_moment4_estimate(
    d: int,
    indices: tuple[int, int, int, int, int, int, int, int],
    n_samples: int,
    rng: np.random.Generator,
) -> tuple[complex, float]:
    """Monte-Carlo estimate (mean, stderr) of E[U_ij U_kl U*_i'j' U*_k'l']."""
    if n_samples < 100:
        raise ValueError("need at least 100 samples for a meaningful estimate")
    i, j, k, l, ip, jp, kp, lp = indices
    u = sample_haar(d, rng, size=n_samples)
    vals = u[:, i, j] * u[:, k, l] * u[:, ip, jp].conj() * u[:, kp, lp].conj()
    return _estimate(vals)
