"""Seeded Monte-Carlo ensembles: scaling law, time traces, and checks.

Every ensemble derives one RNG substream per trial from the base seed and a
label path, so results are bit-reproducible for any worker count; trials are
aggregated in trial-index order regardless of completion order. Condition
numbers that come out infinite (numerically singular tomography matrices,
routine at very short control times) are counted and excluded per time
point rather than silently dropped.

Two statistics are reported per time point: the mean of log(kappa) over
finite trials, and the log of the mean of kappa (computed stably from the
log values). They differ noticeably at small dimension, where the kappa
distribution is heavy-tailed.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache, partial
from multiprocessing import get_context
from typing import Callable, Sequence

import numpy as np
from scipy.special import logsumexp

from . import dynamics as dyn
from .bases import GELL_MANN, PAULI_PRODUCT, PAULIS, OperatorBasis, gellmann_basis, pauli_basis
from .distributions import (
    ReferenceDensity,
    case1_reference,
    case2_reference,
    expected_logkappa_haar,
    ks_critical_value,
    ks_statistic,
)
from .errors import InvalidDimensionError, PlateauNotFoundError
from .haar import RngSeed, sample_haar
from .tomography import (
    TomographySystem,
    add_measurement_noise,
    assemble_A,
    condition_number,
    log_kappa,
    measurement_vector,
    reconstruct,
)
from .bases import bloch_to_density, min_eigenvalue


def _map_trials(fn: Callable[[int], object], n_trials: int, workers: int) -> list:
    """Apply fn to 0..n_trials-1, in order; optionally on a process pool."""
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers, mp_context=get_context("spawn")) as ex:
            return list(ex.map(fn, range(n_trials), chunksize=max(1, n_trials // (4 * workers))))
    return [fn(t) for t in range(n_trials)]


@lru_cache(maxsize=32)
def _basis_and_observable(kind: str, d: int) -> tuple[OperatorBasis, np.ndarray]:
    """Basis plus the observable conventionally paired with it.

    Gell-Mann basis measures the first-level population |1><1|; the
    Pauli-product basis measures sigma_z on the first spin.
    """
    if kind == GELL_MANN:
        m = np.zeros((d, d), dtype=complex)
        m[0, 0] = 1.0
        return gellmann_basis(d), m
    if kind == PAULI_PRODUCT:
        n_spins = d.bit_length() - 1
        if 2**n_spins != d:
            raise InvalidDimensionError(f"Pauli-product basis needs d = 2^N, got {d}")
        m = PAULIS[3].astype(complex)
        for _ in range(n_spins - 1):
            m = np.kron(m, np.eye(2))
        return pauli_basis(n_spins), m
    raise InvalidDimensionError(f"unknown basis kind {kind!r}")


# ---------------------------------------------------------------------------
# Haar scaling (asymptotic law)

@dataclass(frozen=True)
class HaarScalingSpec:
    d: int
    kind: str
    seed: int
    stream: int = 0


def _haar_scaling_trial(spec: HaarScalingSpec, trial: int) -> float:
    basis, m = _basis_and_observable(spec.kind, spec.d)
    rng = RngSeed(spec.seed, spec.stream).child("haar-scaling", spec.kind, spec.d, trial).generator()
    u = sample_haar(spec.d, rng, size=spec.d**2 - 1)
    return log_kappa(assemble_A(TomographySystem(m, basis, u)))


def run_haar_scaling(
    dims: Sequence[int],
    kinds: Sequence[str],
    n_trials: int,
    seed: int,
    stream: int = 0,
    workers: int = 1,
) -> list[dict]:
    """Mean log(kappa) over Haar ensembles versus the asymptotic prediction.

    One row per (d, basis kind) with the ensemble mean, its standard error,
    the log-mean-kappa alternative statistic, and the deviation from
    log(d^2-1) + 1.537.
    """
    rows = []
    for d in dims:
        for kind in kinds:
            if kind == PAULI_PRODUCT and (d & (d - 1)) != 0:
                continue  # Pauli strings need d = 2^N
            spec = HaarScalingSpec(d=d, kind=kind, seed=seed, stream=stream)
            vals = np.asarray(_map_trials(partial(_haar_scaling_trial, spec), n_trials, workers))
            finite = np.isfinite(vals)
            v = vals[finite]
            pred = expected_logkappa_haar(d)
            mean = float(v.mean())
            rows.append(
                {
                    "basis": kind,
                    "d": d,
                    "n_trials": n_trials,
                    "n_excluded": int((~finite).sum()),
                    "mean_logkappa": mean,
                    "stderr": float(v.std(ddof=1) / math.sqrt(len(v))),
                    "log_mean_kappa": float(logsumexp(v) - math.log(len(v))),
                    "prediction": pred,
                    "deviation": mean - pred,
                }
            )
    return rows


# ---------------------------------------------------------------------------
# Time traces under random control fields

@dataclass(frozen=True)
class TimeTraceSpec:
    """Frozen per-ensemble parameters handed to worker processes."""

    system: str  # "multilevel" | "ising"
    size: int  # d for multilevel, N for ising
    h: float
    g: float
    dt: float
    field: str  # "piecewise" | "fourier"
    fourier_terms: int
    omega_max: float
    times: tuple[float, ...]
    trajectory: bool
    seed: int
    stream: int = 0

    @property
    def dim(self) -> int:
        return self.size if self.system == "multilevel" else 2**self.size


@dataclass(frozen=True)
class EnsembleResult:
    """Per-time-point statistics of log(kappa) over seeded trials."""

    times: np.ndarray
    mean_logkappa: np.ndarray
    std_error: np.ndarray
    log_mean_kappa: np.ndarray
    n_finite: np.ndarray
    n_excluded: np.ndarray
    trial_streams: tuple[int, ...]
    n_realizations: int


@dataclass(frozen=True)
class PlateauEstimate:
    t_p: float
    slope_ratio: float


@lru_cache(maxsize=32)
def _trace_fixtures(spec: TimeTraceSpec):
    if spec.system == "multilevel":
        system = dyn.multilevel_system(spec.size, spec.h, spec.g)
        basis, m = _basis_and_observable(GELL_MANN, spec.size)
    elif spec.system == "ising":
        system = dyn.ising_system(spec.size, spec.h, spec.g)
        basis, m = _basis_and_observable(PAULI_PRODUCT, 2**spec.size)
    else:
        raise InvalidDimensionError(f"unknown system {spec.system!r}")
    return system, basis, m


def _trial_seed(spec: TimeTraceSpec, trial: int) -> RngSeed:
    return RngSeed(spec.seed, spec.stream).child(
        "time-trace", spec.system, spec.size, spec.field, "traj" if spec.trajectory else "indep", trial
    )


def _draw_hold_values(
    spec: TimeTraceSpec, rng: np.random.Generator, n_fields: int, t_max: float
) -> tuple[np.ndarray, np.ndarray]:
    """Per-field hold values and shared hold-grid edges covering [0, t_max]."""
    if spec.field == "piecewise":
        n_seg = max(1, int(math.ceil(t_max / spec.dt - 1e-12)))
        values = rng.uniform(-1.0, 1.0, (n_fields, n_seg))
        edges = spec.dt * np.arange(n_seg + 1)
        return values, edges
    if spec.field == "fourier":
        fields = [
            dyn.sample_fourier_field(spec.fourier_terms, spec.omega_max, rng)
            for _ in range(n_fields)
        ]
        # Zero-order hold at a tenth of the piecewise segment length.
        return dyn._fourier_hold_grid(fields, t_max, spec.dt / 10.0)
    raise InvalidDimensionError(f"unknown field kind {spec.field!r}")


def _time_trace_trial(spec: TimeTraceSpec, trial: int) -> np.ndarray:
    system, basis, m = _trace_fixtures(spec)
    n_fields = spec.dim**2 - 1
    times = np.asarray(spec.times)
    rng = _trial_seed(spec, trial).generator()
    out = np.empty(len(times))
    if not spec.trajectory:
        values, edges = _draw_hold_values(spec, rng, n_fields, float(times[-1]))
        u = dyn.propagate_values(system, values, edges, times)
        for i in range(len(times)):
            out[i] = log_kappa(assemble_A(TomographySystem(m, basis, u[i])))
    else:
        # One trajectory; the n-th unitary is the evolution up to n t / (d^2-1).
        values, edges = _draw_hold_values(spec, rng, 1, float(times[-1]))
        for i, t in enumerate(times):
            taus = t * np.arange(1, n_fields + 1) / n_fields
            u = dyn.propagate_values(system, values, edges, taus)[:, 0]
            out[i] = log_kappa(assemble_A(TomographySystem(m, basis, u)))
    return out


def run_time_trace(spec: TimeTraceSpec, n_realizations: int, workers: int = 1) -> EnsembleResult:
    """Ensemble of log(kappa) traces for one system size.

    Default mode draws d^2 - 1 independent control fields per realization
    and evolves each to every sample time; trajectory mode samples the
    unitaries at successive times of a single random evolution.
    """
    rows = _map_trials(partial(_time_trace_trial, spec), n_realizations, workers)
    arr = np.stack(rows)  # (R, T)
    finite = np.isfinite(arr)
    n_fin = finite.sum(axis=0)
    t_count = arr.shape[1]
    mean = np.full(t_count, np.nan)
    err = np.full(t_count, np.nan)
    log_mean = np.full(t_count, np.nan)
    for i in range(t_count):
        v = arr[finite[:, i], i]
        if len(v) == 0:
            continue
        mean[i] = v.mean()
        log_mean[i] = logsumexp(v) - math.log(len(v))
        if len(v) >= 2:
            err[i] = v.std(ddof=1) / math.sqrt(len(v))
    return EnsembleResult(
        times=np.asarray(spec.times),
        mean_logkappa=mean,
        std_error=err,
        log_mean_kappa=log_mean,
        n_finite=n_fin,
        n_excluded=n_realizations - n_fin,
        trial_streams=tuple(_trial_seed(spec, t).stream for t in range(n_realizations)),
        n_realizations=n_realizations,
    )


def plateau_estimate(
    result: EnsembleResult,
    window: int = 5,
    threshold: float = 0.2,
    persistence: int = 5,
    min_finite_fraction: float = 0.5,
) -> PlateauEstimate:
    """First plateau of a mean-log-kappa trace.

    Slopes are least-squares fits over forward windows of ``window`` grid
    points. The initial-drop slope is the steepest (most negative) one; the
    plateau starts at the first later window whose slope magnitude stays
    below ``threshold`` times the initial drop for ``persistence``
    consecutive windows. Time points with too few finite trials (or no mean
    at all) are ignored.
    """
    valid = np.isfinite(result.mean_logkappa) & (
        result.n_finite >= min_finite_fraction * result.n_realizations
    )
    times = result.times[valid]
    mean = result.mean_logkappa[valid]
    n = len(times)
    if n < window + persistence:
        raise PlateauNotFoundError("trace too short for the detection windows")
    n_slopes = n - window + 1
    slopes = np.empty(n_slopes)
    for i in range(n_slopes):
        x = times[i : i + window]
        y = mean[i : i + window]
        xc = x - x.mean()
        slopes[i] = float(xc @ (y - y.mean()) / (xc @ xc))
    i_drop = int(np.argmin(slopes))
    drop = slopes[i_drop]
    if drop >= 0:
        raise PlateauNotFoundError("no initial drop in the trace")
    theta = threshold * abs(drop)
    flat = np.abs(slopes) < theta
    for j in range(i_drop + 1, n_slopes - persistence + 1):
        if flat[j : j + persistence].all():
            ratio = float(np.mean(np.abs(slopes[j : j + persistence])) / abs(drop))
            return PlateauEstimate(t_p=float(times[j]), slope_ratio=ratio)
    raise PlateauNotFoundError("no plateau within the simulated window")


# ---------------------------------------------------------------------------
# Entry-distribution checks

@dataclass(frozen=True)
class DistCheckCase:
    """One goodness-of-fit (or negative-control) case."""

    kind: str  # "case1" | "case2" | "negative"
    n: int = 1  # diagonal index for case 1
    dim: int = 32  # Haar dimension for case 1
    spins: int = 3  # N for case 2
    n_samples: int = 10000
    alpha: float = 0.01


def _case1_samples(case: DistCheckCase, rng: np.random.Generator) -> np.ndarray:
    """nu_n = d * Tr(|1><1| U B_n^diag U^dag) from Haar draws, via first-row sums."""
    d, n = case.dim, case.n
    if not 1 <= n <= d - 1:
        raise InvalidDimensionError(f"diagonal index n={n} needs 1 <= n <= d-1={d - 1}")
    u = sample_haar(d, rng, size=case.n_samples)
    row2 = np.abs(u[:, 0, :]) ** 2
    return d * (row2[:, :n].sum(axis=1) - n * row2[:, n]) / math.sqrt(n * (n + 1.0))


def _case2_samples(case: DistCheckCase, rng: np.random.Generator) -> np.ndarray:
    """nu = Tr(sigma_z1 U sigma_z1 U^dag) from Haar draws of dimension 2^N."""
    d = 2**case.spins
    signs = np.concatenate([np.ones(d // 2), -np.ones(d // 2)])
    u = sample_haar(d, rng, size=case.n_samples)
    return np.einsum("a,tab,b->t", signs, np.abs(u) ** 2, signs)


def run_distribution_check(
    cases: Sequence[DistCheckCase], seed: int, stream: int = 0
) -> list[dict]:
    """KS tests of sampled tomography-matrix entries against the references.

    The negative control feeds uniform noise to the case-2 reference and
    "passes" when the test *rejects* it.
    """
    rows = []
    for idx, case in enumerate(cases):
        rng = RngSeed(seed, stream).child("dist-check", case.kind, idx).generator()
        expect_reject = False
        density: ReferenceDensity
        if case.kind == "case1":
            samples = _case1_samples(case, rng)
            density = case1_reference(case.n)
            name = f"case1-n{case.n}-d{case.dim}"
        elif case.kind == "case2":
            samples = _case2_samples(case, rng)
            density = case2_reference(case.spins)
            name = f"case2-N{case.spins}"
        elif case.kind == "negative":
            samples = rng.uniform(-2.0, 2.0, case.n_samples)
            density = case2_reference(case.spins)
            name = f"negative-uniform-vs-case2-N{case.spins}"
            expect_reject = True
        else:
            raise InvalidDimensionError(f"unknown distribution check kind {case.kind!r}")
        stat = ks_statistic(samples, density)
        crit = ks_critical_value(case.n_samples, case.alpha)
        ok = (stat > crit) if expect_reject else (stat <= crit)
        rows.append(
            {
                "test": name,
                "n_samples": case.n_samples,
                "alpha": case.alpha,
                "statistic": stat,
                "critical": crit,
                "passed": ok,
            }
        )
    return rows


# ---------------------------------------------------------------------------
# Reconstruction robustness demo

def _random_physical_bloch(basis: OperatorBasis, rng: np.random.Generator, margin: float) -> np.ndarray:
    """Random Bloch vector shrunk until all eigenvalues of rho exceed margin.

    Shrinking toward the maximally mixed state is safe because the minimum
    eigenvalue of 1/d + s * (x . B) is concave in s.
    """
    d = basis.dim
    x = rng.standard_normal(len(basis))
    x /= np.linalg.norm(x) * d  # start at a moderate radius
    lam = min_eigenvalue(bloch_to_density(x, basis))
    floor = margin / d
    if lam < floor:
        x *= (1.0 / d - floor) / (1.0 / d - lam)
    return x


def run_reconstruct_demo(
    d: int,
    noise_levels: Sequence[float],
    n_trials: int,
    seed: int,
    stream: int = 0,
    workers: int = 1,
) -> list[dict]:
    """Noisy-reconstruction trials against the condition-number error bound.

    Per trial: a Haar tomography system and a random physical state; per
    noise level sigma: reconstruct from noisy measurements and compare the
    relative error with kappa * ||eps|| / ||y|| (plus rounding slack).
    """
    spec = (d, tuple(float(s) for s in noise_levels), seed, stream)
    rows_nested = _map_trials(partial(_reconstruct_trial, spec), n_trials, workers)
    return [row for rows in rows_nested for row in rows]


def _reconstruct_trial(spec, trial: int) -> list[dict]:
    d, noise_levels, seed, stream = spec
    basis, m = _basis_and_observable(GELL_MANN, d)
    rng = RngSeed(seed, stream).child("reconstruct", d, trial).generator()
    u = sample_haar(d, rng, size=d**2 - 1)
    sys = TomographySystem(m, basis, u)
    a = assemble_A(sys)
    kappa = condition_number(a)
    x = _random_physical_bloch(basis, rng, margin=0.1)
    rho = bloch_to_density(x, basis)
    y = measurement_vector(sys, rho)
    x_norm = np.linalg.norm(x)
    y_norm = np.linalg.norm(y)
    rows = []
    for sigma in noise_levels:
        y_noisy = add_measurement_noise(y, sigma, rng)
        x_hat = reconstruct(a, y_noisy)
        rel_err = float(np.linalg.norm(x_hat - x) / x_norm)
        rel_noise = float(np.linalg.norm(y_noisy - y) / y_norm)
        bound = kappa * rel_noise * (1.0 + 1e-6)
        rows.append(
            {
                "sigma": sigma,
                "trial": trial,
                "kappa": kappa,
                "rel_error": rel_err,
                "rel_noise": rel_noise,
                "bound": bound,
                "ok": rel_err <= (1e-8 if sigma == 0.0 else bound),
            }
        )
    return rows


__all__ = [
    "DistCheckCase",
    "EnsembleResult",
    "HaarScalingSpec",
    "PlateauEstimate",
    "TimeTraceSpec",
    "plateau_estimate",
    "run_distribution_check",
    "run_haar_scaling",
    "run_reconstruct_demo",
    "run_time_trace",
]
