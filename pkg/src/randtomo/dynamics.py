"""Control systems and unitary propagation under random control fields.

The Hamiltonian is H(t) = H0 + f(t) Hc with a scalar field f. Two concrete
systems are provided:

* a d-level chain with nearest-neighbor hopping of strength h and an energy
  shift g on the first level as the control,
* an Ising chain of N spins with transverse + longitudinal field (strength h)
  and a local x control of strength g on the first spin.

Two field families are supported: piecewise-constant values on segments of
length dt (i.i.d. uniform on [-1, 1]), and a truncated Fourier series
f(t) = sum_k F_k cos(w_k t + phi_k) with sum_k F_k = 1.

Propagation multiplies exact per-segment exponentials exp(-i H_j tau_j)
computed by Hermitian eigendecomposition, so piecewise-constant fields incur
no integrator error at all. Fourier fields are discretized by a zero-order
hold with a caller-supplied step; halving the step changes the final unitary
at first order, which is validated by self-convergence tests rather than an
analytic error bound.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import (
    DimensionMismatchError,
    InvalidDimensionError,
    TimeOutOfRangeError,
)
from .numerics import ComplexMatrix, require_hermitian
from .bases import PAULIS


@dataclass(frozen=True)
class ControlSystem:
    """Drift/control Hamiltonian pair; both Hermitian, same dimension."""

    drift: np.ndarray
    control: np.ndarray

    def __post_init__(self):
        drift = require_hermitian(self.drift)
        control = require_hermitian(self.control)
        if drift.shape != control.shape:
            raise DimensionMismatchError(
                f"drift {drift.shape} and control {control.shape} differ in shape"
            )
        object.__setattr__(self, "drift", drift)
        object.__setattr__(self, "control", control)

    @property
    def dim(self) -> int:
        return self.drift.shape[0]


@dataclass(frozen=True)
class PiecewiseConstantField:
    """f(t) constant on consecutive segments of length dt; support [0, n*dt]."""

    values: np.ndarray
    dt: float

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size == 0:
            raise ValueError("values must be a non-empty 1-d array")
        if np.any(np.abs(values) > 1.0 + 1e-12):
            raise ValueError("piecewise field values must lie in [-1, 1]")
        if not self.dt > 0:
            raise ValueError("segment length dt must be positive")
        object.__setattr__(self, "values", values)

    @property
    def support(self) -> float:
        return self.dt * len(self.values)


@dataclass(frozen=True)
class TruncatedFourierField:
    """f(t) = sum_k F_k cos(w_k t + phi_k) with sum F_k = 1; support unbounded."""

    amplitudes: np.ndarray
    frequencies: np.ndarray
    phases: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=float)
        freqs = np.asarray(self.frequencies, dtype=float)
        phases = np.mod(np.asarray(self.phases, dtype=float), 2.0 * np.pi)
        if not (amps.shape == freqs.shape == phases.shape) or amps.ndim != 1:
            raise ValueError("amplitudes/frequencies/phases must be equal-length 1-d arrays")
        if abs(amps.sum() - 1.0) > 1e-12:
            raise ValueError(f"amplitudes must sum to 1, got {amps.sum()!r}")
        if np.any(freqs < 0):
            raise ValueError("frequencies must be non-negative")
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "frequencies", freqs)
        object.__setattr__(self, "phases", phases)

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        vals = np.cos(np.multiply.outer(t, self.frequencies) + self.phases) @ self.amplitudes
        return vals if vals.ndim else float(vals)


ControlField = PiecewiseConstantField | TruncatedFourierField


@dataclass(frozen=True)
class PropagatorTrace:
    """Unitaries U(t) recorded at strictly increasing sample times."""

    times: np.ndarray
    unitaries: np.ndarray  # shape (n_times, d, d)


def multilevel_system(d: int, h: float, g: float) -> ControlSystem:
    """d-level chain: hopping h between adjacent levels, control g|1><1|."""
    if d < 2:
        raise InvalidDimensionError(f"multilevel system needs d >= 2, got {d}")
    if not h > 0:
        raise ValueError("hopping strength h must be positive")
    drift = np.zeros((d, d), dtype=complex)
    idx = np.arange(d - 1)
    drift[idx, idx + 1] = h
    drift[idx + 1, idx] = h
    control = np.zeros((d, d), dtype=complex)
    control[0, 0] = g
    return ControlSystem(drift=drift, control=control)


def _site_op(op: np.ndarray, site: int, n_spins: int) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for m in range(n_spins):
        out = np.kron(out, op if m == site else np.eye(2))
    return out


def ising_system(n_spins: int, h: float, g: float) -> ControlSystem:
    """Ising chain with transverse+longitudinal field h; control g sigma_x on spin 1.

    H0 = h [ sum_n sz_n sz_{n+1} + sum_n (sx_n + sz_n) ].
    """
    if n_spins < 2:
        raise InvalidDimensionError(f"Ising chain needs N >= 2 spins, got {n_spins}")
    if not h > 0:
        raise ValueError("field strength h must be positive")
    dim = 2**n_spins
    sx, sz = PAULIS[1], PAULIS[3]
    drift = np.zeros((dim, dim), dtype=complex)
    for n in range(n_spins - 1):
        drift += _site_op(sz, n, n_spins) @ _site_op(sz, n + 1, n_spins)
    for n in range(n_spins):
        drift += _site_op(sx, n, n_spins) + _site_op(sz, n, n_spins)
    drift *= h
    control = g * _site_op(sx, 0, n_spins)
    return ControlSystem(drift=drift, control=control)


def sample_piecewise_field(
    n_segments: int, dt: float, rng: np.random.Generator
) -> PiecewiseConstantField:
    """Segment values i.i.d. uniform on [-1, 1], no temporal correlations."""
    if n_segments < 1:
        raise ValueError("need at least one segment")
    return PiecewiseConstantField(values=rng.uniform(-1.0, 1.0, n_segments), dt=dt)


def sample_fourier_field(
    n_terms: int, omega_max: float, rng: np.random.Generator
) -> TruncatedFourierField:
    """Uniform amplitudes normalized to sum 1; w_k ~ U[0, omega_max]; phases U[0, 2 pi)."""
    if n_terms < 1:
        raise ValueError("need at least one Fourier term")
    if not omega_max > 0:
        raise ValueError("omega_max must be positive")
    amps = rng.random(n_terms)
    amps /= amps.sum()
    freqs = rng.uniform(0.0, omega_max, n_terms)
    phases = rng.uniform(0.0, 2.0 * np.pi, n_terms)
    return TruncatedFourierField(amplitudes=amps, frequencies=freqs, phases=phases)


def _check_sample_times(sample_times, support: float | None) -> np.ndarray:
    times = np.asarray(sample_times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("sample_times must be a non-empty 1-d array")
    if np.any(np.diff(times) <= 0):
        raise ValueError("sample_times must be strictly increasing")
    if times[0] < 0:
        raise TimeOutOfRangeError(f"negative sample time {times[0]!r}")
    if support is not None:
        tol = 1e-9 * max(1.0, support)
        if times[-1] > support + tol:
            raise TimeOutOfRangeError(
                f"sample time {times[-1]!r} exceeds field support {support!r}"
            )
        times = np.minimum(times, support)
    return times


def propagate_values(
    system: ControlSystem,
    values: np.ndarray,
    edges: np.ndarray,
    sample_times: np.ndarray,
) -> np.ndarray:
    """Core product-of-exponentials walker over a shared hold grid.

    values: (n_fields, n_intervals) field value per interval per field;
    edges: (n_intervals + 1,) increasing interval edges starting at 0;
    sample_times: strictly increasing, each equal to some edge (or 0).
    Returns unitaries of shape (n_times, n_fields, d, d).
    """
    h0, hc = system.drift, system.control
    d = system.dim
    values = np.atleast_2d(np.asarray(values, dtype=float))
    n_fields = values.shape[0]
    # Refine the hold grid so every sample time is an interval edge; each
    # refined interval inherits the value of the hold interval containing it.
    refined = np.unique(np.concatenate([edges, sample_times]))
    seg_idx = np.clip(np.searchsorted(edges, refined[:-1], side="right") - 1, 0, values.shape[1] - 1)
    out = np.empty((len(sample_times), n_fields, d, d), dtype=complex)
    record_at = {t: i for i, t in enumerate(sample_times)}
    u = np.broadcast_to(np.eye(d, dtype=complex), (n_fields, d, d)).copy()
    if refined[0] in record_at:
        out[record_at[refined[0]]] = u
    for m in range(len(refined) - 1):
        a, b = refined[m], refined[m + 1]
        if a >= sample_times[-1]:
            break
        ham = h0[None, :, :] + values[:, seg_idx[m], None, None] * hc[None, :, :]
        w, v = np.linalg.eigh(ham)
        step = (v * np.exp(-1j * w * (b - a))[:, None, :]) @ v.conj().transpose(0, 2, 1)
        u = step @ u
        if b in record_at:
            out[record_at[b]] = u
    return out


def _fourier_hold_grid(
    fields: list[TruncatedFourierField], t_max: float, step: float
) -> tuple[np.ndarray, np.ndarray]:
    """Zero-order-hold edges covering [0, t_max] and per-field values at left edges."""
    if not step > 0:
        raise ValueError("Fourier discretization step must be positive")
    n_steps = max(1, int(np.ceil(t_max / step - 1e-12)))
    edges = step * np.arange(n_steps + 1)
    lefts = edges[:-1]
    values = np.stack([f(lefts) for f in fields])
    return values, edges


def propagate(
    system: ControlSystem,
    field: ControlField,
    sample_times,
    step: float | None = None,
) -> PropagatorTrace:
    """Propagate U(t) under H0 + f(t) Hc and record it at the sample times.

    Piecewise-constant fields are propagated exactly; a sample time interior
    to a segment splits the segment (the field value is constant there, so
    no interpolation of U is involved). Fourier fields require the
    zero-order-hold step via ``step``.
    """
    if isinstance(field, PiecewiseConstantField):
        times = _check_sample_times(sample_times, field.support)
        edges = field.dt * np.arange(len(field.values) + 1)
        u = propagate_values(system, field.values[None, :], edges, times)
    elif isinstance(field, TruncatedFourierField):
        times = _check_sample_times(sample_times, None)
        if step is None:
            raise ValueError("Fourier propagation requires a discretization step")
        values, edges = _fourier_hold_grid([field], float(times[-1]) or step, step)
        u = propagate_values(system, values, edges, times)
    else:
        raise TypeError(f"unsupported field type {type(field)!r}")
    return PropagatorTrace(times=times, unitaries=u[:, 0])
