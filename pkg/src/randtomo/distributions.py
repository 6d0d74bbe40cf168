"""Reference densities for condition-number statistics and matrix entries.

Three families live here, each with a numerical cross-check:

* ``edelman_density`` — the limiting density of kappa/n for large n x n
  random matrices with independent standardized entries (Edelman 1988).
  Its log-mean, recomputed by quadrature in ``edelman_log_mean``, is the
  constant 1.537 entering ``expected_logkappa_haar``.
* ``case1_density`` / ``case2_density`` — closed-form densities of the
  rescaled tomography-matrix entries that arise when the entries of a
  Haar-random unitary are approximated by independent complex Gaussians.
  Case 1 (projector observable, diagonal Gell-Mann element) is a
  Gamma(n, sqrt(n(n+1))) minus Gamma(1, sqrt((n+1)/n)) difference with an
  incomplete-Gamma closed form; case 2 (Pauli-string basis) is the
  symmetric Bessel-type density of the difference of two
  Gamma(4^N/2, 2^N) variables, evaluated in log space through the
  half-integer-order closed form of K_nu.
* ``gamma_difference_density_numeric`` — a direct convolution quadrature
  for the density of X - Y with arbitrary Gamma parameters. It is the
  independent oracle against which both closed forms are validated, and
  deliberately knows nothing about them.

``ks_statistic`` provides a one-sample Kolmogorov-Smirnov distance with the
reference CDF obtained by quadrature of the density.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate
from scipy.special import gammaincc, gammaln, logsumexp

from .errors import (
    InvalidDimensionError,
    QuadratureError,
    TooFewSamplesError,
)

#: mean of log(x) under edelman_density, rounded to the literature value
EDELMAN_LOG_KAPPA = 1.537


def edelman_density(x) -> np.ndarray | float:
    """Limiting density of kappa/n: f(x) = (2x+4) x^-3 exp(-2/x - 2/x^2), x > 0."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    xp = x[pos]
    out[pos] = (2.0 * xp + 4.0) / xp**3 * np.exp(-2.0 / xp - 2.0 / xp**2)
    return out if out.ndim else float(out)


def edelman_log_mean() -> float:
    """Quadrature of the log-mean of edelman_density.

    Uses the substitution u = log(x) so that the heavy 1/x^2 tail becomes an
    exponentially decaying integrand on the whole real line.
    """

    def integrand(u: float) -> float:
        # f(e^u) e^u u = (2 e^-u + 4 e^-2u) exp(-2 e^-u - 2 e^-2u) u; decays
        # double-exponentially to the left and exponentially to the right.
        if u < -30.0 or u > 700.0:
            return 0.0
        emu = math.exp(-u)
        return (2.0 * emu + 4.0 * emu * emu) * math.exp(-2.0 * emu - 2.0 * emu * emu) * u

    val, err = integrate.quad(integrand, -np.inf, np.inf, epsabs=1e-10, epsrel=1e-10, limit=200)
    if err > 1e-6:
        raise QuadratureError(f"log-mean quadrature error {err:.2e} too large")
    return float(val)


def expected_logkappa_haar(d: int) -> float:
    """Large-size mean of log(kappa) for a (d^2-1)-dimensional tomography matrix
    built from Haar-random unitaries: log(d^2 - 1) + 1.537."""
    if d < 2:
        raise InvalidDimensionError(f"need d >= 2, got {d}")
    return math.log(d * d - 1.0) + EDELMAN_LOG_KAPPA


def incomplete_gamma_int(n: int, z: float) -> float:
    """Upper incomplete Gamma of integer order via the finite sum.

    Gamma(n, z) = (n-1)! e^-z sum_{k=0}^{n-1} z^k / k!. Exact up to rounding;
    overflows for n beyond ~170 where (n-1)! exceeds float range.
    """
    if n < 1 or n != int(n):
        raise ValueError(f"order must be a positive integer, got {n!r}")
    if z < 0:
        raise ValueError("z must be non-negative")
    n = int(n)
    term = 1.0
    total = 1.0
    for k in range(1, n):
        term *= z / k
        total += term
    return math.factorial(n - 1) * math.exp(-z) * total


def case1_density(n: int, x) -> np.ndarray | float:
    """Density of the rescaled diagonal-basis entry nu_n = d * A_entry under
    the complex-Gaussian approximation of Haar matrix entries.

    nu_n is distributed as Gamma(n, sqrt(n(n+1))) - Gamma(1, sqrt((n+1)/n));
    the closed form is

        f(x) = (n/(n+1))^(n-1/2) e^(sqrt((n+1)/n) x)
               * { Q(n, (n+1)^(3/2) n^(-1/2) x)   for x >= 0
                 { 1                               for x < 0,

    with Q the regularized upper incomplete Gamma. n = 1 reduces to the
    two-sided exponential exp(-sqrt(2)|x|)/sqrt(2); n -> infinity tends to
    exp(x-1) Theta(1-x).
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    rate = math.sqrt((n + 1.0) / n)
    log_pref = (n - 0.5) * math.log(n / (n + 1.0))
    out = np.empty_like(x)
    neg = x < 0
    out[neg] = np.exp(log_pref + rate * x[neg])
    xp = x[~neg]
    # Log-space on the positive branch: the exponential prefactor alone would
    # overflow long before the incomplete-Gamma tail pulls the product to 0.
    with np.errstate(divide="ignore"):
        log_q = np.log(gammaincc(n, (n + 1.0) ** 1.5 / math.sqrt(n) * xp))
    out[~neg] = np.exp(log_pref + rate * xp + log_q)
    return float(out[0]) if scalar else out


def case1_limit_density(x) -> np.ndarray | float:
    """Large-n limit of case1_density: exp(x - 1) Theta(1 - x)."""
    x = np.asarray(x, dtype=float)
    out = np.exp(x - 1.0) * np.heaviside(1.0 - x, 0.5)
    return out if out.ndim else float(out)


def _log_kv_half_int(m: int, z: np.ndarray) -> np.ndarray:
    """log K_{m+1/2}(z) for integer m >= 0 and z > 0, via the finite sum

    K_{m+1/2}(z) = sqrt(pi/(2z)) e^-z sum_{k=0}^m (m+k)! / (k! (m-k)!) (2z)^-k,

    evaluated with log-sum-exp so that large orders do not overflow.
    """
    k = np.arange(m + 1, dtype=float)
    log_coeff = gammaln(m + k + 1.0) - gammaln(k + 1.0) - gammaln(m - k + 1.0)
    log_terms = log_coeff[:, None] - k[:, None] * np.log(2.0 * z)[None, :]
    return 0.5 * np.log(np.pi / (2.0 * z)) - z + logsumexp(log_terms, axis=0)


def case2_density(n_spins: int, x) -> np.ndarray | float:
    """Symmetric density of the rescaled Pauli-string entry for N spins.

    The entry is the difference of two Gamma(4^N/2, 2^N) variables, whose

        f(x) = 2^N / (sqrt(pi) Gamma(4^N/2))
               * (2^N |x| / 2)^(4^N/2 - 1/2) K_{4^N/2 - 1/2}(2^N |x|)

    is evaluated entirely in log space (orders up to 4^N/2 - 1/2 overflow a
    naive evaluation already at N = 3). Tends to the standard normal density
    as N grows.
    """
    if n_spins < 1:
        raise ValueError(f"need N >= 1 spins, got {n_spins}")
    alpha = 4**n_spins // 2
    beta = float(2**n_spins)
    m = alpha - 1  # Bessel order is m + 1/2
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    out = np.empty_like(x)
    z = beta * np.abs(x)
    zero = z == 0.0
    # x = 0 limit: (z/2)^nu K_nu(z) -> Gamma(nu)/2 for nu = alpha - 1/2.
    log_f0 = (
        n_spins * math.log(2.0)
        - math.log(2.0)
        - 0.5 * math.log(math.pi)
        + gammaln(alpha - 0.5)
        - gammaln(alpha)
    )
    out[zero] = math.exp(log_f0)
    zp = z[~zero]
    log_f = (
        n_spins * math.log(2.0)
        - 0.5 * math.log(math.pi)
        - gammaln(alpha)
        + (alpha - 0.5) * np.log(zp / 2.0)
        + _log_kv_half_int(m, zp)
    )
    out[~zero] = np.exp(log_f)
    return float(out[0]) if scalar else out


def _log_gamma_pdf(x: float, alpha: float, beta: float) -> float:
    if x <= 0.0:
        return -math.inf
    lx = math.log(x)
    return alpha * math.log(beta) + (alpha - 1.0) * lx - beta * x - math.lgamma(alpha)


def gamma_difference_density_numeric(
    alpha1: float, beta1: float, alpha2: float, beta2: float, z: float, tol: float = 1e-8
) -> float:
    """Density of Z = X - Y, X ~ Gamma(alpha1, beta1), Y ~ Gamma(alpha2, beta2),
    by direct convolution quadrature f_Z(z) = int f_X(x) f_Y(x - z) dx.

    Serves as the independent oracle for the closed forms above; absolute
    accuracy ``tol`` or a QuadratureError.
    """
    for name, val in (("alpha1", alpha1), ("beta1", beta1), ("alpha2", alpha2), ("beta2", beta2)):
        if not val > 0:
            raise ValueError(f"{name} must be positive, got {val!r}")

    def integrand(x: float) -> float:
        lp = _log_gamma_pdf(x, alpha1, beta1) + _log_gamma_pdf(x - z, alpha2, beta2)
        return math.exp(lp) if lp > -700.0 else 0.0

    lo = max(0.0, z)
    res = integrate.quad(
        integrand, lo, np.inf, epsabs=tol * 1e-2, epsrel=1e-10, limit=300, full_output=1
    )
    val, abserr = res[0], res[1]
    if len(res) > 3 or abserr > tol:
        raise QuadratureError(f"convolution quadrature failed (abserr={abserr:.2e})")
    return float(val)


@dataclass(frozen=True)
class ReferenceDensity:
    """A named density with its support and interior non-smooth points."""

    name: str
    pdf: Callable[[np.ndarray], np.ndarray]
    support: tuple[float, float]
    breakpoints: tuple[float, ...] = ()


def edelman_reference() -> ReferenceDensity:
    return ReferenceDensity("edelman-kappa-over-n", edelman_density, (0.0, math.inf))


def case1_reference(n: int) -> ReferenceDensity:
    return ReferenceDensity(
        f"case1-nu{n}", lambda x: case1_density(n, x), (-math.inf, math.inf), (0.0,)
    )


def case1_limit_reference() -> ReferenceDensity:
    return ReferenceDensity("case1-limit", case1_limit_density, (-math.inf, 1.0))


def case2_reference(n_spins: int) -> ReferenceDensity:
    return ReferenceDensity(
        f"case2-bessel-N{n_spins}",
        lambda x: case2_density(n_spins, x),
        (-math.inf, math.inf),
        (0.0,),
    )


def std_normal_reference() -> ReferenceDensity:
    return ReferenceDensity(
        "std-normal",
        lambda x: np.exp(-np.asarray(x, dtype=float) ** 2 / 2.0) / math.sqrt(2.0 * math.pi),
        (-math.inf, math.inf),
    )


def exponential_sqrt2_reference() -> ReferenceDensity:
    """Two-sided exponential exp(-sqrt(2)|x|)/sqrt(2) (= case 1 with n = 1)."""
    return ReferenceDensity(
        "exponential-sqrt2",
        lambda x: np.exp(-math.sqrt(2.0) * np.abs(np.asarray(x, dtype=float))) / math.sqrt(2.0),
        (-math.inf, math.inf),
        (0.0,),
    )


def normalization_defect(density: ReferenceDensity) -> float:
    """|integral of pdf - 1| by adaptive quadrature over the support."""
    lo, hi = density.support
    pts = [b for b in density.breakpoints if lo < b < hi]
    val = 0.0
    knots = [lo] + pts + [hi]
    for a, b in zip(knots[:-1], knots[1:]):
        piece, _ = integrate.quad(
            lambda x: float(density.pdf(np.asarray([x]))[0]), a, b, epsabs=1e-9, limit=300
        )
        val += piece
    return abs(val - 1.0)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def _cdf_at(density: ReferenceDensity, xs: np.ndarray) -> np.ndarray:
    """Reference CDF at sorted points, head by adaptive quadrature and
    increments by panelled 16-point Gauss-Legendre (panels <= 0.25 wide,
    split additionally at the density's breakpoints)."""
    lo, hi = density.support
    xs = np.asarray(xs, dtype=float)
    if np.any(xs[:-1] > xs[1:]):
        raise ValueError("points must be sorted")
    knots = np.unique(
        np.concatenate([xs, [b for b in density.breakpoints if xs[0] < b < xs[-1]]])
    )
    widths = np.diff(knots)
    n_panels = np.maximum(1, np.ceil(widths / 0.25).astype(int))
    starts = np.repeat(knots[:-1], n_panels)
    steps = np.repeat(widths / n_panels, n_panels)
    offsets = np.concatenate([np.arange(k) for k in n_panels])
    panel_lo = starts + offsets * steps
    # 16-point Gauss-Legendre on each panel, all panels at once.
    mid = panel_lo + steps / 2.0
    half = steps / 2.0
    nodes = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    vals = density.pdf(nodes.ravel()).reshape(nodes.shape)
    panel_int = (vals @ _GL_WEIGHTS) * half
    # Sum panels back into per-knot-interval increments, then accumulate.
    first_panel = np.concatenate([[0], np.cumsum(n_panels)[:-1]])
    increments = np.add.reduceat(panel_int, first_panel)
    head, _ = integrate.quad(
        lambda x: float(density.pdf(np.asarray([x]))[0]), lo, knots[0], epsabs=1e-10, limit=300
    )
    cdf_at_knots = head + np.concatenate([[0.0], np.cumsum(increments)])
    return cdf_at_knots[np.searchsorted(knots, xs)]


def ks_statistic(samples, density: ReferenceDensity) -> float:
    """One-sample Kolmogorov-Smirnov distance between an empirical sample and
    a reference density (CDF by quadrature)."""
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 1 or len(samples) < 100:
        raise TooFewSamplesError("KS test needs a 1-d sample of at least 100 points")
    xs = np.sort(samples)
    lo, hi = density.support
    cdf = np.empty_like(xs)
    inside = (xs > lo) & (xs < hi)
    cdf[xs <= lo] = 0.0
    cdf[xs >= hi] = 1.0
    if np.any(inside):
        cdf[inside] = _cdf_at(density, xs[inside])
    n = len(xs)
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - cdf)
    d_minus = np.max(cdf - (i - 1) / n)
    return float(max(d_plus, d_minus))


def ks_critical_value(n_samples: int, alpha: float = 0.01) -> float:
    """Asymptotic one-sample KS critical value c(alpha)/sqrt(n)."""
    return math.sqrt(-0.5 * math.log(alpha / 2.0)) / math.sqrt(n_samples)
