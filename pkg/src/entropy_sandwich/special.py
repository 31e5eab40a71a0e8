"""Gamma, log-gamma, digamma and the harmonic-type series phi.

Only the positive real axis is supported. Everything is scalar and pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

EULER_GAMMA = 0.57721566490153286061
"""Euler-Mascheroni constant to 20 significant digits."""

# Lanczos approximation, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

# B_{2k} / (2k (2k-1)) for k = 1..7.
_STIRLING_COEF = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
)
_STIRLING_MIN = 10.0
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_GAMMA_MAX = 171.6


@dataclass(frozen=True)
class SeriesTolerance:
    """Truncation control for the phi / digamma series.

    ``max_terms`` terms are summed explicitly; the remainder is replaced by
    an Euler-Maclaurin tail whose first neglected term must stay below
    ``rel_tol`` times the result.
    """

    rel_tol: float = 1e-14
    max_terms: int = 1000

    def __post_init__(self):
        if not (0.0 < self.rel_tol < 1e-3):
            raise DomainError(f"rel_tol must lie in (0, 1e-3), got {self.rel_tol}")
        if int(self.max_terms) != self.max_terms or self.max_terms < 1000:
            raise DomainError(f"max_terms must be an integer >= 1000, got {self.max_terms}")


DEFAULT_SERIES = SeriesTolerance()


def _check_positive(name, t):
    t = float(t)
    if not math.isfinite(t) or t <= 0.0:
        raise DomainError(f"{name} requires a finite positive argument, got {t!r}")
    return t


def _lanczos(t):
    # valid for t >= 0.5
    z = t - 1.0
    acc = _LANCZOS_COEF[0]
    for k in range(1, 9):
        acc += _LANCZOS_COEF[k] / (z + k)
    base = z + _LANCZOS_G + 0.5
    return acc, base, z


def _stirling_log_gamma(t):
    inv = 1.0 / t
    inv2 = inv * inv
    series = 0.0
    power = inv
    for c in _STIRLING_COEF:
        series += c * power
        power *= inv2
    return (t - 0.5) * math.log(t) - t + _HALF_LOG_2PI + series


def gamma(t: float) -> float:
    """Gamma function for t > 0.

    Overflows to ``inf`` past t ~ 171.6; use :func:`log_gamma` there.
    """
    t = _check_positive("gamma", t)
    if t < 0.5:
        return gamma(t + 1.0) / t
    if t >= _STIRLING_MIN:
        if t > _GAMMA_MAX:
            return math.inf
        return math.exp(_stirling_log_gamma(t))
    acc, base, z = _lanczos(t)
    return math.sqrt(2.0 * math.pi) * base ** (z + 0.5) * math.exp(-base) * acc


def log_gamma(t: float) -> float:
    """Natural log of the Gamma function for t > 0."""
    t = _check_positive("log_gamma", t)
    if t >= _STIRLING_MIN:
        return _stirling_log_gamma(t)
    if t < 0.5:
        # ln Gamma(t) = ln Gamma(t+1) - ln t, with Gamma(t+1) in [0.88, 1]
        return math.log(gamma(t + 1.0)) - math.log(t)
    return math.log(gamma(t))


def phi_terms(x: float, n_terms: int) -> np.ndarray:
    """The first ``n_terms`` terms 1/n - 1/(n+x) = x/(n(n+x)) of phi(x)."""
    n = np.arange(1, int(n_terms) + 1, dtype=float)
    return x / (n * (n + x))


def phi_with_error(x: float, tol: SeriesTolerance = DEFAULT_SERIES) -> tuple[float, float]:
    """phi(x) = sum_{n>=1} (1/n - 1/(n+x)) and a bound on the truncation error.

    The tail past N = ``tol.max_terms`` is evaluated by Euler-Maclaurin
    through the third-derivative term; the returned error is the magnitude
    of the first omitted term.
    """
    x = _check_positive("phi", x)
    N = float(tol.max_terms)
    head = float(np.sum(phi_terms(x, tol.max_terms)))
    Nx = N + x
    integral = math.log1p(x / N)
    f0 = x / (N * Nx)
    f1 = -1.0 / N**2 + 1.0 / Nx**2
    f3 = -6.0 / N**4 + 6.0 / Nx**4
    tail = integral - 0.5 * f0 - f1 / 12.0 + f3 / 720.0
    f5 = 120.0 / N**6 - 120.0 / Nx**6
    err = abs(f5) / 30240.0 + 4.0 * np.finfo(float).eps * (head + tail)
    value = head + tail
    if err > tol.rel_tol * value:
        raise DomainError(f"phi({x}) series error {err:.3g} exceeds tolerance; raise max_terms")
    return value, err


def phi(x: float, tol: SeriesTolerance = DEFAULT_SERIES) -> float:
    """phi(x) = sum_{n>=1} (1/n - 1/(n+x)), which equals digamma(x+1) + gamma_E."""
    return phi_with_error(x, tol)[0]


def digamma(z: float, tol: SeriesTolerance = DEFAULT_SERIES) -> float:
    """psi_0(z) = -1/z - gamma_E + phi(z) for z > 0."""
    z = _check_positive("digamma", z)
    return phi(z, tol) - EULER_GAMMA - 1.0 / z
