"""Closed-form bound kernels and certificate production for mixture densities.

The certificate records lower <= Var <= upper with lower = e^{2h}/(2 pi e)
and an upper bound chosen by hypothesis class.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from . import special
from .densities import GenGaussian, MixtureDensity, UniformComponent
from .errors import DomainError, NotApplicableError
from .quadrature import entropy_of, variance_of

TWO_PI_E = 2.0 * math.pi * math.e
INV_TWO_PI_E = 1.0 / TWO_PI_E
DEFAULT_TOL = 1e-7
THEOREM_TAGS = ("thm1", "cor1", "cor2", "thm2", "thm3", "lower_only")
_M_SERIES_CUTOFF = 1e-9


@dataclass
class BoundCertificate:
    variance: float
    entropy_power: float
    lower: float
    upper: float
    theorem_tag: str
    hypothesis_report: list[tuple[str, bool]] = field(default_factory=list)
    slack_lower: float = 0.0
    slack_upper: float = 0.0
    tol: float = DEFAULT_TOL
    details: dict = field(default_factory=dict)

    @classmethod
    def build(cls, variance, entropy_power, upper, theorem_tag, hypothesis_report=(),
              tol=DEFAULT_TOL, details=None):
        if theorem_tag not in THEOREM_TAGS:
            raise DomainError(f"unknown theorem tag {theorem_tag!r}")
        lower = entropy_power / TWO_PI_E
        return cls(
            variance=float(variance),
            entropy_power=float(entropy_power),
            lower=float(lower),
            upper=float(upper),
            theorem_tag=theorem_tag,
            hypothesis_report=[(str(k), bool(v)) for k, v in hypothesis_report],
            slack_lower=float(variance - lower),
            slack_upper=float(upper - variance),
            tol=float(tol),
            details=dict(details or {}),
        )

    @property
    def hypotheses_hold(self) -> bool:
        return all(ok for _, ok in self.hypothesis_report)

    @property
    def passed(self) -> bool:
        return (self.hypotheses_hold
                and self.slack_lower >= -self.tol
                and self.slack_upper >= -self.tol)

    @property
    def upper_ratio(self) -> float:
        """upper / entropy_power, the constant c in Var <= c e^{2h}."""
        return self.upper / self.entropy_power

    def to_dict(self) -> dict:
        d = asdict(self)
        d["hypothesis_report"] = [[k, v] for k, v in self.hypothesis_report]
        d["upper"] = _encode_float(self.upper)
        d["slack_upper"] = _encode_float(self.slack_upper)
        d["passed"] = self.passed
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "BoundCertificate":
        return cls(
            variance=float(d["variance"]),
            entropy_power=float(d["entropy_power"]),
            lower=float(d["lower"]),
            upper=_decode_float(d["upper"]),
            theorem_tag=d["theorem_tag"],
            hypothesis_report=[(str(k), bool(v)) for k, v in d["hypothesis_report"]],
            slack_lower=float(d["slack_lower"]),
            slack_upper=_decode_float(d["slack_upper"]),
            tol=float(d.get("tol", DEFAULT_TOL)),
            details=dict(d.get("details", {})),
        )


def _encode_float(v):
    return "inf" if v == math.inf else v


def _decode_float(v):
    return math.inf if v == "inf" else float(v)


# ---------------------------------------------------------------------------
# kernels


def log_a_theta(theta: float) -> float:
    """ln A(theta), A(theta) = 4 theta^-2 Gamma(1/theta)^3 / Gamma(3/theta) e^{2/theta}."""
    theta = float(theta)
    if not math.isfinite(theta) or theta <= 0:
        raise DomainError(f"theta must be positive, got {theta!r}")
    if theta < 1e-3:
        raise DomainError("theta below 1e-3 is outside the guarded range of A(theta)")
    return (math.log(4.0) - 2.0 * math.log(theta)
            + 3.0 * special.log_gamma(1.0 / theta) - special.log_gamma(3.0 / theta)
            + 2.0 / theta)


def a_theta(theta: float) -> float:
    """Exact entropy-power-to-variance ratio of a generalized Gaussian of order theta.

    ``theta = inf`` gives the uniform limit 12.
    """
    if theta == math.inf:
        return 12.0
    return math.exp(log_a_theta(theta))


def inv_a_theta(theta: float) -> float:
    """1/A(theta); overflows to inf for very heavy tails (theta near 1e-3)."""
    if theta == math.inf:
        return 1.0 / 12.0
    log_inv = -log_a_theta(theta)
    return math.inf if log_inv > 709.0 else math.exp(log_inv)


def a_theta_derivative(theta: float) -> float:
    """dA/dtheta = A(theta) theta^-2 (3 (phi(3/theta) - phi(1/theta)) - 2)."""
    f = special.phi(3.0 / theta) - special.phi(1.0 / theta)
    return a_theta(theta) / theta**2 * (3.0 * f - 2.0)


def log_m_ratio(r: float) -> float:
    r = float(r)
    if not r >= 1.0 or math.isnan(r):
        raise DomainError(f"M(r) needs r >= 1, got {r!r}")
    if r == math.inf:
        return math.inf
    u = r - 1.0
    if u < _M_SERIES_CUTOFF:
        return math.log1p(u * u / 8.0)
    lr = math.log1p(u)
    return math.log(u / lr) + lr / u - 1.0


def m_ratio(r: float) -> float:
    """Reverse power-mean (Specht) factor M(r) = (r-1) r^{1/(r-1)} / (e ln r); M(1) = 1."""
    return math.exp(log_m_ratio(r))


def variance_ratio(variances: Sequence[float]) -> float:
    """r = max_{i,j} sigma_i^2 / sigma_j^2 (always >= 1)."""
    v = [float(x) for x in variances]
    if not v or min(v) <= 0:
        raise DomainError("variances must be positive")
    return max(v) / min(v)


def _check_weights(thetas, alphas):
    if len(thetas) != len(alphas) or not thetas:
        raise DomainError("thetas and alphas must be non-empty and of equal length")
    if any(not a > 0 for a in alphas) or abs(math.fsum(alphas) - 1.0) > 1e-12:
        raise DomainError("alphas must be positive and sum to 1")


def b_factor(thetas: Sequence[float], alphas: Sequence[float], r: float) -> float:
    """B(theta, r) = M(r) prod_i (1/A(theta_i))^{alpha_i}."""
    _check_weights(thetas, alphas)
    log_b = log_m_ratio(r) - math.fsum(
        a * (math.log(12.0) if t == math.inf else log_a_theta(t)) for t, a in zip(thetas, alphas))
    return math.exp(log_b)


def corollary1_factor(thetas: Sequence[float], alphas: Sequence[float], r: float) -> float:
    """M(r)/12 when every theta_i >= 1, 2 e^4 M(r)/15 when every theta_i >= 1/2."""
    _check_weights(thetas, alphas)
    lowest = min(thetas)
    if lowest >= 1.0:
        return m_ratio(r) / 12.0
    if lowest >= 0.5:
        return 2.0 * math.e**4 * m_ratio(r) / 15.0
    raise NotApplicableError(f"smallest order {lowest} is below 1/2")


def reverse_power_mean_holds(alphas, values, rel_tol=1e-12) -> bool:
    """sum alpha_i v_i <= M(r) prod v_i^{alpha_i} with r = max v / min v."""
    a = np.asarray(alphas, dtype=float)
    v = np.asarray(values, dtype=float)
    arith = float(np.dot(a, v))
    geo = math.exp(float(np.dot(a, np.log(v))))
    return arith <= m_ratio(variance_ratio(v)) * geo * (1.0 + rel_tol)


# ---------------------------------------------------------------------------
# certificates for mixtures


def _mixture_orders(mix: MixtureDensity):
    return [c.theta if isinstance(c, GenGaussian) else math.inf for c in mix.components]


def _measure(d):
    var = variance_of(d)
    h = entropy_of(d)
    return var, math.exp(2.0 * h), h


def _mixture_report(mix):
    return [("common mean", len({c.m for c in mix.components}) == 1),
            ("positive weights summing to 1", abs(math.fsum(mix.alphas) - 1.0) <= 1e-12)]


def certify_theorem1(mix: MixtureDensity, tol: float = DEFAULT_TOL) -> BoundCertificate:
    """Certify e^{2h}/(2 pi e) <= Var <= B(theta, r) e^{2h} for a generalized-Gaussian mixture.

    Uniform components are admitted as the theta -> inf limit (1/A = 1/12);
    such certificates carry a "limit-extension" entry in their details.
    """
    thetas = _mixture_orders(mix)
    r = variance_ratio(mix.component_variances())
    b = b_factor(thetas, list(mix.alphas), r)
    var, ep, h = _measure(mix)
    report = _mixture_report(mix)
    details = {"r": r, "B": b, "h": h, "closed_form_variance": mix.variance,
               "limit_extension": mix.has_uniform}
    return BoundCertificate.build(var, ep, b * ep, "thm1", report, tol, details)


def certify_corollary1(mix: MixtureDensity, tol: float = DEFAULT_TOL) -> BoundCertificate:
    thetas = _mixture_orders(mix)
    r = variance_ratio(mix.component_variances())
    c = corollary1_factor(thetas, list(mix.alphas), r)
    var, ep, h = _measure(mix)
    details = {"r": r, "factor": c, "h": h, "min_theta": min(thetas)}
    return BoundCertificate.build(var, ep, c * ep, "cor1", _mixture_report(mix), tol, details)


def certify_corollary2(mix: MixtureDensity, tol: float = DEFAULT_TOL) -> BoundCertificate:
    """Certify Var <= (M(r)/12) e^{2h} for a common-centre mixture of uniforms."""
    if not all(isinstance(c, UniformComponent) for c in mix.components):
        raise NotApplicableError("the uniform-mixture bound needs uniform components only")
    eps = [c.epsilon for c in mix.components]
    r = max(eps) ** 2 / min(eps) ** 2
    factor = m_ratio(r) / 12.0
    var, ep, h = _measure(mix)
    details = {"r": r, "factor": factor, "h": h, "closed_form_variance": mix.variance}
    return BoundCertificate.build(var, ep, factor * ep, "cor2", _mixture_report(mix), tol, details)


def certify_lower_only(d, tol: float = DEFAULT_TOL) -> BoundCertificate:
    var, ep, h = _measure(d)
    return BoundCertificate.build(var, ep, math.inf, "lower_only", [], tol, {"h": h})


# ---------------------------------------------------------------------------
# two-uniform counterexample


def binary_entropy(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log(p) - (1.0 - p) * math.log1p(-p)


def two_uniform_variance(alpha1, eps1, eps2) -> float:
    return ((alpha1 / eps1**2) + (1.0 - alpha1) / eps2**2) / 12.0


def two_uniform_entropy(alpha1, eps1, eps2) -> float:
    """Exact entropy of alpha1 unif(width 1/eps1) + alpha2 unif(width 1/eps2), eps1 >= eps2."""
    alpha2 = 1.0 - alpha1
    inner = alpha1 * eps1 + alpha2 * eps2
    outer = alpha2 * eps2
    h = -(1.0 / eps1) * inner * math.log(inner)
    if eps1 != eps2:
        h -= (1.0 / eps2 - 1.0 / eps1) * outer * math.log(outer)
    return h


def two_uniform_entropy_power_limit(alpha1, eps1, eps2) -> float:
    """Limit of e^{2h} as eps1/eps2 -> inf."""
    alpha2 = 1.0 - alpha1
    return math.exp(2.0 * binary_entropy(alpha1)
                    - 2.0 * alpha1 * math.log(eps1) - 2.0 * alpha2 * math.log(eps2))


@dataclass(frozen=True)
class CounterexampleRow:
    eps2: float
    variance: float
    entropy_power: float
    ratio: float
    entropy_power_limit: float


def counterexample_report(alpha1: float, eps1: float, eps2_list: Sequence[float]) -> list[CounterexampleRow]:
    """Variance and entropy power of the two-uniform mixture for shrinking eps2.

    The ratio Var / e^{2h} grows without bound as eps2 -> 0.
    """
    if not 0.0 < alpha1 < 1.0:
        raise DomainError("alpha1 must lie in (0, 1)")
    if eps1 <= 0:
        raise DomainError("eps1 must be positive")
    eps2_list = [float(e) for e in eps2_list]
    if any(e <= 0 or e > eps1 for e in eps2_list):
        raise DomainError("every eps2 must lie in (0, eps1]")
    if any(b >= a for a, b in zip(eps2_list, eps2_list[1:])):
        raise DomainError("eps2 values must be strictly decreasing")
    rows = []
    for e2 in eps2_list:
        var = two_uniform_variance(alpha1, eps1, e2)
        ep = math.exp(2.0 * two_uniform_entropy(alpha1, eps1, e2))
        rows.append(CounterexampleRow(e2, var, ep, var / ep,
                                      two_uniform_entropy_power_limit(alpha1, eps1, e2)))
    return rows


def loglog_slope(xs, ys) -> float:
    """Least-squares slope of log y against log x."""
    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.asarray(ys, dtype=float))
    return float(np.polyfit(lx, ly, 1)[0])


# ---------------------------------------------------------------------------
# independent product


@dataclass(frozen=True)
class ProductBound:
    det_covariance: float
    entropy_power_k: float
    c: float

    @property
    def slack(self) -> float:
        return self.c * self.entropy_power_k - self.det_covariance


def product_bound(certs: Sequence[BoundCertificate]) -> ProductBound:
    """|Sigma| = prod Var_i <= c prod e^{2h_i} with c = prod upper_i / e^{2h_i}.

    The inequality is asserted up to the marginal certification tolerances.
    """
    if not certs:
        raise NotApplicableError("need at least one marginal certificate")
    for i, cert in enumerate(certs):
        if not cert.passed or not math.isfinite(cert.upper):
            raise NotApplicableError(f"marginal {i} has no passing finite upper bound")
    det = math.prod(c.variance for c in certs)
    ep = math.prod(c.entropy_power for c in certs)
    const = math.prod(c.upper / c.entropy_power for c in certs)
    if det > math.prod(c.upper + c.tol for c in certs):
        raise AssertionError(f"product bound violated: {det} > {const * ep}")
    return ProductBound(det, ep, const)
