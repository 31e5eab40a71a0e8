"""Uniform-mixture approximation of Lipschitz unimodal densities and the
certificates that rest on it.

A symmetric density on [m - s, m + s] is replaced by the step density whose
CDF agrees with the original at the grid points m + k*s/n. The step density
is a mixture of n centred uniforms unif(m - t*delta, m + t*delta). Asymmetric
densities are handled by mirroring each side of the mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import DEFAULT_TOL, BoundCertificate, binary_entropy, loglog_slope, m_ratio
from .densities import Density, PiecewiseConstantDensity, Support, is_unimodal_on_grid
from .errors import DegenerateSplitError, DomainError, HypothesisError
from .quadrature import entropy_of, integrate, mass_between, mean_of, moment_about, variance_of

NEGATIVE_WEIGHT_CLAMP = 1e-9
LIPSCHITZ_GRID = 10001
_CELL_TOL = 1e-14


@dataclass(frozen=True)
class LipschitzUnimodal:
    """A unimodal density on [b - s_l, b + s_r] with Lipschitz constant ``lipschitz_c``.

    The density is treated as a function on the whole line, so a jump at a
    support end counts as an infinite slope. ``lipschitz_c`` may be omitted
    when only the step approximation is needed.
    """

    density: Density
    b: float
    s_l: float
    s_r: float
    lipschitz_c: float | None = None
    grid_points: int = LIPSCHITZ_GRID
    validate: bool = True

    def __post_init__(self):
        if not (self.s_l > 0 and self.s_r > 0):
            raise DomainError("both one-sided support lengths must be positive")
        if self.lipschitz_c is not None and not self.lipschitz_c > 0:
            raise DomainError("lipschitz_c must be positive")
        if self.validate:
            if not is_unimodal_on_grid(self.density, self.b, self.grid_points // 2 + 1):
                raise HypothesisError(f"density is not unimodal about {self.b}", check="unimodal")
            if self.lipschitz_c is not None:
                est = self.estimated_lipschitz()
                if est > self.lipschitz_c * (1.0 + 1e-9) + 1e-12:
                    raise HypothesisError(
                        f"grid slope {est:.6g} exceeds the stated Lipschitz constant {self.lipschitz_c}",
                        check="lipschitz",
                    )

    @classmethod
    def from_density(cls, d: Density, lipschitz_c: float | None = None, **kw):
        """Read the mode and support from ``d`` (and its exact Lipschitz constant if it has one)."""
        if d.mode_hint is None or not d.support.is_bounded:
            raise DomainError("need a bounded density with a mode hint")
        if lipschitz_c is None:
            lipschitz_c = getattr(d, "lipschitz", None)
            if lipschitz_c is not None and not math.isfinite(lipschitz_c):
                lipschitz_c = None
        b = float(d.mode_hint)
        return cls(d, b, b - d.support.lo, d.support.hi - b, lipschitz_c, **kw)

    @property
    def s(self) -> float:
        return max(self.s_l, self.s_r)

    @property
    def lo(self):
        return self.b - self.s_l

    @property
    def hi(self):
        return self.b + self.s_r

    @property
    def is_symmetric(self) -> bool:
        return self.s_l == self.s_r and bool(self.density.symmetric)

    @property
    def cs2(self) -> float:
        """The scale-free parameter c_s s^2."""
        if self.lipschitz_c is None:
            raise DomainError("no Lipschitz constant supplied")
        return self.lipschitz_c * self.s**2

    def pdf_at(self, x):
        return self.density.pdf_at(x)

    def estimated_lipschitz(self, points: int | None = None) -> float:
        """Largest finite-difference slope on a grid padded by one step on each side."""
        points = points or self.grid_points
        step = (self.hi - self.lo) / (points - 1)
        x = np.linspace(self.lo - step, self.hi + step, points + 2)
        y = self.density.pdf_at(x)
        return float(np.max(np.abs(np.diff(y)) / np.diff(x)))


# ---------------------------------------------------------------------------
# step approximation


@dataclass(frozen=True)
class StepApproximation:
    n: int
    grid_step: float
    alphas: tuple[float, ...]
    m: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError("n must be a positive integer")
        if len(self.alphas) != self.n:
            raise DomainError("need exactly n weights")
        if any(a < 0 for a in self.alphas):
            raise DomainError("weights must be nonnegative")
        if abs(math.fsum(self.alphas) - 1.0) > 1e-12:
            raise DomainError("weights must sum to 1")
        if not self.grid_step > 0:
            raise DomainError("grid_step must be positive")

    @property
    def s(self) -> float:
        return self.grid_step * self.n

    def heights(self) -> np.ndarray:
        """Step value on cell j = 1..n counted outward from the centre."""
        t = np.arange(1, self.n + 1)
        per = np.asarray(self.alphas) / (2.0 * t * self.grid_step)
        return np.cumsum(per[::-1])[::-1]

    def variance(self) -> float:
        """(1/3) sum alpha_t (t delta)^2."""
        t = np.arange(1, self.n + 1)
        return math.fsum((np.asarray(self.alphas) * (t * self.grid_step) ** 2 / 3.0).tolist())

    def to_dict(self) -> dict:
        return {"n": self.n, "grid_step": self.grid_step, "alphas": list(self.alphas), "m": self.m}

    @classmethod
    def from_dict(cls, d: dict) -> "StepApproximation":
        return cls(int(d["n"]), float(d["grid_step"]), tuple(float(a) for a in d["alphas"]), float(d["m"]))


def cell_masses(p: LipschitzUnimodal, n: int) -> np.ndarray:
    """Mass of the left-side cells [m - j delta, m - (j-1) delta], j = 1..n."""
    delta = p.s_l / n
    out = np.empty(n)
    bps = p.density.breakpoints()
    for j in range(1, n + 1):
        lo, hi = p.b - j * delta, p.b - (j - 1) * delta
        out[j - 1] = integrate(p.density.pdf_at, lo, hi, _CELL_TOL, breakpoints=bps).value
    return out


def build_step_approx(p: LipschitzUnimodal, n: int) -> StepApproximation:
    """Weights alpha_t of the n-component uniform mixture matching p's cell masses.

    alpha_t = 2t (mass_t - mass_{t+1}) for t < n and alpha_n = 2n mass_n,
    where mass_t is the probability of the t-th cell out from the centre.
    """
    if not p.is_symmetric:
        raise HypothesisError("step approximation needs a symmetric density", check="symmetric")
    n = int(n)
    if n < 1:
        raise DomainError("n must be at least 1")
    mass = cell_masses(p, n)
    t = np.arange(1, n + 1, dtype=float)
    alphas = np.empty(n)
    alphas[:-1] = 2.0 * t[:-1] * (mass[:-1] - mass[1:])
    alphas[-1] = 2.0 * n * mass[-1]
    worst = float(np.min(alphas))
    if worst < -NEGATIVE_WEIGHT_CLAMP:
        raise HypothesisError(f"negative weight {worst:.3g}: input is not unimodal at this resolution",
                              check="unimodal")
    alphas = np.clip(alphas, 0.0, None)
    alphas = alphas / math.fsum(alphas.tolist())
    return StepApproximation(n, p.s_l / n, tuple(alphas.tolist()), p.b)


def step_density(sa: StepApproximation) -> PiecewiseConstantDensity:
    """The symmetric piecewise-constant density of ``sa`` on 2n cells."""
    h = sa.heights()
    edges = sa.m + sa.grid_step * np.arange(-sa.n, sa.n + 1)
    heights = np.concatenate([h[::-1], h])
    return PiecewiseConstantDensity(tuple(edges.tolist()), tuple(heights.tolist()),
                                    mode_hint=sa.m, mean_hint=sa.m, symmetric=True)


def step_entropy(sa: StepApproximation) -> float:
    """Exact entropy of the step density, -sum cell * height * ln height."""
    h = sa.heights()
    pos = h > 0
    return -2.0 * sa.grid_step * math.fsum((h[pos] * np.log(h[pos])).tolist())


def variance_gap_envelope(p: LipschitzUnimodal, n: int) -> float:
    """Explicit bound (2 c_s s^4 / 3) / n on |Var(p) - Var(step)|."""
    return 2.0 * p.lipschitz_c * p.s**4 / (3.0 * n)


@dataclass
class ConvergenceReport:
    n_values: list[int]
    var_gap: list[float]
    ep_ratio_gap: list[float]
    fitted_var_slope: float
    fitted_ep_slope: float
    envelope: list[float] = field(default_factory=list)

    def rows(self):
        return list(zip(self.n_values, self.var_gap, self.ep_ratio_gap))


def _fit(ns, gaps):
    ns = np.asarray(ns, dtype=float)
    gaps = np.asarray(gaps, dtype=float)
    ok = gaps > 1e-14
    if ok.sum() < 2:
        return math.nan
    return loglog_slope(ns[ok], gaps[ok])


def convergence_study(p: LipschitzUnimodal, n_values, tol: float = 1e-9) -> ConvergenceReport:
    """Variance and entropy-power gaps between p and its step approximations.

    When p carries a Lipschitz constant, every variance gap is checked
    against the explicit (2 c_s s^4/3)/n envelope.
    """
    n_values = [int(n) for n in n_values]
    if len(n_values) < 4 or any(b <= a for a, b in zip(n_values, n_values[1:])):
        raise DomainError("need at least four increasing n values")
    var_p = variance_of(p.density)
    h_p = entropy_of(p.density)
    var_gap, ep_gap, env = [], [], []
    for n in n_values:
        sa = build_step_approx(p, n)
        var_gap.append(abs(var_p - sa.variance()))
        ep_gap.append(math.expm1(2.0 * (step_entropy(sa) - h_p)))
        if p.lipschitz_c is not None:
            bound = variance_gap_envelope(p, n)
            env.append(bound)
            if var_gap[-1] > bound + tol:
                raise AssertionError(f"variance gap {var_gap[-1]:.3g} above envelope {bound:.3g} at n={n}")
    return ConvergenceReport(n_values, var_gap, ep_gap, _fit(n_values, var_gap), _fit(n_values, ep_gap), env)


def envelope_constant(p: LipschitzUnimodal, sa: StepApproximation) -> float:
    """Smallest C >= 0 with Var(step) <= coef e^{2h(step)} (1 + C/n), coef = c s^2 e^{c s^2}/24."""
    coef = theorem2_coefficient(p.cs2)
    ratio = sa.variance() / (coef * math.exp(2.0 * step_entropy(sa)))
    return max(0.0, sa.n * (ratio - 1.0))


# ---------------------------------------------------------------------------
# certificates


def theorem2_coefficient(cs2: float) -> float:
    """c s^2 e^{c s^2} / 24."""
    try:
        return cs2 * math.exp(cs2) / 24.0
    except OverflowError:
        return math.inf


def theorem3_coefficient(cs2: float) -> float:
    """c s^2 e^{c s^2} M(128 (c s^2)^4) / 6."""
    try:
        return cs2 * math.exp(cs2) * m_ratio(128.0 * cs2**4) / 6.0
    except OverflowError:
        return math.inf


def _require_lipschitz(p):
    if p.lipschitz_c is None:
        raise HypothesisError("a Lipschitz constant is required", check="lipschitz")
    if p.cs2 < 1.0 - 1e-12:
        raise HypothesisError(f"c_s s^2 = {p.cs2:.6g} < 1 is impossible for a normalized density",
                              check="c_s s^2 >= 1")


def certify_theorem2(p: LipschitzUnimodal, tol: float = DEFAULT_TOL) -> BoundCertificate:
    """Certify e^{2h}/(2 pi e) <= Var <= (c s^2 e^{c s^2}/24) e^{2h} for a symmetric p."""
    _require_lipschitz(p)
    if not p.is_symmetric:
        raise HypothesisError("the symmetric Lipschitz bound needs a symmetric density", check="symmetric")
    var = variance_of(p.density)
    h = entropy_of(p.density)
    ep = math.exp(2.0 * h)
    coef = theorem2_coefficient(p.cs2)
    report = [("symmetric", True), ("unimodal", True), ("lipschitz", True), ("c_s s^2 >= 1", True)]
    details = {"h": h, "cs2": p.cs2, "coefficient": coef}
    return BoundCertificate.build(var, ep, coef * ep, "thm2", report, tol, details)


@dataclass(frozen=True)
class MirroredHalf(Density):
    """One side of ``base`` about ``b`` reflected onto the other side, scaled by 1/(2 beta)."""

    base: Density
    b: float
    half_width: float
    side: str
    beta: float
    symmetric: bool = field(default=True, init=False)

    def __post_init__(self):
        if self.side not in ("left", "right"):
            raise DomainError("side must be 'left' or 'right'")

    @property
    def support(self):
        return Support.bounded(self.b - self.half_width, self.b + self.half_width)

    @property
    def mean_hint(self):
        return self.b

    @property
    def mode_hint(self):
        return self.b

    def pdf_at(self, x):
        x = np.asarray(x, dtype=float)
        d = np.abs(x - self.b)
        src = self.b - d if self.side == "left" else self.b + d
        inside = d <= self.half_width
        return np.where(inside, self.base.pdf_at(src), 0.0) / (2.0 * self.beta)

    def breakpoints(self):
        pts = {self.b}
        for q in self.base.breakpoints():
            d = abs(q - self.b)
            if d < self.half_width:
                pts.update((self.b - d, self.b + d))
        return tuple(sorted(pts))


@dataclass(frozen=True)
class ModeSplit:
    p_l: MirroredHalf
    p_r: MirroredHalf
    beta_l: float
    beta_r: float


def split_asymmetric(p: LipschitzUnimodal) -> ModeSplit:
    """Mirrored, renormalized half-densities about the mode and the half-masses."""
    beta_l = mass_between(p.density, p.lo, p.b, 1e-14)
    beta_r = mass_between(p.density, p.b, p.hi, 1e-14)
    if beta_l < 1e-12 or beta_r < 1e-12:
        raise DegenerateSplitError(f"degenerate split: beta_l={beta_l:.3g}, beta_r={beta_r:.3g}",
                                   check="two-sided mass")
    p_l = MirroredHalf(p.density, p.b, p.s_l, "left", beta_l)
    p_r = MirroredHalf(p.density, p.b, p.s_r, "right", beta_r)
    return ModeSplit(p_l, p_r, beta_l, beta_r)


def certify_theorem3(p: LipschitzUnimodal, tol: float = DEFAULT_TOL,
                     identity_rel_tol: float = 1e-6) -> BoundCertificate:
    """Certify the mode-split sandwich for a possibly asymmetric Lipschitz unimodal p.

    ``upper`` is the c s^2 e^{c s^2} M(128 (c s^2)^4)/6 bound; the tighter
    bound built from the measured r_v and beta_l is kept in ``details``
    together with the decomposition checks.
    """
    _require_lipschitz(p)
    split = split_asymmetric(p)
    bl, br = split.beta_l, split.beta_r
    mean = mean_of(p.density)
    var = moment_about(p.density, mean, 2)
    h = entropy_of(p.density)
    ep = math.exp(2.0 * h)
    var_l, var_r = variance_of(split.p_l), variance_of(split.p_r)
    h_l, h_r = entropy_of(split.p_l), entropy_of(split.p_r)
    hb = binary_entropy(bl)
    shift2 = (mean - p.b) ** 2

    var_rebuilt = bl * var_l + br * var_r - shift2
    ep_rebuilt = 0.25 * math.exp(2.0 * (bl * h_l + br * h_r + hb))
    var_identity = abs(var_rebuilt - var) <= identity_rel_tol * var
    ep_identity = abs(ep_rebuilt - ep) <= identity_rel_tol * ep

    r_v = max(var_l / var_r, var_r / var_l)
    cs2 = p.cs2
    rv_ok = r_v <= 128.0 * cs2**4

    coef = theorem3_coefficient(cs2)
    coef_tight = theorem2_coefficient(cs2) * 4.0 * m_ratio(r_v) / math.exp(2.0 * hb)
    upper = coef * ep - shift2
    upper_tight = coef_tight * ep - shift2
    tight_ok = var <= upper_tight + tol

    halves_c = {
        "left": LipschitzUnimodal(split.p_l, p.b, p.s_l, p.s_l, validate=False).estimated_lipschitz(),
        "right": LipschitzUnimodal(split.p_r, p.b, p.s_r, p.s_r, validate=False).estimated_lipschitz(),
    }
    report = [
        ("unimodal", True),
        ("lipschitz", True),
        ("c_s s^2 >= 1", True),
        ("variance decomposition", var_identity),
        ("entropy-power decomposition", ep_identity),
        ("r_v <= 128 (c_s s^2)^4", rv_ok),
        ("tight sandwich", tight_ok),
    ]
    details = {
        "h": h, "mean": mean, "mode": p.b, "beta_l": bl, "beta_r": br, "binary_entropy": hb,
        "var_l": var_l, "var_r": var_r, "h_l": h_l, "h_r": h_r, "r_v": r_v, "cs2": cs2,
        "coefficient": coef, "coefficient_tight": coef_tight, "upper_tight": upper_tight,
        "slack_upper_tight": upper_tight - var,
        "var_identity_residual": var_rebuilt - var, "ep_identity_residual": ep_rebuilt - ep,
        "lipschitz_left_half": halves_c["left"], "lipschitz_right_half": halves_c["right"],
    }
    return BoundCertificate.build(var, ep, upper, "thm3", report, tol, details)
