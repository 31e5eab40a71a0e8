"""Univariate densities: generalized Gaussians, uniforms, common-mean mixtures,
piecewise-linear and piecewise-constant densities, and generic wrappers.

Every density exposes vectorized ``pdf_at`` / ``log_pdf_at``, a :class:`Support`,
optional mean/mode hints, a finite integration ``window()`` and the
``breakpoints()`` where the pdf is not smooth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import gammaincc, logsumexp

from . import special
from .errors import DomainError, HypothesisError

TAIL_EXPONENT = 45.0
TAIL_VARIANCE_FRACTION = 1e-13
_LOG2 = math.log(2.0)


@dataclass(frozen=True)
class Support:
    kind: str
    lo: float = -math.inf
    hi: float = math.inf

    def __post_init__(self):
        if self.kind == "bounded":
            if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or not self.lo < self.hi:
                raise DomainError(f"bounded support needs finite lo < hi, got [{self.lo}, {self.hi}]")
        elif self.kind == "real_line":
            if math.isfinite(self.lo) or math.isfinite(self.hi):
                raise DomainError("real_line support must have infinite endpoints")
        else:
            raise DomainError(f"unknown support kind {self.kind!r}")

    @classmethod
    def bounded(cls, lo, hi):
        return cls("bounded", float(lo), float(hi))

    @classmethod
    def real_line(cls):
        return cls("real_line")

    @property
    def is_bounded(self):
        return self.kind == "bounded"

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        return (x >= self.lo) & (x <= self.hi)


class Density:
    """Base class. Subclasses implement ``log_pdf_at`` (or ``pdf_at``) and ``window``."""

    support: Support
    mean_hint: float | None = None
    mode_hint: float | None = None
    symmetric: bool = False

    def pdf_at(self, x):
        return np.exp(self.log_pdf_at(x))

    def log_pdf_at(self, x):
        with np.errstate(divide="ignore"):
            return np.log(self.pdf_at(x))

    def window(self) -> tuple[float, float]:
        return self.support.lo, self.support.hi

    def breakpoints(self) -> tuple[float, ...]:
        return ()


def _positive(name, v):
    v = float(v)
    if not math.isfinite(v) or v <= 0:
        raise DomainError(f"{name} must be finite and positive, got {v!r}")
    return v


# ---------------------------------------------------------------------------
# generalized Gaussian family


def gg_log_normalizer(theta: float, beta: float) -> float:
    theta, beta = _positive("theta", theta), _positive("beta", beta)
    return _LOG2 - math.log(beta) / theta - math.log(theta) + special.log_gamma(1.0 / theta)


def gg_normalizer(theta: float, beta: float) -> float:
    """Z = 2 beta^(-1/theta) Gamma(1/theta) / theta, assembled in log space."""
    return math.exp(gg_log_normalizer(theta, beta))


def gg_variance(theta: float, beta: float) -> float:
    """beta^(-2/theta) Gamma(3/theta) / Gamma(1/theta)."""
    theta, beta = _positive("theta", theta), _positive("beta", beta)
    return math.exp(-2.0 * math.log(beta) / theta
                    + special.log_gamma(3.0 / theta) - special.log_gamma(1.0 / theta))


def gg_entropy(theta: float, beta: float) -> float:
    """h = log Z + 2 beta^(-1/theta) Gamma(1 + 1/theta) / (theta Z), in nats."""
    log_z = gg_log_normalizer(theta, beta)
    second = math.exp(_LOG2 - math.log(beta) / theta - math.log(theta) - log_z
                      + special.log_gamma(1.0 + 1.0 / theta))
    return log_z + second


def gg_beta_for_variance(theta: float, variance: float) -> float:
    """Rate beta giving the requested variance at order theta."""
    theta, variance = _positive("theta", theta), _positive("variance", variance)
    log_ratio = special.log_gamma(3.0 / theta) - special.log_gamma(1.0 / theta)
    return math.exp(0.5 * theta * (log_ratio - math.log(variance)))


def _tail_exponent(theta):
    # smallest cutoff >= 45 whose discarded variance fraction Q(3/theta, T) is negligible
    t = TAIL_EXPONENT
    while gammaincc(3.0 / theta, t) > TAIL_VARIANCE_FRACTION:
        t += 5.0
    return t


@dataclass(frozen=True)
class GenGaussian(Density):
    """p(x) proportional to exp(-beta |x - m|^theta)."""

    m: float = 0.0
    theta: float = 2.0
    beta: float = 0.5
    symmetric: bool = field(default=True, init=False)

    def __post_init__(self):
        _positive("theta", self.theta)
        _positive("beta", self.beta)
        if not math.isfinite(self.m):
            raise DomainError("m must be finite")
        object.__setattr__(self, "_log_z", gg_log_normalizer(self.theta, self.beta))

    @property
    def support(self):
        return Support.real_line()

    @property
    def mean_hint(self):
        return self.m

    @property
    def mode_hint(self):
        return self.m

    def log_pdf_at(self, x):
        x = np.asarray(x, dtype=float)
        return -self.beta * np.abs(x - self.m) ** self.theta - self._log_z

    def half_width(self) -> float:
        """Distance from m at which beta |x - m|^theta reaches the tail cutoff."""
        return (self.tail_exponent() / self.beta) ** (1.0 / self.theta)

    def tail_exponent(self) -> float:
        return _tail_exponent(self.theta)

    def tail_variance_fraction(self) -> float:
        """Fraction of the variance lying outside ``window()``."""
        return float(gammaincc(3.0 / self.theta, self.tail_exponent()))

    def window(self):
        w = self.half_width()
        return self.m - w, self.m + w

    def breakpoints(self):
        return (self.m,)

    @property
    def normalizer(self):
        return math.exp(self._log_z)

    @property
    def variance(self):
        return gg_variance(self.theta, self.beta)

    @property
    def entropy(self):
        return gg_entropy(self.theta, self.beta)


@dataclass(frozen=True)
class UniformComponent(Density):
    """unif(m - 1/(2 eps), m + 1/(2 eps)); height eps."""

    m: float = 0.0
    epsilon: float = 1.0
    symmetric: bool = field(default=True, init=False)

    def __post_init__(self):
        _positive("epsilon", self.epsilon)
        if not math.isfinite(self.m):
            raise DomainError("m must be finite")

    @property
    def half_width(self):
        return 0.5 / self.epsilon

    @property
    def support(self):
        return Support.bounded(self.m - self.half_width, self.m + self.half_width)

    @property
    def mean_hint(self):
        return self.m

    @property
    def mode_hint(self):
        return self.m

    def pdf_at(self, x):
        return np.where(self.support.contains(x), self.epsilon, 0.0)

    def log_pdf_at(self, x):
        return np.where(self.support.contains(x), math.log(self.epsilon), -np.inf)

    def breakpoints(self):
        return (self.m,)

    @property
    def variance(self):
        return 1.0 / (12.0 * self.epsilon**2)

    @property
    def entropy(self):
        return -math.log(self.epsilon)


Component = GenGaussian | UniformComponent


def component_variance(c: Component) -> float:
    return c.variance


@dataclass(frozen=True)
class MixtureDensity(Density):
    """Common-centre convex combination of generalized Gaussians and uniforms."""

    alphas: tuple[float, ...]
    components: tuple[Component, ...]
    symmetric: bool = field(default=True, init=False)

    def __post_init__(self):
        alphas = tuple(float(a) for a in self.alphas)
        comps = tuple(self.components)
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "components", comps)
        if not comps or len(alphas) != len(comps):
            raise DomainError("mixture needs one positive weight per component")
        for c in comps:
            if not isinstance(c, (GenGaussian, UniformComponent)):
                raise DomainError(f"unsupported mixture component {type(c).__name__}")
        if any(not (a > 0 and math.isfinite(a)) for a in alphas):
            raise DomainError(f"mixture weights must be positive, got {alphas}")
        if abs(math.fsum(alphas) - 1.0) > 1e-12:
            raise DomainError(f"mixture weights must sum to 1, got {math.fsum(alphas)!r}")
        centers = {c.m for c in comps}
        if len(centers) != 1:
            raise HypothesisError(
                f"mixture components must share a common mean, got centres {sorted(centers)}",
                check="common mean",
            )

    @classmethod
    def of(cls, pairs: Sequence[tuple[float, Component]]) -> "MixtureDensity":
        return cls(tuple(a for a, _ in pairs), tuple(c for _, c in pairs))

    @property
    def m(self):
        return self.components[0].m

    @property
    def mean_hint(self):
        return self.m

    @property
    def mode_hint(self):
        return self.m

    @property
    def has_gengauss(self):
        return any(isinstance(c, GenGaussian) for c in self.components)

    @property
    def has_uniform(self):
        return any(isinstance(c, UniformComponent) for c in self.components)

    @property
    def support(self):
        if self.has_gengauss:
            return Support.real_line()
        w = max(c.half_width for c in self.components)
        return Support.bounded(self.m - w, self.m + w)

    def window(self):
        if not self.has_gengauss:
            s = self.support
            return s.lo, s.hi
        w = max(c.half_width() if isinstance(c, GenGaussian) else c.half_width
                for c in self.components)
        return self.m - w, self.m + w

    def breakpoints(self):
        pts = {self.m}
        for c in self.components:
            if isinstance(c, UniformComponent):
                pts.update((c.support.lo, c.support.hi))
        return tuple(sorted(pts))

    def pdf_at(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for a, c in zip(self.alphas, self.components):
            out = out + a * c.pdf_at(x)
        return out

    def log_pdf_at(self, x):
        x = np.asarray(x, dtype=float)
        stacked = np.stack([math.log(a) + c.log_pdf_at(x)
                            for a, c in zip(self.alphas, self.components)])
        with np.errstate(divide="ignore"):
            return logsumexp(stacked, axis=0)

    @property
    def variance(self):
        return mixture_variance(self)

    def component_variances(self) -> list[float]:
        return [component_variance(c) for c in self.components]


def mixture_pdf(mix: MixtureDensity, x):
    """Pointwise convex combination of the component pdfs."""
    return mix.pdf_at(x)


def mixture_variance(mix: MixtureDensity) -> float:
    """sum_i alpha_i sigma_i^2 from the closed-form component variances."""
    return math.fsum(a * component_variance(c) for a, c in zip(mix.alphas, mix.components))


# ---------------------------------------------------------------------------
# bounded densities given by formulas


@dataclass(frozen=True)
class PiecewiseLinearDensity(Density):
    """Linear interpolation of ``knots`` (x_k, y_k); zero outside [x_0, x_last].

    Endpoints may carry nonzero height; the density is normalized on
    construction only if ``normalize`` is set, otherwise the knots must
    already integrate to 1.
    """

    xs: tuple[float, ...]
    ys: tuple[float, ...]
    mode_hint: float | None = None
    normalize: bool = False

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        ys = np.asarray(self.ys, dtype=float)
        if xs.ndim != 1 or xs.size < 2 or xs.shape != ys.shape:
            raise DomainError("piecewise-linear density needs matching knot arrays of length >= 2")
        if np.any(np.diff(xs) <= 0):
            raise DomainError("knot abscissae must be strictly increasing")
        if np.any(ys < 0) or not np.all(np.isfinite(ys)):
            raise DomainError("knot heights must be finite and nonnegative")
        area = float(np.sum(0.5 * (ys[1:] + ys[:-1]) * np.diff(xs)))
        if self.normalize:
            ys = ys / area
        elif abs(area - 1.0) > 1e-12:
            raise DomainError(f"knots integrate to {area!r}, not 1")
        object.__setattr__(self, "xs", tuple(xs.tolist()))
        object.__setattr__(self, "ys", tuple(ys.tolist()))
        object.__setattr__(self, "normalize", False)
        if self.mode_hint is None:
            object.__setattr__(self, "mode_hint", float(xs[int(np.argmax(ys))]))

    @classmethod
    def triangle(cls, b=0.0, left=1.0, right=1.0):
        """Triangle with apex at ``b`` and feet at b - left, b + right."""
        height = 2.0 / (left + right)
        return cls((b - left, b, b + right), (0.0, height, 0.0), mode_hint=b)

    @classmethod
    def trapezoid(cls, b, left, right, plateau_left, plateau_right):
        """Trapezoid with a flat top on [b - plateau_left, b + plateau_right]."""
        if not (0.0 <= plateau_left < left and 0.0 <= plateau_right < right):
            raise DomainError("plateau must sit strictly inside the support")
        xs = [b - left, b - plateau_left, b + plateau_right, b + right]
        ys = [0.0, 1.0, 1.0, 0.0]
        if plateau_left == 0.0 and plateau_right == 0.0:
            xs, ys = [b - left, b, b + right], [0.0, 1.0, 0.0]
        return cls(tuple(xs), tuple(ys), mode_hint=b, normalize=True)

    @property
    def support(self):
        return Support.bounded(self.xs[0], self.xs[-1])

    @property
    def symmetric(self):
        xs, ys = np.asarray(self.xs), np.asarray(self.ys)
        c = 0.5 * (xs[0] + xs[-1])
        return bool(np.allclose(2 * c - xs[::-1], xs, rtol=0, atol=1e-14)
                    and np.allclose(ys[::-1], ys, rtol=0, atol=1e-14))

    @property
    def mean_hint(self):
        return 0.5 * (self.xs[0] + self.xs[-1]) if self.symmetric else None

    @property
    def lipschitz(self) -> float:
        """Exact Lipschitz constant: the largest absolute slope, counting jumps at the ends."""
        xs, ys = np.asarray(self.xs), np.asarray(self.ys)
        slope = float(np.max(np.abs(np.diff(ys) / np.diff(xs))))
        if ys[0] > 0 or ys[-1] > 0:
            return math.inf
        return slope

    def pdf_at(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(self.support.contains(x), np.interp(x, self.xs, self.ys), 0.0)

    def breakpoints(self):
        return tuple(self.xs[1:-1])


@dataclass(frozen=True)
class RaisedCosine(Density):
    """(1 + cos(pi (x - m) / s)) / (2 s) on [m - s, m + s]; Lipschitz constant pi / (2 s^2)."""

    m: float = 0.0
    s: float = 1.0
    symmetric: bool = field(default=True, init=False)

    def __post_init__(self):
        _positive("s", self.s)

    @property
    def support(self):
        return Support.bounded(self.m - self.s, self.m + self.s)

    @property
    def mean_hint(self):
        return self.m

    @property
    def mode_hint(self):
        return self.m

    @property
    def lipschitz(self):
        return math.pi / (2.0 * self.s**2)

    def pdf_at(self, x):
        x = np.asarray(x, dtype=float)
        val = (1.0 + np.cos(math.pi * (x - self.m) / self.s)) / (2.0 * self.s)
        return np.where(self.support.contains(x), val, 0.0)

    def breakpoints(self):
        return (self.m,)


@dataclass(frozen=True)
class PiecewiseConstantDensity(Density):
    """Step density with ``heights[k]`` on [edges[k], edges[k+1])."""

    edges: tuple[float, ...]
    heights: tuple[float, ...]
    mode_hint: float | None = None
    mean_hint: float | None = None
    symmetric: bool = False

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=float)
        h = np.asarray(self.heights, dtype=float)
        if e.ndim != 1 or e.size != h.size + 1 or h.size < 1:
            raise DomainError("need len(edges) == len(heights) + 1 >= 2")
        if np.any(np.diff(e) <= 0) or np.any(h < 0):
            raise DomainError("edges must increase and heights be nonnegative")
        mass = math.fsum((h * np.diff(e)).tolist())
        if abs(mass - 1.0) > 1e-10:
            raise DomainError(f"step density integrates to {mass!r}, not 1")
        object.__setattr__(self, "edges", tuple(e.tolist()))
        object.__setattr__(self, "heights", tuple(h.tolist()))

    @property
    def support(self):
        return Support.bounded(self.edges[0], self.edges[-1])

    def pdf_at(self, x):
        x = np.asarray(x, dtype=float)
        e = np.asarray(self.edges)
        k = np.clip(np.searchsorted(e, x, side="right") - 1, 0, len(self.heights) - 1)
        h = np.asarray(self.heights)[k]
        return np.where(self.support.contains(x), h, 0.0)

    def breakpoints(self):
        return tuple(self.edges[1:-1])

    def exact_entropy(self) -> float:
        """-sum width * height * ln(height) over cells with positive height."""
        h = np.asarray(self.heights)
        w = np.diff(np.asarray(self.edges))
        pos = h > 0
        return -math.fsum((w[pos] * h[pos] * np.log(h[pos])).tolist())

    def exact_mean(self) -> float:
        e = np.asarray(self.edges)
        h = np.asarray(self.heights)
        return math.fsum((h * (e[1:] ** 2 - e[:-1] ** 2) / 2.0).tolist())

    def exact_variance(self) -> float:
        e = np.asarray(self.edges)
        h = np.asarray(self.heights)
        mu = self.exact_mean()
        lo, hi = e[:-1] - mu, e[1:] - mu
        return math.fsum((h * (hi**3 - lo**3) / 3.0).tolist())

    def cdf_at_edges(self) -> np.ndarray:
        h = np.asarray(self.heights)
        w = np.diff(np.asarray(self.edges))
        return np.concatenate([[0.0], np.cumsum(h * w)])


@dataclass(frozen=True)
class FunctionDensity(Density):
    """User-supplied pdf on a bounded support.

    Normalization is verified by quadrature and the mode hint by a grid
    check at construction.
    """

    pdf: Callable = None
    lo: float = -1.0
    hi: float = 1.0
    mode_hint: float | None = None
    mean_hint: float | None = None
    symmetric: bool = False
    kinks: tuple[float, ...] = ()
    check_points: int = 2001

    def __post_init__(self):
        if self.pdf is None:
            raise DomainError("FunctionDensity needs a pdf callable")
        from .quadrature import integrate

        lo, hi = float(self.lo), float(self.hi)
        Support.bounded(lo, hi)
        mass = integrate(self._raw, lo, hi, 1e-12, breakpoints=self.kinks).value
        if abs(mass - 1.0) > 1e-8:
            raise DomainError(f"pdf integrates to {mass!r}, not 1")
        if self.mode_hint is not None:
            grid = np.linspace(lo, hi, self.check_points)
            peak = float(np.max(self._raw(grid)))
            if float(self._raw(np.array([self.mode_hint]))[0]) < peak * (1 - 1e-9):
                raise HypothesisError(f"mode_hint {self.mode_hint} is not the grid maximum", check="mode")

    def _raw(self, x):
        x = np.asarray(x, dtype=float)
        return np.asarray(self.pdf(x), dtype=float) * np.ones_like(x)

    @property
    def support(self):
        return Support.bounded(self.lo, self.hi)

    def pdf_at(self, x):
        x = np.asarray(x, dtype=float)
        inside = self.support.contains(x)
        return np.where(inside, self._raw(np.where(inside, x, self.lo)), 0.0)

    def breakpoints(self):
        return tuple(self.kinks)


@dataclass(frozen=True)
class AffineDensity(Density):
    """Density of loc + scale * X for X ~ base."""

    base: Density
    loc: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        _positive("scale", self.scale)

    def _map(self, v):
        return None if v is None else self.loc + self.scale * v

    @property
    def support(self):
        s = self.base.support
        if not s.is_bounded:
            return s
        return Support.bounded(self._map(s.lo), self._map(s.hi))

    @property
    def symmetric(self):
        return self.base.symmetric

    @property
    def mean_hint(self):
        return self._map(self.base.mean_hint)

    @property
    def mode_hint(self):
        return self._map(self.base.mode_hint)

    def pdf_at(self, x):
        x = np.asarray(x, dtype=float)
        return self.base.pdf_at((x - self.loc) / self.scale) / self.scale

    def log_pdf_at(self, x):
        x = np.asarray(x, dtype=float)
        return self.base.log_pdf_at((x - self.loc) / self.scale) - math.log(self.scale)

    def window(self):
        lo, hi = self.base.window()
        return self._map(lo), self._map(hi)

    def breakpoints(self):
        return tuple(self._map(b) for b in self.base.breakpoints())


def scaled(d: Density, gamma: float) -> AffineDensity:
    """p_gamma(x) = gamma p(gamma x)."""
    return AffineDensity(d, 0.0, 1.0 / _positive("gamma", gamma))


def shifted(d: Density, delta: float) -> AffineDensity:
    """p(x - delta)."""
    return AffineDensity(d, float(delta), 1.0)


def is_unimodal_on_grid(d: Density, mode: float | None = None, points: int = 2001,
                        rel_tol: float = 1e-12) -> bool:
    """Non-decreasing left of the mode and non-increasing right of it, on a grid."""
    mode = d.mode_hint if mode is None else mode
    if mode is None:
        raise DomainError("a mode is required for the unimodality check")
    lo, hi = d.window()
    left = np.linspace(lo, mode, points)
    right = np.linspace(mode, hi, points)
    pl, pr = d.pdf_at(left), d.pdf_at(right)
    slack = rel_tol * float(max(np.max(pl), np.max(pr)))
    return bool(np.all(np.diff(pl) >= -slack) and np.all(np.diff(pr) <= slack))
