"""JSON density specifications.

Recognised families::

    {"family": "gengauss", "m": 0, "theta": 2, "beta": 0.5}
    {"family": "uniform", "m": 0, "epsilon": 1}
    {"family": "mixture", "components": [{"alpha": 0.5, "family": "gengauss", ...}, ...]}
    {"family": "piecewise_linear", "xs": [...], "ys": [...]}
    {"family": "triangle", "b": 0, "left": 1, "right": 1}
    {"family": "trapezoid", "b": 0, "left": 1, "right": 1, "plateau_left": 0.2, "plateau_right": 0.2}
    {"family": "raised_cosine", "m": 0, "s": 1}

Any bounded family may carry an optional "lipschitz" entry overriding the
exact constant. ``density_to_spec`` emits the canonical form, which
re-parses to an equal density.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from .densities import GenGaussian, MixtureDensity, PiecewiseLinearDensity, RaisedCosine, UniformComponent
from .errors import DomainError

FAMILIES = ("gengauss", "uniform", "mixture", "piecewise_linear", "triangle", "trapezoid", "raised_cosine")
LIPSCHITZ_FAMILIES = ("piecewise_linear", "triangle", "trapezoid", "raised_cosine")


class SpecError(DomainError):
    """Malformed density specification; ``field`` names the offending entry."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


def _num(spec, key, default=None, where="spec"):
    if key not in spec:
        if default is None:
            raise SpecError(f"{where}: missing field '{key}'", key)
        return default
    v = spec[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise SpecError(f"{where}: field '{key}' must be a finite number, got {v!r}", key)
    return float(v)


def _nums(spec, key, where="spec"):
    v = spec.get(key)
    if not isinstance(v, list) or not v:
        raise SpecError(f"{where}: field '{key}' must be a non-empty list of numbers", key)
    try:
        return tuple(_num({key: x}, key, where=where) for x in v)
    except SpecError:
        raise SpecError(f"{where}: field '{key}' must contain only finite numbers", key) from None


def _build(spec, where):
    if not isinstance(spec, dict):
        raise SpecError(f"{where}: expected a JSON object", "family")
    family = spec.get("family")
    if family not in FAMILIES:
        raise SpecError(f"{where}: field 'family' must be one of {', '.join(FAMILIES)}, got {family!r}", "family")
    try:
        if family == "gengauss":
            return GenGaussian(_num(spec, "m", 0.0, where), _num(spec, "theta", where=where),
                               _num(spec, "beta", where=where))
        if family == "uniform":
            return UniformComponent(_num(spec, "m", 0.0, where), _num(spec, "epsilon", where=where))
        if family == "mixture":
            comps = spec.get("components")
            if not isinstance(comps, list) or not comps:
                raise SpecError(f"{where}: field 'components' must be a non-empty list", "components")
            pairs = []
            for i, c in enumerate(comps):
                sub = f"{where}.components[{i}]"
                if not isinstance(c, dict) or c.get("family") not in ("gengauss", "uniform"):
                    raise SpecError(f"{sub}: field 'family' must be gengauss or uniform", "family")
                pairs.append((_num(c, "alpha", where=sub), _build(c, sub)))
            return MixtureDensity.of(pairs)
        if family == "piecewise_linear":
            return PiecewiseLinearDensity(_nums(spec, "xs", where), _nums(spec, "ys", where),
                                          normalize=bool(spec.get("normalize", False)))
        if family == "triangle":
            return PiecewiseLinearDensity.triangle(_num(spec, "b", 0.0, where), _num(spec, "left", where=where),
                                                   _num(spec, "right", where=where))
        if family == "trapezoid":
            return PiecewiseLinearDensity.trapezoid(
                _num(spec, "b", 0.0, where), _num(spec, "left", where=where), _num(spec, "right", where=where),
                _num(spec, "plateau_left", where=where), _num(spec, "plateau_right", where=where))
        return RaisedCosine(_num(spec, "m", 0.0, where), _num(spec, "s", where=where))
    except SpecError:
        raise
    except DomainError as exc:
        raise SpecError(f"{where}: {exc}", family) from exc


def density_from_spec(spec: dict):
    """Build a density from a parsed specification."""
    return _build(spec, "spec")


def lipschitz_override(spec: dict) -> float | None:
    if "lipschitz" not in spec:
        return None
    c = _num(spec, "lipschitz")
    if c <= 0:
        raise SpecError("spec: field 'lipschitz' must be positive", "lipschitz")
    return c


def density_to_spec(d) -> dict:
    """Canonical specification of a density built by :func:`density_from_spec`."""
    if isinstance(d, GenGaussian):
        return {"family": "gengauss", "m": d.m, "theta": d.theta, "beta": d.beta}
    if isinstance(d, UniformComponent):
        return {"family": "uniform", "m": d.m, "epsilon": d.epsilon}
    if isinstance(d, MixtureDensity):
        return {"family": "mixture",
                "components": [{"alpha": a, **density_to_spec(c)} for a, c in zip(d.alphas, d.components)]}
    if isinstance(d, PiecewiseLinearDensity):
        return {"family": "piecewise_linear", "xs": list(d.xs), "ys": list(d.ys)}
    if isinstance(d, RaisedCosine):
        return {"family": "raised_cosine", "m": d.m, "s": d.s}
    raise DomainError(f"no specification format for {type(d).__name__}")


def load_spec(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})", "json") from exc


def dump_spec(d, path=None) -> str:
    text = json.dumps(density_to_spec(d), indent=2, sort_keys=True) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text
