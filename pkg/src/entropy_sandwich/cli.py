"""Command-line front end.

Exit status: 0 on success, 1 when a certificate's bounds are violated,
2 on usage, specification or hypothesis errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import approximation as approx
from . import bounds
from .densities import GenGaussian, MixtureDensity, PiecewiseLinearDensity, RaisedCosine, UniformComponent
from .density_io import density_from_spec, lipschitz_override, load_spec
from .errors import HypothesisError, SandwichError

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2
FLOAT_FORMAT = ".12g"
SUBCOMMANDS = ("sweep-theta", "certify", "approx-converge", "counterexample", "product")


def fmt(v) -> str:
    """Fixed 12-significant-digit rendering used for every float we write."""
    if isinstance(v, bool) or v is None:
        return json.dumps(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, FLOAT_FORMAT)
    return str(v)


def _round_floats(obj):
    """Round floats to 12 significant digits so JSON output is deterministic too."""
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if not math.isfinite(v) else float(format(v, FLOAT_FORMAT))
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def _json_default(v):
    return str(v)


def to_json(obj) -> str:
    def enc(o):
        if isinstance(o, float) and not math.isfinite(o):
            return "nan" if math.isnan(o) else ("inf" if o > 0 else "-inf")
        if isinstance(o, dict):
            return {k: enc(v) for k, v in o.items()}
        if isinstance(o, list):
            return [enc(v) for v in o]
        return o
    return json.dumps(enc(_round_floats(obj)), indent=2, sort_keys=True, default=_json_default) + "\n"


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    input_path: Path | None
    output_path: Path | None
    tol: float
    format: str

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise ValueError(f"unknown subcommand {self.subcommand!r}")
        if not self.tol > 0:
            raise ValueError("--tol must be positive")
        if self.format not in ("csv", "json"):
            raise ValueError("--format must be csv or json")
        if self.output_path is not None and not self.output_path.parent.is_dir():
            raise ValueError(f"output directory {self.output_path.parent} does not exist")


class UsageError(SandwichError):
    pass


# ---------------------------------------------------------------------------
# certification dispatch


def lipschitz_input(d, spec) -> approx.LipschitzUnimodal:
    return approx.LipschitzUnimodal.from_density(d, lipschitz_c=lipschitz_override(spec))


def infer_theorem(d) -> str:
    if isinstance(d, (GenGaussian, UniformComponent)):
        d = MixtureDensity((1.0,), (d,))
    if isinstance(d, MixtureDensity):
        return "cor2" if all(isinstance(c, UniformComponent) for c in d.components) else "thm1"
    if isinstance(d, (PiecewiseLinearDensity, RaisedCosine)):
        return "thm2" if d.symmetric else "thm3"
    raise UsageError(f"cannot infer a bound for {type(d).__name__}")


def certify_spec(spec: dict, tol: float = bounds.DEFAULT_TOL, theorem: str | None = None):
    """Build the density described by ``spec`` and certify it."""
    d = density_from_spec(spec)
    tag = theorem or infer_theorem(d)
    if isinstance(d, (GenGaussian, UniformComponent)):
        d = MixtureDensity((1.0,), (d,))
    if tag == "lower_only":
        return bounds.certify_lower_only(d, tol)
    if tag in ("thm1", "cor1", "cor2"):
        if not isinstance(d, MixtureDensity):
            raise UsageError(f"--theorem {tag} needs a gengauss, uniform or mixture spec")
        fn = {"thm1": bounds.certify_theorem1, "cor1": bounds.certify_corollary1,
              "cor2": bounds.certify_corollary2}[tag]
        return fn(d, tol)
    if not isinstance(d, (PiecewiseLinearDensity, RaisedCosine)):
        raise UsageError(f"--theorem {tag} needs a bounded Lipschitz density spec")
    p = lipschitz_input(d, spec)
    return approx.certify_theorem2(p, tol) if tag == "thm2" else approx.certify_theorem3(p, tol)


# ---------------------------------------------------------------------------
# subcommands


def theta_grid(theta_min, theta_max, points):
    """Linear grid on [theta_min, theta_max]; theta = 2 is always included when in range."""
    grid = set(np.linspace(theta_min, theta_max, points).tolist())
    if theta_min <= 2.0 <= theta_max:
        grid.add(2.0)
    return sorted(grid)


def cmd_sweep_theta(args):
    if not (0 < args.theta_min < args.theta_max) or args.points < 2:
        raise UsageError("need 0 < --theta-min < --theta-max and --points >= 2")
    if not 0 < args.alpha < 1:
        raise UsageError("--alpha must lie in (0, 1)")
    header = ["theta", "inv_A", "B_r1", "B_r10", "lower_bound"]
    rows = []
    for t in theta_grid(args.theta_min, args.theta_max, args.points):
        thetas, alphas = (args.theta_fixed, t), (args.alpha, 1.0 - args.alpha)
        rows.append([t, bounds.inv_a_theta(t), bounds.b_factor(thetas, alphas, 1.0),
                     bounds.b_factor(thetas, alphas, 10.0), bounds.INV_TWO_PI_E])
    return header, rows, None


def cmd_certify(args):
    if args.input is None:
        raise UsageError("certify needs --input")
    cert = certify_spec(load_spec(args.input), args.tol, args.theorem)
    d = cert.to_dict()
    rows = [[k, d[k]] for k in ("theorem_tag", "variance", "entropy_power", "lower", "upper",
                                "slack_lower", "slack_upper", "passed")]
    rows += [[f"hypothesis:{k}", v] for k, v in cert.hypothesis_report]
    return ["field", "value"], rows, d, (EXIT_OK if cert.passed else EXIT_VIOLATION)


def cmd_approx_converge(args):
    if args.input is None:
        raise UsageError("approx-converge needs --input")
    spec = load_spec(args.input)
    d = density_from_spec(spec)
    if not isinstance(d, (PiecewiseLinearDensity, RaisedCosine)):
        raise UsageError("approx-converge needs a bounded Lipschitz density spec")
    try:
        n_values = [int(v) for v in args.n_values.split(",")]
    except ValueError:
        raise UsageError(f"--n-values must be comma-separated integers, got {args.n_values!r}") from None
    rep = approx.convergence_study(lipschitz_input(d, spec), n_values)
    data = {"n": rep.n_values, "var_gap": rep.var_gap, "ep_ratio_gap": rep.ep_ratio_gap,
            "fitted_var_slope": rep.fitted_var_slope, "fitted_ep_slope": rep.fitted_ep_slope}
    return ["n", "var_gap", "ep_ratio_gap"], rep.rows(), data


def cmd_counterexample(args):
    if args.decades < 0:
        raise UsageError("--decades must be nonnegative")
    eps2 = [args.eps1 * 10.0 ** (-k) for k in range(args.decades + 1)]
    rows = bounds.counterexample_report(args.alpha1, args.eps1, eps2)
    header = ["eps2", "variance", "entropy_power", "ratio", "entropy_power_limit"]
    table = [[r.eps2, r.variance, r.entropy_power, r.ratio, r.entropy_power_limit] for r in rows]
    data = {"rows": [dict(zip(header, row)) for row in table]}
    tail = [r for r in rows if r.eps2 < args.eps1]
    if len(tail) >= 2:
        data["fitted_slope"] = bounds.loglog_slope([r.eps2 for r in tail], [r.ratio for r in tail])
    return header, table, data


def cmd_product(args):
    if args.input is None:
        raise UsageError("product needs --input")
    spec = load_spec(args.input)
    marginals = spec.get("marginals") if isinstance(spec, dict) else spec
    if not isinstance(marginals, list) or not marginals:
        raise UsageError("product input needs a non-empty 'marginals' list")
    certs = [certify_spec(m, args.tol) for m in marginals]
    failed = [i for i, c in enumerate(certs) if not c.passed]
    if failed:
        rows = [[i, c.theorem_tag, c.variance, c.entropy_power, c.upper, c.passed] for i, c in enumerate(certs)]
        return (["marginal", "theorem_tag", "variance", "entropy_power", "upper", "passed"], rows,
                {"marginals": [c.to_dict() for c in certs], "failed": failed}, EXIT_VIOLATION)
    pb = bounds.product_bound(certs)
    rows = [[i, c.theorem_tag, c.variance, c.entropy_power, c.upper, c.passed] for i, c in enumerate(certs)]
    rows.append(["product", "", pb.det_covariance, pb.entropy_power_k, pb.c * pb.entropy_power_k, True])
    data = {"det_covariance": pb.det_covariance, "entropy_power_product": pb.entropy_power_k,
            "c": pb.c, "slack": pb.slack, "marginals": [c.to_dict() for c in certs]}
    return ["marginal", "theorem_tag", "variance", "entropy_power", "upper", "passed"], rows, data


COMMANDS = {
    "sweep-theta": cmd_sweep_theta,
    "certify": cmd_certify,
    "approx-converge": cmd_approx_converge,
    "counterexample": cmd_counterexample,
    "product": cmd_product,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", type=Path, help="JSON density specification")
    common.add_argument("--output", type=Path, help="output file (default: stdout)")
    common.add_argument("--tol", type=float, default=bounds.DEFAULT_TOL, help="certificate tolerance")
    common.add_argument("--format", choices=("csv", "json"), default=None,
                        help="output format (default: json for certify, csv otherwise)")

    parser = argparse.ArgumentParser(prog="entropy-sandwich",
                                     description="Variance versus entropy-power bounds for unimodal densities.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("sweep-theta", parents=[common], help="1/A(theta) and B(theta, r) curves")
    p.add_argument("--theta-min", type=float, default=0.3)
    p.add_argument("--theta-max", type=float, default=5.0)
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--alpha", type=float, default=0.5, help="weight of the fixed-order component")
    p.add_argument("--theta-fixed", type=float, default=2.0, help="order of the fixed component")

    p = sub.add_parser("certify", parents=[common], help="certify a density specification")
    p.add_argument("--theorem", choices=bounds.THEOREM_TAGS, default=None,
                   help="override the bound inferred from the density family")

    p = sub.add_parser("approx-converge", parents=[common], help="step-approximation convergence study")
    p.add_argument("--n-values", default="4,8,16,32,64,128,256")

    p = sub.add_parser("counterexample", parents=[common], help="two-uniform divergence sweep")
    p.add_argument("--alpha1", type=float, default=0.5)
    p.add_argument("--eps1", type=float, default=1.0)
    p.add_argument("--decades", type=int, default=4)

    sub.add_parser("product", parents=[common], help="bound for a product of certified marginals")
    return parser


def _emit(text, output):
    if output is None:
        sys.stdout.write(text)
    else:
        output.write_text(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    fmt_default = "json" if args.subcommand == "certify" else "csv"
    try:
        cfg = RunConfig(args.subcommand, args.input, args.output, args.tol, args.format or fmt_default)
    except ValueError as exc:
        parser.error(str(exc))
    try:
        result = COMMANDS[cfg.subcommand](args)
    except HypothesisError as exc:
        report = {"error": str(exc), "hypothesis_report": [[exc.check or "hypothesis", False]]}
        print(f"error: {exc} [{exc.check}]", file=sys.stderr)
        if cfg.output_path is not None:
            cfg.output_path.write_text(to_json(report))
        return EXIT_USAGE
    except (SandwichError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    header, rows, data, *status = result
    status = status[0] if status else EXIT_OK
    text = to_csv(header, rows) if cfg.format == "csv" else to_json(data if data is not None else
                                                                    {"columns": header, "rows": rows})
    _emit(text, cfg.output_path)
    return status


if __name__ == "__main__":
    sys.exit(main())
