"""Command-line interface: ``weissvm {fit,test,sample,moments,regress,pdf-grid}``.

JSON and CSV results go to stdout (or ``--out``); diagnostics go to stderr.
Exit status is 0 on success, 1 on a command-level error and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import inference, moments, regression
from .data import DataError, Dataset, load_csv, write_csv
from .models import (
    GGSSVMParams,
    IndepParams,
    JWParams,
    MSKSParams,
    WeiSSVMParams,
    ggssvm_logpdf,
    indep_logpdf,
    jw_logpdf,
    ms_ks_logpdf,
    weissvm_logpdf,
)
from .sampling import sample_weissvm

MODEL_NAMES = ("weissvm", "ggssvm", "jw", "indep", "ms", "ks")
PARAM_CLASSES = {
    "weissvm": WeiSSVMParams,
    "ggssvm": GGSSVMParams,
    "jw": JWParams,
    "indep": IndepParams,
    "ms": MSKSParams,
    "ks": MSKSParams,
}
LOGPDFS = {
    "weissvm": weissvm_logpdf,
    "ggssvm": ggssvm_logpdf,
    "jw": jw_logpdf,
    "indep": indep_logpdf,
    "ms": ms_ks_logpdf,
    "ks": ms_ks_logpdf,
}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# command implementations (importable, no I/O beyond explicit targets)


def cmd_fit(dataset: Dataset, models, seed: int = 0, starts: int = 5):
    """Fit each model; returns report rows sorted by AIC with failures last."""
    models = [m for m in models if m]
    if not models:
        raise UsageError("no models requested")
    for m in models:
        if m not in MODEL_NAMES:
            raise UsageError(f"unknown model {m!r}")
    results = inference.fit_models(models, dataset.theta, dataset.x, seed=seed, n_random_starts=starts)
    rows, failed = [], []
    for m, res in results.items():
        if isinstance(res, inference.FitResult):
            rows.append(res.to_dict())
        else:
            failed.append({"model": m, "error": f"{type(res).__name__}: {res}"})
    rows.sort(key=lambda r: r["aic"])
    return rows + failed


def format_fit_table(rows) -> str:
    lines = [f"{'model':<9} {'estimates':<72} {'MLL':>10} {'AIC':>9} {'BIC':>9}"]
    for r in rows:
        if "error" in r:
            lines.append(f"{r['model']:<9} failed: {r['error']}")
            continue
        est = " ".join(f"{k}={v:.2f}" for k, v in r["estimates"].items())
        flag = "" if r["converged"] else "  (not converged)"
        lines.append(f"{r['model']:<9} {est:<72} {r['mll']:>10.2f} {r['aic']:>9.2f} {r['bic']:>9.2f}{flag}")
    return "\n".join(lines)


def cmd_test(dataset: Dataset, which: str, seed: int = 0, starts: int = 5):
    tests = {"jw": inference.lr_test_jw, "indep": inference.lr_test_indep}
    if which not in tests:
        raise UsageError(f"unknown test {which!r}")
    return tests[which](dataset.theta, dataset.x, seed=seed, n_random_starts=starts).to_dict()


def cmd_sample(params: WeiSSVMParams, n: int, seed, out):
    if n < 1:
        raise UsageError("n must be >= 1")
    theta, x = sample_weissvm(params, n, seed)
    write_csv(out, {"theta": theta, "x": x})
    return theta, x


def pdf_grid(model: str, params, theta_steps: int, x_max: float, x_steps: int, x_min: float = 0.0):
    """Density on cell midpoints of ``[x_min, x_max) x [-pi, pi)``; returns flattened columns."""
    if theta_steps < 2 or x_steps < 2:
        raise UsageError("grid needs at least 2 steps in each direction")
    if not x_max > x_min:
        raise UsageError("x_max must exceed x_min")
    if model in ("weissvm", "ggssvm", "jw", "indep") and x_min < 0:
        raise UsageError("cylinder models live on x >= 0")
    dt = 2.0 * math.pi / theta_steps
    dx = (x_max - x_min) / x_steps
    t = -math.pi + (np.arange(theta_steps) + 0.5) * dt
    xs = x_min + (np.arange(x_steps) + 0.5) * dx
    tt, xx = np.meshgrid(t, xs, indexing="ij")
    dens = np.exp(LOGPDFS[model](params, tt, xx))
    return {"theta": tt.ravel(), "x": xx.ravel(), "density": dens.ravel()}


def cmd_pdf_grid(model, params, theta_steps, x_max, x_steps, out, x_min=0.0):
    cols = pdf_grid(model, params, theta_steps, x_max, x_steps, x_min)
    write_csv(out, cols)
    return cols


def cmd_moments(params: WeiSSVMParams):
    report = {
        "params": params.as_dict(),
        "moments": moments.named_moments(params).as_dict(),
        "centered_moments": moments.named_moments(params, centered=True).as_dict(),
        "covariances": moments.covariances(params).as_dict(),
    }
    try:
        report["correlations"] = moments.correlations(params).as_dict()
        report["r2"] = moments.circular_linear_correlation(params)
    except moments.UndefinedCorrelationError as exc:
        report["correlations"] = None
        report["r2"] = None
        report["warning"] = str(exc)
    return report


def cmd_regress(params: WeiSSVMParams, grid, direction: str):
    grid = np.asarray(grid, dtype=float)
    if direction == "x_given_theta":
        return {
            "theta": grid,
            "cond_mean_x": regression.cond_mean_x(params, grid),
            "cond_var_x": regression.cond_var_x(params, grid),
        }
    if direction == "theta_given_x":
        if np.any(grid < 0):
            raise UsageError("x grid must be nonnegative")
        try:
            direc = regression.cond_mean_direction(params, grid)
        except regression.UndefinedDirectionError:
            # NaN marks points where the resultant vanishes
            c = regression.conditional_concentration(params, grid)
            direc = np.where(c == 0, np.nan, params.mu)
        return {
            "x": grid,
            "cond_mean_direction": direc,
            "cond_mean_resultant": regression.cond_mean_resultant(params, grid),
        }
    raise UsageError(f"unknown direction {direction!r}")


# ---------------------------------------------------------------------------
# argument parsing


def parse_params(model: str, text: str | None = None, json_path: str | None = None, angle_unit="radians"):
    """Build a parameter object from ``name=value,...`` text or a JSON file.

    The JSON may be a fit report (object or array, as printed by ``fit``) or a
    bare mapping of parameter names to values.
    """
    cls = PARAM_CLASSES[model]
    values = {}
    if json_path:
        doc = json.loads(Path(json_path).read_text(encoding="utf-8"))
        if isinstance(doc, list):
            doc = next((d for d in doc if d.get("model") == model), None)
            if doc is None:
                raise UsageError(f"{json_path}: no {model} entry")
        values.update(doc.get("estimates", doc) if isinstance(doc, dict) else {})
        values = {k: v for k, v in values.items() if k in cls.names()}
    if text:
        for item in text.split(","):
            if not item.strip():
                continue
            if "=" not in item:
                raise UsageError(f"bad parameter spec {item!r}; use name=value")
            k, v = item.split("=", 1)
            k = k.strip()
            if k == "lambda":
                k = "lam"
            if k not in cls.names():
                raise UsageError(f"{model} has no parameter {k!r}; expected {cls.names()}")
            try:
                values[k] = float(v)
            except ValueError:
                raise UsageError(f"parameter {k!r} is not a number: {v!r}") from None
    if angle_unit == "degrees" and not json_path:
        for k in ("mu", "nu", "mu1", "mu2"):
            if k in values:
                values[k] = math.radians(values[k])
    try:
        return cls(**values)
    except TypeError as exc:
        raise UsageError(f"incomplete parameters for {model}: {exc}") from None


def parse_grid(text: str) -> np.ndarray:
    """``start:stop:num`` (inclusive linspace) or a comma-separated list."""
    try:
        if ":" in text:
            a, b, n = text.split(":")
            return np.linspace(float(a), float(b), int(n))
        return np.array([float(v) for v in text.split(",") if v.strip()])
    except ValueError:
        raise UsageError(f"bad grid {text!r}") from None


def _split_models(values):
    out = []
    for v in values or []:
        out.extend(s.strip() for s in v.split(","))
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="weissvm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, data=True):
        if data:
            p.add_argument("data", help="CSV file with columns theta,x")
        p.add_argument("--angle-unit", choices=("radians", "degrees"), default="radians")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None, help="output file (default: stdout)")
        p.add_argument("--json", action="store_true", help="print JSON instead of a text table")

    def params(p, with_model=False):
        if with_model:
            p.add_argument("--model", choices=MODEL_NAMES, default="weissvm")
        p.add_argument("--params", default=None, help="name=value,... e.g. alpha=2,beta=1,mu=0,kappa=1,lam=0.5")
        p.add_argument("--params-json", default=None, help="fit report or parameter mapping (JSON)")

    p = sub.add_parser("fit", help="fit models and compare by AIC/BIC")
    common(p)
    p.add_argument("--model", action="append", help="model(s), repeatable or comma separated")
    p.add_argument("--starts", type=int, default=5, help="random restarts per model")

    p = sub.add_parser("test", help="likelihood ratio test")
    common(p)
    p.add_argument("--which", choices=("jw", "indep"), required=True)
    p.add_argument("--starts", type=int, default=5)

    p = sub.add_parser("sample", help="draw from a WeiSSVM")
    common(p, data=False)
    params(p)
    p.add_argument("-n", type=int, required=True)

    p = sub.add_parser("moments", help="analytic moments, correlations and R^2")
    common(p, data=False)
    params(p)

    p = sub.add_parser("regress", help="conditional means / directions over a grid")
    common(p, data=False)
    params(p)
    p.add_argument("--direction", choices=("x_given_theta", "theta_given_x"), required=True)
    p.add_argument("--grid", required=True, help="start:stop:num or comma-separated values")

    p = sub.add_parser("pdf-grid", help="density on a rectangular grid")
    common(p, data=False)
    params(p, with_model=True)
    p.add_argument("--theta-steps", type=int, default=200)
    p.add_argument("--x-steps", type=int, default=200)
    p.add_argument("--x-max", type=float, required=True)
    p.add_argument("--x-min", type=float, default=0.0)
    return parser


def _emit_json(obj, out):
    text = json.dumps(obj, indent=2, allow_nan=True)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _run(args) -> int:
    if args.command in ("fit", "test"):
        ds = load_csv(args.data, args.angle_unit)
        print(f"read {len(ds)} observations from {ds.source_path}", file=sys.stderr)
        if args.command == "fit":
            models = _split_models(args.model) if args.model is not None else list(MODEL_NAMES)
            rows = cmd_fit(ds, models, seed=args.seed, starts=args.starts)
            if args.json or args.out:
                _emit_json(rows, args.out)
            else:
                print(format_fit_table(rows))
        else:
            _emit_json(cmd_test(ds, args.which, seed=args.seed, starts=args.starts), args.out)
        return 0

    model = getattr(args, "model", "weissvm")
    params = parse_params(model, args.params, args.params_json, args.angle_unit)
    out = args.out or sys.stdout
    if args.command == "sample":
        cmd_sample(params, args.n, args.seed, out)
    elif args.command == "moments":
        _emit_json(cmd_moments(params), args.out)
    elif args.command == "regress":
        grid = parse_grid(args.grid)
        if args.direction == "x_given_theta" and args.angle_unit == "degrees":
            grid = np.deg2rad(grid)
        write_csv(out, cmd_regress(params, grid, args.direction))
    elif args.command == "pdf-grid":
        cmd_pdf_grid(model, params, args.theta_steps, args.x_max, args.x_steps, out, args.x_min)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"weissvm: error: {exc}", file=sys.stderr)
        return 2
    except (DataError, ValueError, OSError, RuntimeError) as exc:
        print(f"weissvm: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
