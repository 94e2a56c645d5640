"""Command-line entry point: ``ggmech {calibrate,run,bench,verify}``.

Exit codes: 0 on success, 1 when a verification fails, 2 on usage or
parameter errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from .analysis.estimators import estimate_error_norms
from .calibration import (
    MechanismSpec,
    PrivacyBudget,
    calibrate_composed,
    calibrate_sigma_ggauss,
    calibrate_sigma_pq,
    calibration_record,
)
from .composed import composed_mechanism
from .errors import CalibrationError, NumericError, ParameterError
from .mechanisms import gaussian_std, laplace_scale, run_mechanism
from .sparse_vector import SvConfig, numeric_sparse_detailed, sv_accuracy_alpha
from .streams import RandomStream
from .suites import ALL, SUITES, SuiteConfig, run_suite, summarize

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
MECHANISMS = ("laplace", "gaussian", "ggauss", "ggauss_pq", "composed", "sv")


class UsageError(Exception):
    pass


# Dataset ingestion


def parse_dataset(text: str, fmt: str | None = None) -> np.ndarray:
    """Parse a true-answer vector from CSV or a flat JSON array.

    CSV holds one value per line or a single row. Errors name the
    offending line (CSV) or array position (JSON).
    """
    stripped = text.strip()
    if fmt is None:
        fmt = "json" if stripped.startswith("[") else "csv"
    if fmt == "json":
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ParameterError(f"malformed JSON dataset at line {exc.lineno}: {exc.msg}") from None
        if not isinstance(data, list):
            raise ParameterError("a JSON dataset must be a flat array of numbers")
        values = []
        for i, v in enumerate(data):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ParameterError(f"JSON dataset entry {i} is not a number: {v!r}")
            values.append(float(v))
        return _finite(values, "entry")
    rows = [(n, row) for n, row in enumerate(csv.reader(io.StringIO(text)), start=1)
            if any(cell.strip() for cell in row)]
    if len(rows) == 1:
        line, row = rows[0]
        cells = [(line, c) for c in row]
    else:
        cells = []
        for line, row in rows:
            row = [c for c in row if c.strip()]
            if len(row) != 1:
                raise ParameterError(f"line {line}: expected one value per line, got {len(row)}")
            cells.append((line, row[0]))
    values = []
    for line, cell in cells:
        try:
            values.append(float(cell))
        except ValueError:
            raise ParameterError(f"line {line}: not a number: {cell.strip()!r}") from None
        if not math.isfinite(values[-1]):
            raise ParameterError(f"line {line}: value is not finite: {cell.strip()!r}")
    if not values:
        raise ParameterError("the dataset is empty")
    return np.asarray(values)


def _finite(values, what):
    if not values:
        raise ParameterError("the dataset is empty")
    for i, v in enumerate(values):
        if not math.isfinite(v):
            raise ParameterError(f"dataset {what} {i} is not finite")
    return np.asarray(values)


def load_dataset(args) -> np.ndarray:
    if args.values is not None:
        return parse_dataset(args.values.replace(";", ","), "csv")
    if args.data is None:
        raise UsageError("run needs --data PATH or --values")
    path = Path(args.data)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParameterError(f"cannot read dataset {path}: {exc.strerror}") from None
    return parse_dataset(text, "json" if path.suffix.lower() == ".json" else None)


# Output


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    return x


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), allow_nan=False)


def _flatten(d: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, (list, tuple)):
            out[key] = dumps(v)
        else:
            out[key] = v
    return out


def format_rows(rows: list[dict], fmt: str) -> str:
    """Render flat-ish records as JSON lines, CSV or an aligned table."""
    if fmt == "json":
        return "".join(dumps(r) + "\n" for r in rows)
    flat = [_flatten(_jsonable(r)) for r in rows]
    cols: list[str] = []
    for r in flat:
        cols.extend(c for c in r if c not in cols)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        w.writerows(flat)
        return buf.getvalue()
    cells = [[_cell(r.get(c)) for c in cols] for r in flat]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip()]
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() for row in cells]
    return "\n".join(lines) + "\n"


def _cell(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    # auto-generated seeds are echoed so every result stays reproducible
    return int(np.random.SeedSequence().entropy % (1 << 63))


def _budget(args, need_delta: bool = True) -> PrivacyBudget:
    if args.eps is None:
        raise UsageError("--eps is required")
    if args.delta is None:
        if need_delta:
            raise UsageError("--delta is required")
        return PrivacyBudget(args.eps, 0.5)
    return PrivacyBudget(args.eps, args.delta)


# Commands


def cmd_calibrate(args) -> int:
    if args.k is None or args.p is None:
        raise UsageError("calibrate needs --k and --p")
    budget = _budget(args)
    family = args.mechanism or "ggauss"
    if family not in ("ggauss", "ggauss_pq", "composed"):
        raise UsageError(f"calibrate supports ggauss, ggauss_pq and composed, not {family!r}")
    if family == "composed" and args.t is None:
        raise UsageError("--t is required for the composed mechanism")
    if family == "ggauss_pq" and args.q is None:
        raise UsageError("--q is required for ggauss_pq")
    rec = calibration_record(args.k, args.p, budget, family=family, q=args.q, t=args.t,
                             c_sigma=args.c_sigma, log_base=args.log_base)
    if args.format == "json":
        emit(json.dumps(_jsonable(rec), indent=2) + "\n", args.out)
    else:
        emit(format_rows([rec], args.format), args.out)
    return EXIT_OK


def _sv_config(args, k: int) -> SvConfig:
    budget = _budget(args)
    count = args.budget_count
    beta = args.beta
    if args.alpha is not None:
        alpha = args.alpha
    else:
        probe = SvConfig.from_budget(1.0, count, budget.epsilon, budget.delta, beta)
        alpha = sv_accuracy_alpha(k, beta, probe.comparison_noise_scale)
    config = SvConfig.from_budget(alpha, count, budget.epsilon, budget.delta, beta)
    config.check_length(k)
    return config


def build_mechanism(args, k: int):
    """Return ``(label, f)`` where ``f(d, stream)`` releases one noisy vector."""
    family = args.mechanism or "ggauss"
    if family == "laplace":
        budget = _budget(args, need_delta=False)
        spec = MechanismSpec("laplace")
        label = {"family": family, "scale": laplace_scale(k, budget), "epsilon": budget.epsilon}
        return label, lambda d, s: run_mechanism(spec, d, budget, s)
    if family == "gaussian":
        budget = _budget(args)
        spec = MechanismSpec("gaussian")
        label = {"family": family, "std": gaussian_std(k, budget), "epsilon": budget.epsilon,
                 "delta": budget.delta}
        return label, lambda d, s: run_mechanism(spec, d, budget, s)
    if family in ("ggauss", "ggauss_pq"):
        if args.p is None:
            raise UsageError(f"--p is required for {family}")
        budget = None
        sigma = args.sigma
        if sigma is None:
            budget = _budget(args)
            if family == "ggauss":
                sigma = calibrate_sigma_ggauss(k, args.p, budget, args.c_sigma, args.log_base)
            else:
                if args.q is None:
                    raise UsageError("--q is required for ggauss_pq")
                sigma = calibrate_sigma_pq(k, args.p, args.q, budget, args.c_sigma, args.log_base)
        spec = MechanismSpec(family, sigma=sigma, p=args.p, q=args.q, truncate=args.truncate,
                             c_sigma=args.c_sigma, log_base=args.log_base)
        return spec.as_dict(), lambda d, s: run_mechanism(spec, d, budget, s)
    if family == "composed":
        if args.p is None or args.t is None:
            raise UsageError("the composed mechanism needs --p and --t")
        budget = _budget(args)
        params = calibrate_composed(k, args.p, budget, args.t, args.c_sigma, args.log_base)
        label = {"family": family, "p": args.p, **params.as_dict()}
        return label, lambda d, s: composed_mechanism(d, args.p, budget, args.t, s, params=params).output
    if family == "sv":
        config = _sv_config(args, k)
        label = {"family": family, "alpha": config.alpha, "budget_count": config.budget_count,
                 "eps": config.eps, "delta": config.delta, "beta": config.beta}
        return label, lambda d, s: numeric_sparse_detailed(d, config, s)[0]
    raise UsageError(f"unknown mechanism {family!r}")


def cmd_run(args) -> int:
    d = load_dataset(args)
    seed = _seed(args)
    label, mech = build_mechanism(args, d.size)
    out = mech(d, RandomStream(seed))
    values = getattr(out, "values", out)
    truncated = bool(getattr(out, "truncated", False))
    rec = {"mechanism": label, "k": int(d.size), "seed": seed, "truncated": truncated,
           "output": np.asarray(values).tolist()}
    if args.format == "json":
        emit(dumps(rec) + "\n", args.out)
    elif args.format == "csv":
        emit("index,value\n" + "".join(f"{i},{v!r}\n" for i, v in enumerate(rec["output"])), args.out)
    else:
        head = f"mechanism={label.get('family')} k={d.size} seed={seed} truncated={truncated}\n"
        emit(head + format_rows([{"index": i, "value": v} for i, v in enumerate(rec["output"])], "table"),
             args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    seed = _seed(args)
    mechanisms = args.mechanism.split(",") if args.mechanism else ["laplace", "gaussian", "ggauss"]
    ks = args.k or [1024]
    ps = args.p or [4.0]
    trials = args.trials or 200
    root = RandomStream(seed)
    rows = []
    for fam in mechanisms:
        for k in ks:
            for p in (ps if fam in ("ggauss", "ggauss_pq", "composed") else [None]):
                cell = argparse.Namespace(**vars(args))
                cell.mechanism, cell.p = fam, p
                label, mech = build_mechanism(cell, k)
                stream = root.named(f"bench/{fam}/{k}/{p}")
                report = estimate_error_norms(mech, np.zeros(k), trials, stream, p=p, q=args.q or 2.0,
                                              label=label)
                row = {"mechanism": fam, "k": k, "p": p, "trials": trials, "seed": seed}
                for name, summ in report.summaries.items():
                    row[f"{name} mean"] = summ.mean
                    row[f"{name} stderr"] = summ.stderr
                    for lv, qv in summ.quantiles.items():
                        row[f"{name} q{lv:g}"] = qv
                rows.append(row)
    emit(format_rows(rows, args.format), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.suite is None:
        raise UsageError("verify needs --suite")
    if args.suite != ALL and args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES + (ALL,))}")
    cfg = SuiteConfig(seed=_seed(args), trials=args.trials, k=args.k, p=args.p, q=args.q,
                      eps=args.eps, delta=args.delta, t=args.t, c_sigma=args.c_sigma,
                      log_base=args.log_base)
    verdicts = []
    sink = open(args.out, "w") if args.out else sys.stdout
    try:
        if args.format == "json":
            # stream lines as checks finish
            for v in run_suite(args.suite, cfg):
                verdicts.append(v)
                sink.write(dumps(v.record()) + "\n")
                sink.flush()
        else:
            verdicts = list(run_suite(args.suite, cfg))
            rows = [dict(v.record(), params=dumps(v.record()["params"])) for v in verdicts]
            sink.write(format_rows(rows, args.format))
    finally:
        if sink is not sys.stdout:
            sink.close()
    counts = summarize(verdicts)
    print(f"{counts['pass']} passed, {counts['fail']} failed, {counts['info']} informational",
          file=sys.stderr)
    return EXIT_FAIL if counts["fail"] else EXIT_OK


# Parser


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _common(sp, grid: bool = False):
    sp.add_argument("--k", type=_ints if grid else int)
    sp.add_argument("--p", type=_floats if grid else float)
    sp.add_argument("--q", type=float)
    sp.add_argument("--eps", type=float)
    sp.add_argument("--delta", type=float)
    sp.add_argument("--t", type=float)
    sp.add_argument("--sigma", type=float)
    sp.add_argument("--c-sigma", dest="c_sigma", type=float, default=1.0)
    sp.add_argument("--log-base", dest="log_base", choices=("natural", "base2"), default="natural")
    sp.add_argument("--trials", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--mechanism")
    sp.add_argument("--truncate", action=argparse.BooleanOptionalAction, default=True)
    sp.add_argument("--suite")
    sp.add_argument("--format", choices=("json", "csv", "table"), default="json")
    sp.add_argument("--out", metavar="PATH")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ggmech", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sp = sub.add_parser("calibrate", help="compute sigma and composed-mechanism parameters")
    _common(sp)
    sp = sub.add_parser("run", help="release one noisy answer vector")
    _common(sp)
    sp.add_argument("--data", metavar="PATH", help="CSV (one value per line or one row) or JSON array")
    sp.add_argument("--values", help="inline comma-separated answers")
    sp.add_argument("--alpha", type=float, help="sparse-vector threshold (sv only)")
    sp.add_argument("--budget-count", dest="budget_count", type=int, default=1)
    sp.add_argument("--beta", type=float, default=0.05)
    sp = sub.add_parser("bench", help="error summaries over a grid of mechanisms, k and p")
    _common(sp, grid=True)
    sp = sub.add_parser("verify", help="run a verification suite and emit verdicts")
    _common(sp)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {"calibrate": cmd_calibrate, "run": cmd_run, "bench": cmd_bench, "verify": cmd_verify}
    try:
        return handler[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"ggmech {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParameterError, CalibrationError, NumericError) as exc:
        print(f"ggmech {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BrokenPipeError:
        # downstream reader closed early (e.g. piped into head)
        sys.stdout = None
        return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
