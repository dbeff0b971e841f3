"""``infoconc`` command line: analyze | bounds | sample | verify.

Every flag mirrors a key of the JSON config accepted by ``--config``; flags win
on conflict.  Exit status: 0 success, 1 a verification check failed, 2 bad
configuration, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, catalog
from .bounds import bound_sweep, sweep_to_csv, sweep_to_json
from .density import UnsupportedError, model_from_config  # noqa: F401
from .quadrature import QuadratureError
from .rng import DEFAULT_SEED
from .tilt import ConsistencyError, compute_tilt_curve

EXIT_OK, EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


class CliError(ValueError):
    pass


def _grid(text):
    """'0.1,0.5,2' or 'logspace:lo:hi:count' (base-10 exponents) or 'linspace:lo:hi:count'."""
    if text is None:
        return None
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    text = str(text).strip()
    for kind in ("logspace", "linspace"):
        if text.startswith(kind + ":"):
            try:
                lo, hi, k = text.split(":")[1:]
                return getattr(np, kind)(float(lo), float(hi), int(k)).tolist()
            except ValueError as exc:
                raise CliError(f"bad grid {text!r}: {exc}") from None
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise CliError(f"bad grid {text!r}") from None


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        cfg = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read config {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise CliError("config file must hold a JSON object")
    return cfg


def _merge(args, cfg: dict, keys) -> dict:
    """Config values overridden by any flag that was given."""
    out = dict(cfg)
    for k in keys:
        v = getattr(args, k, None)
        if v is not None:
            out[k] = v
    return out


def _model(opts: dict, base_dir=None):
    spec = opts.get("model")
    if spec is None:
        raise CliError("a model is required (--model NAME [--dim N] or 'model' in --config)")
    if isinstance(spec, dict):
        return model_from_config(spec, base_dir)
    dim = int(opts.get("dim", 1))
    try:
        return catalog.make(str(spec), dim)
    except UnsupportedError as exc:
        raise CliError(str(exc)) from None


def _emit(text: str, output) -> None:
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


# ---------------------------------------------------------------------------


def cmd_analyze(args) -> int:
    cfg = _load_config(args.config)
    opts = _merge(args, cfg, ("model", "dim", "alphas", "format", "output"))
    model = _model(opts, Path(args.config).parent if args.config else None)
    alphas = _grid(opts.get("alphas"))
    curve = compute_tilt_curve(model, None if alphas is None else np.asarray(alphas))
    fmt = opts.get("format", "json")
    if fmt == "csv":
        text = curve.to_csv()
    elif fmt == "json":
        text = curve.to_json() + "\n"
    else:
        raise CliError(f"unknown format {fmt!r}")
    _emit(text, opts.get("output"))
    if opts.get("output") not in (None, "-"):
        s = curve.summary()
        print(f"{s['model']}: h={s['entropy']:.10g} V={s['varentropy']:.10g} "
              f"K_hat={s['K_hat']:.10g} V<=n: {'pass' if s['varentropy_bound_holds'] else 'FAIL'}")
    return EXIT_OK


def cmd_bounds(args) -> int:
    cfg = _load_config(args.config)
    opts = _merge(args, cfg, ("n", "K", "t", "beta", "compare", "format", "output"))
    K = opts.get("K", opts.get("n"))
    if K is None:
        raise CliError("bounds needs --K or --n")
    K = float(K)
    if not K > 0:
        raise CliError("K must be > 0")
    ts = _grid(opts.get("t")) or []
    betas = _grid(opts.get("beta")) or []
    if not ts and not betas:
        raise CliError("bounds needs a --t and/or --beta grid")
    bad = [t for t in ts if not t > 0]
    if bad:
        raise CliError(f"t must be > 0 (got {bad[0]:g})")
    compare_n = None
    if opts.get("compare"):
        if opts.get("n") is None:
            raise CliError("--compare needs --n")
        compare_n = int(opts["n"])
    reports = bound_sweep(K, ts, betas, compare_n)
    fmt = opts.get("format", "csv")
    if fmt == "csv":
        text = sweep_to_csv(reports)
    elif fmt == "json":
        text = sweep_to_json(reports) + "\n"
    else:
        raise CliError(f"unknown format {fmt!r}")
    _emit(text, opts.get("output"))
    return EXIT_OK


def cmd_sample(args) -> int:
    from .sampling import estimate_entropy_varentropy, sample

    cfg = _load_config(args.config)
    opts = _merge(args, cfg, ("model", "dim", "m", "seed", "format", "output"))
    model = _model(opts, Path(args.config).parent if args.config else None)
    m = int(opts.get("m", 100_000))
    seed = int(opts.get("seed", DEFAULT_SEED))
    if m < 1 or seed < 0:
        raise CliError("m must be >= 1 and seed >= 0")
    batch = sample(model, m, seed)
    fmt = opts.get("format", "icb")
    out = opts.get("output")
    if fmt == "icb":
        if out in (None, "-"):
            raise CliError("binary output needs --output PATH")
        batch.write_icb(out)
    elif fmt == "csv":
        _emit(batch.to_csv(), out)
    else:
        raise CliError(f"unknown format {fmt!r}")
    summary = {"model": batch.model_id, "m": m, "seed": seed, "mean_info": float(np.mean(batch.values))}
    if m >= 30:
        est = estimate_entropy_varentropy(batch)
        summary.update(h=est["h"].estimate, h_se=est["h"].se, V=est["V"].estimate, V_se=est["V"].se)
    stream = sys.stderr if out in (None, "-") else sys.stdout
    stream.write(json.dumps(summary, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import ConfigError, SuiteConfig

    cfg = _load_config(args.config)
    if args.suite is not None:
        cfg["suite"] = args.suite
    for k in ("seed", "m"):
        v = getattr(args, k)
        if v is not None:
            cfg[k] = v
    for k in ("alphas", "betas", "taus"):
        v = getattr(args, k)
        if v is not None:
            cfg[k] = _grid(v)
    if args.dims is not None:
        cfg["dims"] = [int(d) for d in _grid(args.dims)]
    if args.models is not None:
        cfg["models"] = [s.strip() for s in args.models.split(",") if s.strip()]
    if args.tol:
        tol = dict(cfg.get("tolerances", {}))
        for item in args.tol:
            key, _, val = item.partition("=")
            if not val:
                raise CliError(f"--tol expects KEY=VALUE, got {item!r}")
            tol[key] = val.lower() in ("1", "true", "yes") if key == "familywise" else float(val)
        cfg["tolerances"] = tol
    try:
        suite = SuiteConfig.from_dict(cfg)
    except ConfigError as exc:
        raise CliError(str(exc)) from None
    from .verify import run_suite

    report = run_suite(suite)
    text = report.to_json(include_runtime=args.include_runtime)
    if args.output in (None, "-"):
        sys.stdout.write(text)
        sys.stderr.write(report.table())
    else:
        Path(args.output).write_text(text)
        sys.stdout.write(report.table())
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="infoconc", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"infoconc {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt_choices, fmt_default):
        sp.add_argument("--config", help="JSON config; its keys mirror the flags")
        sp.add_argument("--output", "-o", help="output path (default: standard output)")
        sp.add_argument("--format", choices=fmt_choices, default=None,
                        help=f"output format (default {fmt_default})")

    a = sub.add_parser("analyze", help="tilt curve F(alpha), entropy, varentropy, K_hat")
    common(a, ("json", "csv"), "json")
    a.add_argument("--model", help="catalog family, e.g. gaussian-iso, exp-product, l2")
    a.add_argument("--dim", type=int)
    a.add_argument("--alphas", help="grid: comma list or logspace:lo:hi:count")
    a.set_defaults(func=cmd_analyze)

    b = sub.add_parser("bounds", help="tail and MGF bound tables")
    common(b, ("json", "csv"), "csv")
    b.add_argument("--n", type=int, help="dimension; used as K when --K is absent")
    b.add_argument("--K", type=float, help="varentropy bound constant")
    b.add_argument("--t", help="t grid (each > 0)")
    b.add_argument("--beta", help="beta grid")
    b.add_argument("--compare", action="store_true", default=None,
                   help="add the weak 2exp(-t sqrt(n)/(16 n)) comparison curve")
    b.set_defaults(func=cmd_bounds)

    s = sub.add_parser("sample", help="draw samples and export -log f(X_i)")
    common(s, ("icb", "csv"), "icb")
    s.add_argument("--model")
    s.add_argument("--dim", type=int)
    s.add_argument("--m", type=int, help="sample count")
    s.add_argument("--seed", type=int, help=f"RNG seed (default {DEFAULT_SEED:#x})")
    s.set_defaults(func=cmd_sample)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--config")
    v.add_argument("--output", "-o")
    v.add_argument("--suite", choices=("default", "quick"))
    v.add_argument("--seed", type=int)
    v.add_argument("--m", type=int)
    v.add_argument("--dims")
    v.add_argument("--models", help="comma list of catalog names, e.g. gaussian-iso(3)")
    v.add_argument("--alphas")
    v.add_argument("--betas")
    v.add_argument("--taus")
    v.add_argument("--tol", action="append", metavar="KEY=VALUE", help="tolerance override")
    v.add_argument("--include-runtime", action="store_true")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"infoconc {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (QuadratureError, ConsistencyError, ArithmeticError) as exc:
        est = getattr(exc, "error", None)
        extra = f" (error estimate {est})" if est is not None else ""
        print(f"infoconc {args.command}: numerical failure: {exc}{extra}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
