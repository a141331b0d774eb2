"""Command-line frontend.

    bestapprox tau --f f.json --r 1.5
    bestapprox distance --mu mu.json --nu approx.json --r 2
    bestapprox approx {locations,weights,uniform,free} --mu mu.json ...
    bestapprox rates --mu mu.json --r 1 --regime uniform --n-list 1,2,4,8

Every ``--mu/--nu/--f`` argument is either a path to a JSON file or an
inline JSON object. Reals are printed with 17 significant digits so that
identical invocations give byte-identical output.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

from .asymptotics import REGIMES, rate_sweep
from .constrained import best_given_locations, best_given_weights, best_uniform, best_weights_over_orderings
from .errors import DomainError, NumericalError, SpecError, UnsupportedError
from .intervals import QuantileInterval
from .measures import measure_from_json
from .metric import StepApprox, distance_r
from .monotone import PiecewiseFunction
from .step_fit import tau_r
from .unconstrained import SolverConfig, solve_free


def _fmt_float(v: float) -> str:
    if math.isnan(v):
        return "NaN"
    if math.isinf(v):
        return "Infinity" if v > 0 else "-Infinity"
    s = format(v, ".17g")
    # keep it a JSON float literal
    if not any(ch in s for ch in ".eEn"):
        s += ".0"
    return s


def dumps(obj) -> str:
    """JSON with fixed key order (as given) and 17-significant-digit floats."""
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    if hasattr(obj, "item") and not hasattr(obj, "__len__"):  # numpy scalar
        return dumps(obj.item())
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {dumps(v)}" for k, v in obj.items()) + "}"
    if hasattr(obj, "tolist"):
        return dumps(obj.tolist())
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _load(arg: str):
    text = arg.strip()
    if not text.startswith("{"):
        try:
            with open(arg, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise SpecError(f"cannot read {arg}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON in {arg[:40]!r}: {exc}") from exc


def _floats(csv: str):
    try:
        return [float(v) for v in csv.split(",") if v.strip()]
    except ValueError as exc:
        raise SpecError(f"bad number list {csv!r}") from exc


def _ints(csv: str):
    try:
        return [int(v) for v in csv.split(",") if v.strip()]
    except ValueError as exc:
        raise SpecError(f"bad integer list {csv!r}") from exc


def _approx_json(a: StepApprox):
    return a.to_json()


def cmd_tau(args):
    f = PiecewiseFunction.from_json(_load(args.f))
    res = tau_r(f, args.r)
    out = {"r": res.r}
    if isinstance(res.value, QuantileInterval):
        out["interval"] = res.value.as_list()
    else:
        out["value"] = float(res.value)
    out["residual_norm"] = res.residual_norm
    return dumps(out)


def cmd_distance(args):
    mu = measure_from_json(_load(args.mu))
    nu = StepApprox.from_json(_load(args.nu))
    return dumps({"d_r": distance_r(mu, nu, args.r)})


def cmd_approx(args):
    mu = measure_from_json(_load(args.mu))
    if args.mode == "locations":
        return dumps(_approx_json(best_given_locations(mu, sorted(_floats(args.x)), args.r)))
    if args.mode == "weights":
        p = _floats(args.p)
        if args.search_orderings:
            a = best_weights_over_orderings(mu, p, args.r)
        else:
            a = best_given_weights(mu, p, args.r)
        return dumps(_approx_json(a))
    if args.mode == "uniform":
        return dumps(_approx_json(best_uniform(mu, args.n, args.r)))
    cfg = SolverConfig(starts=args.starts, seed=args.seed)
    search = solve_free(mu, args.n, args.r, cfg)
    out = _approx_json(search.best)
    out["candidates"] = [
        {"x": c.approx.x, "p": c.approx.p, "d_r": c.approx.achieved_distance, "converged": c.converged, "iterations": c.iterations, "start": c.start}
        for c in search.candidates
    ]
    return dumps(out)


def cmd_rates(args):
    mu = measure_from_json(_load(args.mu))
    cfg = SolverConfig(starts=args.starts, seed=args.seed)
    series = rate_sweep(mu, args.r, args.regime, _ints(args.n_list), cfg, args.log_correction)
    csv_text = series.to_csv()
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(csv_text)
        return dumps({"out": args.out, "fitted_exponent": series.fitted_exponent, "fitted_constant": series.fitted_constant})
    return csv_text.rstrip("\n")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bestapprox", description="Best finitely supported approximations in the quantile L^r distance.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tau", help="best constant approximation of a piecewise function")
    p.add_argument("--f", required=True)
    p.add_argument("--r", type=float, required=True)
    p.set_defaults(func=cmd_tau)

    p = sub.add_parser("distance", help="d_r between a measure and a step approximation")
    p.add_argument("--mu", required=True)
    p.add_argument("--nu", required=True)
    p.add_argument("--r", type=float, required=True)
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("approx", help="best n-point approximations")
    modes = p.add_subparsers(dest="mode", required=True)
    m = modes.add_parser("locations")
    m.add_argument("--x", required=True)
    m = modes.add_parser("weights")
    m.add_argument("--p", required=True)
    m.add_argument("--search-orderings", action="store_true")
    m = modes.add_parser("uniform")
    m.add_argument("--n", type=int, required=True)
    m = modes.add_parser("free")
    m.add_argument("--n", type=int, required=True)
    m.add_argument("--starts", type=int, default=16)
    m.add_argument("--seed", type=int, default=0)
    for m in modes.choices.values():
        m.add_argument("--mu", required=True)
        m.add_argument("--r", type=float, required=True)
    p.set_defaults(func=cmd_approx)

    p = sub.add_parser("rates", help="sweep n -> d_r and fit a power law; CSV output")
    p.add_argument("--mu", required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--regime", choices=REGIMES, required=True)
    p.add_argument("--n-list", required=True)
    p.add_argument("--out")
    p.add_argument("--starts", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--log-correction", type=float, default=None)
    p.set_defaults(func=cmd_rates)
    return ap


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        text = args.func(args)
    except (SpecError, DomainError, UnsupportedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(text + "\n")
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
