"""Command-line driver for reproducible distinguishing experiments.

Subcommands: `simulate` runs an attack in both worlds and writes one
advantage record; `bounds` prints the closed-form ceilings; `curves` emits
Fig-style curve data as CSV (optionally rendering a PNG next to it);
`verify` runs an acceptance suite; `replay` re-validates a transcript file.

Standard output carries data exclusively; progress goes to standard error.
Every command is deterministic given its flags. Exit codes: 0 success,
1 usage/configuration error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import bounds
from .attacks import parse_attack_spec
from .cipher import CipherParams
from .errors import ConfigurationError, DomainError, TranscriptParseError
from .estimator import estimate_advantage
from .game import OracleBudget, parse_operator
from .transcript import iter_text_moves, validate_moves
from .verify import DEFAULT_SEED, SUITES

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2


def _progress(message: str) -> None:
    print(message, file=sys.stderr, flush=True)


def _write_output(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as handle:
            handle.write(text)


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

_SIMULATE_KEYS = ("op", "kappa", "n", "q", "t", "attack", "trials", "seed",
                  "workers", "level", "format", "out", "record_bad")


def _load_config_defaults(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path, "rb") as handle:
        data = tomllib.load(handle)
    unknown = set(data) - set(_SIMULATE_KEYS)
    if unknown:
        raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
    return data


def _merged(args: argparse.Namespace, config: dict, key: str, fallback=None):
    value = getattr(args, key, None)
    if value is not None:
        return value
    if key in config:
        return config[key]
    return fallback


def cmd_simulate(args: argparse.Namespace) -> int:
    config = _load_config_defaults(args.config)
    required = {}
    for key in ("op", "kappa", "n", "q", "t", "attack", "trials"):
        value = _merged(args, config, key)
        if value is None:
            raise ConfigurationError(f"missing required setting --{key.replace('_', '-')}")
        required[key] = value
    op = parse_operator(str(required["op"]))
    params = CipherParams(int(required["kappa"]), int(required["n"]))
    q, t = int(required["q"]), int(required["t"])
    attack = parse_attack_spec(str(required["attack"]), q=q, t=t)
    trials = int(required["trials"])
    seed = int(_merged(args, config, "seed", 0))
    workers = int(_merged(args, config, "workers", 1))
    level = float(_merged(args, config, "level", 0.95))
    fmt = str(_merged(args, config, "format", "json"))
    out = _merged(args, config, "out")
    record_bad = bool(_merged(args, config, "record_bad", False))
    if fmt not in ("json", "csv"):
        raise ConfigurationError(f"format must be json or csv, got {fmt!r}")

    _progress(f"simulate: {attack.name} vs {op.name} kappa={params.kappa} n={params.n} "
              f"q={q} t={t} trials={trials} seed={seed} workers={workers}")
    est = estimate_advantage(attack, op, params, OracleBudget(q, t),
                             trials=trials, seed=seed, record_bad=record_bad,
                             level=level, workers=workers)
    record = {
        "attack": attack.name,
        "op": op.name,
        "kappa": params.kappa,
        "n": params.n,
        "q": q,
        "t": t,
        "trials": trials,
        "p1": est.p1_hat,
        "p2": est.p2_hat,
        "adv": est.adv_hat,
        "ci": [est.ci_low, est.ci_high],
        "bad_w1": est.bad_freq_w1,
        "bad_w2": est.bad_freq_w2,
        "seed": seed,
    }
    if fmt == "json":
        text = json.dumps(record, sort_keys=True) + "\n"
    else:
        flat = dict(record, ci_low=est.ci_low, ci_high=est.ci_high)
        del flat["ci"]
        keys = sorted(flat)
        text = (",".join(keys) + "\n"
                + ",".join("" if flat[k] is None else repr(flat[k]) for k in keys) + "\n")
    _write_output(text, out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------

def cmd_bounds(args: argparse.Namespace) -> int:
    if (args.t is None) == (args.log2_t is None):
        raise ConfigurationError("give exactly one of --t or --log2-t")
    t = args.t if args.t is not None else 1 << args.log2_t
    op = parse_operator(args.op)
    kappa, n = args.kappa, args.n
    lines = [f"kappa={kappa} n={n} t={t} op={op.name}",
             f"  single            {bounds.single_bound(kappa, t):.12g}"]
    if op.kind == "dbl":
        s = bounds.optimal_s(kappa, n)
        lines += [
            f"  double upper      {bounds.double_upper(kappa, t):.12g}",
            f"  double lower      {bounds.double_lower_optimal(kappa, n, t):.12g}",
            f"  optimal s         {s}",
        ]
    elif op.kind == "trp2":
        lines.append(f"  triple upper      {bounds.triple_upper(kappa, t):.12g}")
    elif op.kind == "cascade":
        lines.append(f"  cascade({op.m}) upper  {bounds.cascade_bound(kappa, t, op.m):.12g}")
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# curves
# ---------------------------------------------------------------------------

def cmd_curves(args: argparse.Namespace) -> int:
    rows = bounds.emit_curves(args.kappa, args.x_min, args.x_max,
                              step=args.step, n=args.n)
    _write_output(bounds.curves_to_csv(rows), args.out)
    if args.plot is not None:
        from .plotting import render_curves

        render_curves(rows, args.kappa, args.plot, n=args.n)
        _progress(f"figure written to {args.plot}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def cmd_verify(args: argparse.Namespace) -> int:
    suite = SUITES[args.suite]
    _progress(f"verify {args.suite}: trials={args.trials} seed={args.seed} "
              f"workers={args.workers}")
    results = suite(args.trials, args.seed, args.workers,
                    progress=lambda item: _progress(f"  .. {item}"))
    for result in results:
        _progress(result.line())
    summary = {
        "suite": args.suite,
        "passed": all(r.passed for r in results),
        "checks": [{"name": r.name, "passed": r.passed, "detail": r.detail}
                   for r in results],
    }
    sys.stdout.write(json.dumps(summary, sort_keys=True, indent=2) + "\n")
    return EXIT_OK if summary["passed"] else EXIT_VERIFY


# ---------------------------------------------------------------------------
# replay
# ---------------------------------------------------------------------------

def cmd_replay(args: argparse.Namespace) -> int:
    with open(args.file) as handle:
        text = handle.read()
    moves = list(iter_text_moves(text))  # TranscriptParseError -> usage exit
    violations = validate_moves(iter(moves), q_max=args.q, t_max=args.t)
    report = {
        "file": args.file,
        "moves": len(moves),
        "valid": not violations,
        "violations": [str(v) for v in violations],
    }
    sys.stdout.write(json.dumps(report, sort_keys=True, indent=2) + "\n")
    return EXIT_OK if not violations else EXIT_VERIFY


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cascadelab",
        description="Distinguishing experiments for composed ideal ciphers.")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="estimate an attack's advantage")
    sim.add_argument("--op", help="single | dbl | trp2 | cascade:m")
    sim.add_argument("--kappa", type=int, help="key bits")
    sim.add_argument("--n", type=int, help="block bits")
    sim.add_argument("--q", type=int, help="challenge-query budget")
    sim.add_argument("--t", type=int, help="cipher-query budget")
    sim.add_argument("--attack", help="e.g. mitm-double:s=2, exhaustive:probes=2, "
                                      "mitm-triple:s=2, baseline:p=0.5")
    sim.add_argument("--trials", type=int, help="Monte Carlo trials per world")
    sim.add_argument("--seed", type=int, help="master seed (default 0)")
    sim.add_argument("--workers", type=int, help="worker processes (default 1)")
    sim.add_argument("--level", type=float, help="CI level: 0.95, 0.99, or 0.999")
    sim.add_argument("--record-bad", dest="record_bad", action="store_const",
                     const=True, help="tally bad-event frequencies per world")
    sim.add_argument("--format", choices=("json", "csv"), dest="format")
    sim.add_argument("--out", help="output path (default: stdout)")
    sim.add_argument("--config", help="TOML file with defaults; flags override")
    sim.set_defaults(func=cmd_simulate)

    bnd = sub.add_parser("bounds", help="print closed-form advantage ceilings")
    bnd.add_argument("--kappa", type=int, required=True)
    bnd.add_argument("--n", type=int, required=True)
    bnd.add_argument("--t", type=int)
    bnd.add_argument("--log2-t", dest="log2_t", type=int)
    bnd.add_argument("--op", default="dbl")
    bnd.set_defaults(func=cmd_bounds)

    crv = sub.add_parser("curves", help="emit advantage-curve CSV data")
    crv.add_argument("--kappa", type=int, required=True)
    crv.add_argument("--x-min", dest="x_min", type=int, required=True)
    crv.add_argument("--x-max", dest="x_max", type=int, required=True)
    crv.add_argument("--step", type=int, default=1)
    crv.add_argument("--n", type=int, default=64)
    crv.add_argument("--out", help="CSV path (default: stdout)")
    crv.add_argument("--plot", help="also render a PNG figure to this path")
    crv.set_defaults(func=cmd_curves)

    ver = sub.add_parser("verify", help="run an acceptance suite")
    ver.add_argument("suite", choices=sorted(SUITES))
    ver.add_argument("--trials", type=int, default=100_000,
                     help="trials per world for statistical checks")
    ver.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ver.add_argument("--workers", type=int, default=1)
    ver.set_defaults(func=cmd_verify)

    rep = sub.add_parser("replay", help="validate a transcript file")
    rep.add_argument("file")
    rep.add_argument("--q", type=int, help="check against this E-query budget")
    rep.add_argument("--t", type=int, help="check against this cipher-query budget")
    rep.set_defaults(func=cmd_replay)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (ConfigurationError, DomainError, TranscriptParseError,
            FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
