"""Command-line interface.

    nearopt scenario --design 100,99 --mortality 0.25,0.40 --rule ttest --rule es
    nearopt near-optimality --config runs/table2.toml --format json --out t2.json
    nearopt bounds --V 1 --L 2,5 --n 100
    nearopt plan --rule es --shape 1,1 --target 0.012 --decimals 4
    nearopt reproduce --table 1

Exit codes: 0 success, 1 invalid input, 2 reproduction outside tolerance,
3 resource or budget exceeded.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .commands import run
from .config import EVALUATORS, FORMATS, SEARCHES, RunConfig, load_config
from .exceptions import BudgetExceeded, ValidationError
from .reporting import render
from .search import PRESETS

EXIT_OK, EXIT_INVALID, EXIT_TOLERANCE, EXIT_BUDGET = 0, 1, 2, 3


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _u64(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    # SUPPRESS keeps a flag given before the subcommand from being reset by
    # the subparser's copy of the same option
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    g = common.add_argument_group("global options")
    g.add_argument("--config", type=Path, help="TOML (or JSON) run configuration")
    g.add_argument("--seed", type=_u64, help="Monte Carlo seed")
    g.add_argument("--threads", type=int, help="worker processes")
    g.add_argument("--format", choices=FORMATS, help="output format (default markdown)")
    g.add_argument("--out", help="write output here instead of stdout")
    g.add_argument("-v", "--verbose", action="count")

    p = argparse.ArgumentParser(prog="nearopt", description=__doc__.split("\n\n")[0],
                                parents=[common])
    # the command may come from the config file instead
    sub = p.add_subparsers(dest="command")

    def add(name, help_):
        return sub.add_parser(name, help=help_, parents=[common])

    def design_rule(sp):
        sp.add_argument("--design", type=_ints, action="append",
                        help="arm sizes, standard care first, e.g. 100,99 (repeatable)")
        sp.add_argument("--rule", action="append", choices=("es", "ttest", "dunnett"))
        sp.add_argument("--alpha", type=float)

    s = add("scenario", "prescription probabilities and expected loss at given states")
    design_rule(s)
    o = s.add_mutually_exclusive_group()
    o.add_argument("--mortality", type=_floats, action="append",
                   help="per-arm mortality rates (repeatable)")
    o.add_argument("--success", type=_floats, action="append",
                   help="per-arm success probabilities (repeatable)")
    s.add_argument("--evaluator", choices=EVALUATORS)
    s.add_argument("--n-sims", type=int)

    n = add("near-optimality", "maximum regret over states of nature")
    design_rule(n)
    n.add_argument("--evaluator", choices=EVALUATORS)
    n.add_argument("--n-sims", type=int)
    n.add_argument("--search", choices=SEARCHES)
    n.add_argument("--grid-points", type=int)
    n.add_argument("--pipeline", choices=tuple(PRESETS))
    n.add_argument("--checkpoint", help="checkpoint path prefix for pipeline runs")

    b = add("bounds", "large-deviations bounds for balanced designs")
    b.add_argument("--V", type=float, help="outcome range")
    b.add_argument("--L", type=_ints, help="number of arms (comma-separated)")
    b.add_argument("--n", type=_ints, help="subjects per arm (comma-separated)")

    pl = add("plan", "smallest trial reaching a near-optimality target")
    pl.add_argument("--rule", action="append", choices=("es", "ttest", "dunnett"))
    pl.add_argument("--alpha", type=float)
    pl.add_argument("--shape", type=_ints, help="arm ratio, e.g. 2,1,1,1,1")
    pl.add_argument("--target", type=float)
    pl.add_argument("--n-max", type=int)
    pl.add_argument("--decimals", type=int, help="round values before comparing")
    pl.add_argument("--pipeline", choices=tuple(PRESETS))

    r = add("reproduce", "regenerate a reference table and compare")
    r.add_argument("--table", type=int, choices=(1, 2, 3, 4))
    r.add_argument("--budget", choices=("desk", "full"))
    r.add_argument("--checkpoint", help="checkpoint path prefix for pipeline runs")
    return p


_FLAG_KEYS = {"design": "designs", "rule": "rules", "n_sims": "n_sims", "alpha": "alpha",
              "evaluator": "evaluator", "search": "search", "grid_points": "grid_points",
              "pipeline": "pipeline", "checkpoint": "checkpoint", "V": "V", "L": "L", "n": "n",
              "shape": "shape", "target": "target", "n_max": "n_max", "decimals": "decimals",
              "table": "table", "budget": "budget", "seed": "seed", "threads": "threads",
              "format": "format", "out": "out"}


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """Config file values overridden by explicit flags."""
    if getattr(args, "config", None) is not None:
        raw = load_config(args.config).to_dict()
        source = str(args.config)
    else:
        raw, source = {}, "<command line>"
    if args.command:
        raw["command"] = args.command
    elif "command" not in raw:
        raise ValidationError("no command given on the command line or in the config")
    for attr, key in _FLAG_KEYS.items():
        v = getattr(args, attr, None)
        if v is not None:
            raw[key] = v
    for orient in ("mortality", "success"):
        v = getattr(args, orient, None)
        if v is not None:
            raw.update(states=v, orientation=orient)
            raw.pop("input_orientation", None)
    return RunConfig.from_dict(raw, source)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = [logging.WARNING, logging.INFO, logging.DEBUG][min(getattr(args, "verbose", 0), 2)]
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
        result = run(cfg)
        text = render(result, cfg.format)
        if cfg.out:
            Path(cfg.out).write_text(text)
        else:
            sys.stdout.write(text)
    except BudgetExceeded as exc:
        print(f"nearopt: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ValidationError as exc:
        print(f"nearopt: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"nearopt: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if result.comparisons and not result.passed:
        n_bad = sum(not c["passed"] for c in result.comparisons)
        print(f"nearopt: {n_bad} cell(s) outside tolerance", file=sys.stderr)
        return EXIT_TOLERANCE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
