"""Command-line entry point: ``rlmfem <command> [--config FILE] [--section.key=value ...]``."""

from __future__ import annotations

import argparse
import logging
import sys

from .errors import ConfigError, RlmError
from .experiments import DRIVERS, ExperimentConfig, run_experiment

HELP = {
    "mesh": "generate the configured mesh and dump it as text",
    "solve": "solve one configuration and write nodal, multiplier and report CSVs",
    "converge": "refinement study against the axisymmetric closed form",
    "modes": "multiplier mode energies for each inclusion radius",
    "effective": "effective bulk and shear moduli (per seed plus summary)",
    "sweep": "boundary pressure over a list of compression factors",
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="rlmfem",
        description="P1 elasticity with immersed circular inclusions coupled by reduced Fourier multipliers.",
        epilog="Any configuration key can be overridden as --section.key=value (value parsed as TOML). "
        "RLM_THREADS caps the number of worker processes.",
    )
    sub = p.add_subparsers(dest="command", required=True)
    for name in DRIVERS:
        s = sub.add_parser(name, help=HELP[name])
        s.add_argument("-c", "--config", help="TOML configuration file")
        s.add_argument("-o", "--out", help="output directory (same as --output.dir)")
        s.add_argument("-v", "--verbose", action="store_true")
    return p


def _summary(kind: str, result: dict) -> str:
    if kind == "mesh":
        return f"wrote {result['mesh']} ({result['vertices']} vertices, {result['triangles']} triangles)"
    if kind == "solve":
        r = result["report"]
        return f"solved {result['ndof']} dofs in {r.outer_iters} CG iterations; files: {', '.join(result['files'].values())}"
    if kind == "effective":
        s = result["summary"]
        return f"kappa_eff {s['kappa_mean']:.6g} mu_eff {s['mu_mean']:.6g} over {s['n_runs']} run(s); wrote {result['file']}"
    return f"wrote {result['file']}"


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    bad = [a for a in extra if not (a.startswith("--") and "." in a.split("=", 1)[0] and "=" in a)]
    if bad:
        parser.error(f"unrecognized arguments: {' '.join(bad)}")
    overrides = list(extra)
    if args.out:
        overrides.append(f"--output.dir={args.out!r}".replace("'", '"'))
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = ExperimentConfig.load(args.config, overrides)
        result = run_experiment(cfg, args.command)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except RlmError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(_summary(args.command, result))
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
