"""Command-line front end.

Exit codes: 0 success, 1 usage, 2 config error, 3 oracle mismatch.
"""

from __future__ import annotations

import argparse
import json
import logging
import subprocess
import sys
from pathlib import Path

import numpy as np

from . import __version__, _kernels
from .config import ConfigError, SimConfig, apply_overrides, parse_config, serialize_config
from .deployment import LoadDistribution
from .frame import ContaminationMode, SlotMode
from .sim import export_cdf, run_antenna_sweep, run_hetnet, run_two_cell, two_cell_csv
from .tdflex import SchedulerParams, collisions_pcrd, collisions_pcru, tdflex_schedule
from .tdlte import tdlte_schedule

EXIT_OK, EXIT_USAGE, EXIT_CONFIG, EXIT_ORACLE = 0, 1, 2, 3

log = logging.getLogger("tdflexsim")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _git_revision() -> str | None:
    try:
        out = subprocess.run(
            ["git", "rev-parse", "HEAD"], capture_output=True, text=True, check=True,
            cwd=Path(__file__).resolve().parent,
        )
        return out.stdout.strip() or None
    except (OSError, subprocess.CalledProcessError):
        return None


def write_manifest(out: Path, command: str, cfg: SimConfig, outputs: list[str]) -> Path:
    manifest = {
        "command": command,
        "version": __version__,
        "config_hash": cfg.config_hash(),
        "seed": cfg.seed,
        "git_revision": _git_revision(),
        "kernel_backend": _kernels.BACKEND,
        "config": cfg.to_dict(),
        "outputs": outputs,
    }
    path = out / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def oracle_check(n_data: int) -> list[str]:
    """Compare both collision formulas with exhaustive search and the emitted frames."""
    mismatches = []
    for ndm in range(n_data + 1):
        for nds in range(n_data + 1):
            nm, ns = (ndm, n_data - ndm), (nds, n_data - nds)
            brute_d = _kernels.bruteforce_min_icr(ndm, nds, n_data, int(SlotMode.S_D))
            brute_u = _kernels.bruteforce_min_icr(ndm, nds, n_data, int(SlotMode.S_U))
            cd = collisions_pcrd(nm, ns, n_data, b2b_guard=False)
            cu = collisions_pcru(nm, ns, n_data)
            if cd != brute_d:
                mismatches.append(f"PCR-D n_D=({ndm},{nds}): formula {cd}, exhaustive {brute_d}")
            if cu != brute_u:
                mismatches.append(f"PCR-U n_D=({ndm},{nds}): formula {cu}, exhaustive {brute_u}")
            loads = LoadDistribution(np.array([ndm, nds]) / n_data, n_data)
            frame = tdflex_schedule(loads, SchedulerParams(n_data=n_data))
            d = frame.decisions[0]
            predicted = d.c_pcrd if d.chosen == ContaminationMode.PCR_D else d.c_pcru
            if frame.icr_collisions(1) != predicted:
                mismatches.append(
                    f"schedule n_D=({ndm},{nds}): frame has {frame.icr_collisions(1)} ICR slots, predicted {predicted}"
                )
    return mismatches


def _parse_loads(text: str) -> np.ndarray:
    try:
        vals = np.array([float(x) for x in text.split(",") if x.strip()])
    except ValueError as exc:
        raise ConfigError(f"--loads: {exc}") from None
    if vals.size == 0:
        raise ConfigError("--loads: need at least the macro load")
    return vals


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", type=Path, help="YAML config file")
    common.add_argument("--seed", type=int, help="master seed (overrides the config)")
    common.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    common.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
    common.add_argument("--threads", type=int, default=1, help="worker processes for independent drops")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="tdflexsim", description="Flexible-TDD massive-MIMO HetNet simulator")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("two-cell", parents=[common], help="RCR vs ICR SIR against contamination ratio")
    sub.add_parser("hetnet", parents=[common], help="rate CDFs, TDFLEX vs TD-LTE")
    sub.add_parser("antenna-sweep", parents=[common], help="rate CDFs for each M in M_list")
    oc = sub.add_parser("oracle-check", parents=[common], help="exhaustive check of the collision formulas")
    oc.add_argument("--n-data", type=int, default=None, help="data slots (default: config N_data)")
    sd = sub.add_parser("schedule-dump", parents=[common], help="print frames for given loads")
    sd.add_argument("--loads", required=True, help="comma-separated DL load fractions, macro first")
    return p


def _load_config(args) -> SimConfig:
    cfg = parse_config(args.config)
    cfg = apply_overrides(cfg, args.overrides)
    if args.seed is not None:
        cfg = apply_overrides(cfg, [f"seed={args.seed}"])
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = _load_config(args)
        if args.threads < 1:
            raise ConfigError("--threads: must be >= 1")
        if args.command == "schedule-dump":
            loads = LoadDistribution(_parse_loads(args.loads), cfg.N_data)
    except ValueError as exc:  # ConfigError included
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "oracle-check":
        n_data = args.n_data or cfg.N_data
        if n_data > 16:
            print("config error: --n-data above 16 is too large for exhaustive search", file=sys.stderr)
            return EXIT_CONFIG
        bad = oracle_check(n_data)
        for line in bad:
            print("MISMATCH", line)
        print(f"oracle-check N_data={n_data}: {(n_data + 1) ** 2} load pairs, {len(bad)} mismatches")
        return EXIT_ORACLE if bad else EXIT_OK

    if args.command == "schedule-dump":
        params = SchedulerParams(n_data=cfg.N_data, gamma=cfg.gamma)
        flex = tdflex_schedule(loads, params)
        print("# TDFLEX")
        sys.stdout.write(flex.to_grid())
        sys.stdout.write(flex.decisions_csv())
        print("# TDLTE")
        sys.stdout.write(tdlte_schedule(loads, params).to_grid())
        return EXIT_OK

    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.yaml").write_text(serialize_config(cfg))
    if args.command == "two-cell":
        rows = run_two_cell(cfg)
        (out / "two_cell.csv").write_text(two_cell_csv(rows))
        outputs = ["two_cell.csv"]
    elif args.command == "hetnet":
        export_cdf(run_hetnet(cfg, threads=args.threads), out / "rates_cdf.csv")
        outputs = ["rates_cdf.csv"]
    else:
        export_cdf(run_antenna_sweep(cfg, threads=args.threads), out / "antenna_sweep_cdf.csv")
        outputs = ["antenna_sweep_cdf.csv"]
    write_manifest(out, args.command, cfg, outputs)
    log.info("wrote %s", ", ".join(str(out / o) for o in outputs))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
