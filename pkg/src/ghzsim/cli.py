"""``ghzsim`` command line: run, matrix, lhv, timing, parse."""

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import acquire, engine, ghz, seqlang
from .spinsys import SpinSystem, SpinSystemError, alanine_config_path, equilibrium_deviation

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class ConfigError(ValueError):
    pass


@dataclass
class CliConfig:
    system_path: Path
    output_dir: Path
    dwell: float = acquire.DEFAULT_DWELL
    n_points: int = acquire.DEFAULT_POINTS
    include_weak_couplings: bool = False
    inter_pulse_gap_ms: float = 0.0

    def validate(self):
        if not self.system_path.is_file():
            raise ConfigError(f"spin-system file not found: {self.system_path}")
        if not self.dwell > 0:
            raise ConfigError("dwell must be positive")
        if self.n_points < 2:
            raise ConfigError("points must be at least 2")
        if self.inter_pulse_gap_ms < 0:
            raise ConfigError("gap must be non-negative")
        return self

    def load_system(self) -> SpinSystem:
        try:
            return SpinSystem.load(self.system_path).active(self.include_weak_couplings)
        except SpinSystemError as exc:
            raise ConfigError(str(exc)) from exc


_CONFIG_KEYS = {
    "system": "system_path",
    "out": "output_dir",
    "dwell": "dwell",
    "points": "n_points",
    "include_weak_couplings": "include_weak_couplings",
    "gap_ms": "inter_pulse_gap_ms",
}


def resolve_config(args) -> CliConfig:
    """Defaults, then ``--config`` file keys, then explicit flags."""
    values = {"system_path": alanine_config_path(), "output_dir": Path("results")}
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
        unknown = set(data) - set(_CONFIG_KEYS)
        if unknown:
            raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
        for key, attr in _CONFIG_KEYS.items():
            if key in data:
                values[attr] = data[key]
    for key, attr in _CONFIG_KEYS.items():
        flag = getattr(args, key, None)
        if flag is not None and flag is not False:
            values[attr] = flag
    cfg = CliConfig(
        system_path=Path(values["system_path"]),
        output_dir=Path(values["output_dir"]),
        dwell=float(values.get("dwell", acquire.DEFAULT_DWELL)),
        n_points=int(values.get("n_points", acquire.DEFAULT_POINTS)),
        include_weak_couplings=bool(values.get("include_weak_couplings", False)),
        inter_pulse_gap_ms=float(values.get("inter_pulse_gap_ms", 0.0)),
    )
    return cfg.validate()


def _write(path: Path, text: str):
    path.write_text(text, encoding="utf-8")


def _json(data) -> str:
    return json.dumps(data, indent=2) + "\n"


def cmd_run(args) -> int:
    cfg = resolve_config(args)
    system = cfg.load_system()
    settings = [args.measure] if args.measure else list(ghz.SETTINGS)
    try:
        report = ghz.run_experiment(system, settings, cfg.dwell, cfg.n_points, cfg.inter_pulse_gap_ms)
    except (acquire.DecodeError, engine.EngineError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    for res in report.settings:
        _write(out / f"spectrum_{res.axes}.csv", acquire.spectrum_to_csv(res.spectrum))
        _write(out / f"multiplet_{res.axes}.json", _json(res.multiplet.to_dict(res.axes)))
    _write(out / "report.json", _json(report.to_dict()))
    for res in report.settings:
        signs = "".join("+" if ln.sign > 0 else "-" for ln in res.multiplet.lines)
        print(f"{res.axes}: lines {signs}  product {res.product:+d}  oracle {res.oracle:+.6f}  "
              f"{'ok' if res.passed else 'FAIL'}")
    print(f"wrote {len(report.settings)} spectra and report.json to {out}")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_matrix(args) -> int:
    cfg = resolve_config(args)
    system = cfg.load_system()
    rho_eq = equilibrium_deviation(system.n)
    if args.stage == "eq":
        print(engine.dump_matrix(rho_eq, 1.0, stage="eq"))
        return EXIT_OK
    try:
        prepared, scale, dev = ghz.prepare(system)
        if args.stage == "pp":
            rho, reference = prepared.rho, engine.rho_pp_exact(system.n)
        else:
            rho = engine.run(prepared.rho, system, seqlang.rotate_ghz()).rho
            reference = engine.rho_ghz_reference(system.n)
    except engine.EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    dev = float(np.max(np.abs(rho - reference)))
    print(engine.dump_matrix(rho, scale, stage=args.stage, max_deviation=dev))
    return EXIT_OK if dev <= engine.PATTERN_TOL else EXIT_FAIL


def cmd_lhv(args) -> int:
    res = ghz.lhv_enumerate()
    names = "  ".join(f"P_{s}" for s in ghz.SETTINGS)
    if args.list:
        print(f"m1x m1y m2x m2y m3x m3y  {names}  parity")
        for a, p in zip(res.assignments, res.products):
            cells = " ".join(f"{v:+d} " for v in a)
            prods = "  ".join(f"{v:+4d} " for v in p)
            print(f"{cells}  {prods}  {int(np.prod(p)):+d}")
    else:
        print(f"achievable patterns ({names}):")
        for p in sorted(res.achievable, reverse=True):
            print("  " + " ".join(f"{v:+d}" for v in p))
    print(f"parity of the four products: {'always +1' if res.parity_ok else 'VIOLATED'}")
    print(f"max satisfied: {res.max_satisfied}/4; quantum pattern achievable: "
          f"{'yes' if res.quantum_achievable else 'no'}")
    return EXIT_OK


def cmd_timing(args) -> int:
    cfg = resolve_config(args)
    timing = ghz.timing_report(cfg.load_system(), cfg.inter_pulse_gap_ms)
    print(_json({"schema_version": "1", **timing.to_dict()}), end="")
    return EXIT_OK


def cmd_parse(args) -> int:
    if args.builtin:
        try:
            seq = seqlang.builtin(args.builtin, gap_ms=args.gap_ms or 0.0)
        except seqlang.SequenceError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    else:
        path = Path(args.file)
        if not path.is_file():
            print(f"error: sequence file not found: {path}", file=sys.stderr)
            return EXIT_CONFIG
        system = resolve_config(args).load_system() if args.check else None
        try:
            seq = seqlang.parse(path.read_text(), system)
        except seqlang.SequenceError as exc:
            print(f"error: {path}: {exc}", file=sys.stderr)
            return EXIT_FAIL
    text = seqlang.format(seq)
    print(text, end="")
    if seqlang.parse(text) != seq:
        print("error: round trip changed the sequence", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with any of: " + ", ".join(_CONFIG_KEYS))
    common.add_argument("--system", help="spin-system JSON (default: bundled alanine.json)")
    common.add_argument("--include-weak-couplings", dest="include_weak_couplings", action="store_true",
                        help="keep couplings flagged weak (alanine J13) in the Hamiltonian")
    common.add_argument("--gap-ms", dest="gap_ms", type=float, help="gap between the two readout pulses")

    parser = argparse.ArgumentParser(prog="ghzsim", description="Three-spin NMR GHZ experiment simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", parents=[common], help="run the four-setting experiment")
    p.add_argument("--out", help="output directory (default: results)")
    p.add_argument("--measure", choices=ghz.SETTINGS, help="run a single setting")
    p.add_argument("--dwell", type=float, help="dwell time in seconds")
    p.add_argument("--points", type=int, help="number of FID points")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("matrix", parents=[common], help="print the deviation matrix at a stage")
    p.add_argument("stage", choices=("eq", "pp", "ghz"))
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("lhv", help="enumerate local hidden-variable assignments")
    p.add_argument("--list", action="store_true", help="print all 64 assignments")
    p.set_defaults(func=cmd_lhv)

    p = sub.add_parser("timing", parents=[common], help="sequence durations against 1/(2 J12)")
    p.set_defaults(func=cmd_timing)

    p = sub.add_parser("parse", parents=[common], help="parse, reformat and round-trip a pulse program")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("file", nargs="?", help="pulse-program file")
    src.add_argument("--builtin", help="prepare_pp, rotate_ghz or measure_xyy etc.")
    p.add_argument("--check", action="store_true", help="validate spins and couplings against --system")
    p.set_defaults(func=cmd_parse)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
