"""Command-line interface wiring configs to the circuit and photonic engines.

Subcommands: circuit-run, circuit-sweep, hom-scan, clone-fidelity. Every run
with an explicit --seed is bit-reproducible; an omitted seed falls back to
the fixed constant ``DEFAULT_SEED`` (never to entropy). Exit codes: 0 on
success, 2 for usage or validation problems, 1 for runtime failures.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .analysis import build_report, export_report
from .circuit import haar_random_qubit, run_teleunot
from .core import Qubit
from .figures import render_scan_figure
from .photonics import (
    ANCILLA_MODELS,
    DEFAULT_SEED,
    SPEED_OF_LIGHT_UM_PER_FS,
    DelayScanConfig,
    fidelity_from_r,
    run_scan,
)

__all__ = ["main", "entry_point", "parse_phi"]

_FIDELITY_TARGETS = {
    "f_clone_S": 5.0 / 6.0,
    "f_clone_A": 5.0 / 6.0,
    "f_unot_B": 2.0 / 3.0,
    "p_teleport": 0.25,
}
_SWEEP_TOLERANCE = 1e-9

_CONFIG_FIELDS = (
    "z_values",
    "trials_per_z",
    "input_phi",
    "seed",
    "tau_coh",
    "wavelength",
    "ancilla_model",
    "v_max",
)


def parse_phi(spec: str) -> Qubit:
    """Parse a qubit spec: a named state (H, V, D, R) or 'alpha,beta'.

    Components accept Python complex syntax ('0.6,0.8j'); unnormalized
    pairs are normalized, the zero vector is rejected.
    """
    text = spec.strip()
    if "," not in text:
        try:
            return Qubit.from_label(text)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from exc
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected two amplitudes, got {spec!r}")
    try:
        alpha, beta = (complex(p.strip().replace("i", "j")) for p in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"cannot parse amplitudes from {spec!r}") from exc
    norm = (abs(alpha) ** 2 + abs(beta) ** 2) ** 0.5
    if norm < 1e-12:
        raise argparse.ArgumentTypeError("qubit amplitudes cannot both be zero")
    return Qubit(alpha / norm, beta / norm)


def _positive_float(text: str) -> float:
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def _fmt_complex(value: complex) -> str:
    return f"{value.real:.12g}{value.imag:+.12g}j"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="teleunot",
        description=(
            "Simulate universal optimal qubit cloning and the teleported "
            "universal-NOT, both as an exact quantum network and as a "
            "photon-pair beamsplitter experiment."
        ),
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help=f"RNG seed (default {DEFAULT_SEED})")
    common.add_argument("--out", type=Path, default=None, help="output file path")
    common.add_argument("--format", choices=("csv", "json"), default="csv",
                        help="report format (default csv)")
    common.add_argument("--threads", type=int, default=1,
                        help="worker thread cap; never changes results")

    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("circuit-run", parents=[common],
                         help="run the exact network once and print both branches")
    run.add_argument("--phi", type=parse_phi, default=Qubit.from_label("H"),
                     help="input qubit: H, V, D, R or 'alpha,beta' (default H)")
    run.set_defaults(func=_cmd_circuit_run)

    sweep = sub.add_parser("circuit-sweep", parents=[common],
                           help="check fidelities over Haar-random inputs")
    sweep.add_argument("-n", "--runs", type=int, default=100,
                       help="number of random inputs (default 100)")
    sweep.set_defaults(func=_cmd_circuit_sweep)

    scan = sub.add_parser("hom-scan", parents=[common],
                          help="Monte Carlo delay scan of the beamsplitter experiment")
    scan.add_argument("--config", type=Path, default=None,
                      help="JSON scan config; flags override file values")
    scan.add_argument("--z-min", type=float, default=None, help="first stage position (um)")
    scan.add_argument("--z-max", type=float, default=None, help="last stage position (um)")
    scan.add_argument("--z-steps", type=int, default=None,
                      help="number of stage positions (default 21)")
    scan.add_argument("--tau-coh-fs", type=_positive_float, default=None,
                      help="photon coherence time in fs (default 80)")
    scan.add_argument("--trials", type=int, default=None,
                      help="trials per stage position (default 100000)")
    scan.add_argument("--phi", type=parse_phi, default=None,
                      help="input qubit: H, V, D, R or 'alpha,beta' (default H)")
    scan.add_argument("--ancilla", choices=("linear", "haar"), default=None,
                      help="ancilla ensemble (default linear waveplate)")
    scan.add_argument("--vmax", type=float, default=None,
                      help="peak mode-matching overlap in (0, 1] (default 1.0)")
    scan.add_argument("--no-figure", action="store_true",
                      help="skip rendering the scan figure next to the report")
    scan.set_defaults(func=_cmd_hom_scan)

    fid = sub.add_parser("clone-fidelity", parents=[common],
                         help="fidelity (2R+1)/(2R+2) for an amplification ratio R")
    fid.add_argument("r", type=_positive_float, help="amplification ratio R > 0")
    fid.set_defaults(func=_cmd_clone_fidelity)

    return parser


def _cmd_circuit_run(args: argparse.Namespace) -> int:
    outcome = run_teleunot(args.phi)
    print(f"input phi = ({_fmt_complex(args.phi.alpha)}, {_fmt_complex(args.phi.beta)})")
    print(f"p_teleport = {_fmt(outcome.p_teleport)}")
    print(f"p_clone    = {_fmt(outcome.p_clone)}")
    print(f"f_clone_S  = {_fmt(outcome.f_clone_S)}")
    print(f"f_clone_A  = {_fmt(outcome.f_clone_A)}")
    print(f"f_unot_B   = {_fmt(outcome.f_unot_B)}")
    if args.out is not None:
        payload = {
            "input_phi": [
                [args.phi.alpha.real, args.phi.alpha.imag],
                [args.phi.beta.real, args.phi.beta.imag],
            ],
            "p_teleport": outcome.p_teleport,
            "p_clone": outcome.p_clone,
            "f_clone_S": outcome.f_clone_S,
            "f_clone_A": outcome.f_clone_A,
            "f_unot_B": outcome.f_unot_B,
        }
        args.out.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
        print(f"outcome written to {args.out}")
    return 0


def _cmd_circuit_sweep(args: argparse.Namespace) -> int:
    if args.runs < 1:
        raise ValueError(f"sweep needs at least one run, got {args.runs}")
    seed = args.seed if args.seed is not None else DEFAULT_SEED
    rng = np.random.default_rng(seed)
    samples = {name: [] for name in _FIDELITY_TARGETS}
    for _ in range(args.runs):
        outcome = run_teleunot(haar_random_qubit(rng))
        samples["f_clone_S"].append(outcome.f_clone_S)
        samples["f_clone_A"].append(outcome.f_clone_A)
        samples["f_unot_B"].append(outcome.f_unot_B)
        samples["p_teleport"].append(outcome.p_teleport)

    print(f"sweep over {args.runs} Haar-random input(s), seed {seed}")
    print(f"{'quantity':<12} {'min':>16} {'max':>16} {'mean':>16} {'target':>16}")
    worst = 0.0
    for name, target in _FIDELITY_TARGETS.items():
        values = samples[name]
        worst = max(worst, max(abs(v - target) for v in values))
        print(
            f"{name:<12} {_fmt(min(values)):>16} {_fmt(max(values)):>16} "
            f"{_fmt(sum(values) / len(values)):>16} {_fmt(target):>16}"
        )
    if worst > _SWEEP_TOLERANCE:
        print(f"FAIL: worst deviation {worst:.3e} exceeds {_SWEEP_TOLERANCE:.0e}")
        return 1
    print(f"PASS: worst deviation {worst:.3e} within {_SWEEP_TOLERANCE:.0e}")
    return 0


def _load_scan_config_file(path: Path) -> dict:
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise ValueError(f"config {path} must hold a JSON object")
    unknown = sorted(set(payload) - set(_CONFIG_FIELDS))
    if unknown:
        raise ValueError(
            f"config {path} has unknown field(s) {unknown}; expected {list(_CONFIG_FIELDS)}"
        )
    if "input_phi" in payload:
        raw = payload["input_phi"]
        if isinstance(raw, str):
            try:
                payload["input_phi"] = parse_phi(raw)
            except argparse.ArgumentTypeError as exc:
                raise ValueError(f"input_phi: {exc}") from exc
        elif isinstance(raw, (list, tuple)) and len(raw) == 2:
            pairs = [component if isinstance(component, (list, tuple)) else (component, 0.0)
                     for component in raw]
            payload["input_phi"] = Qubit(complex(*pairs[0]), complex(*pairs[1]))
        else:
            raise ValueError(f"input_phi: cannot interpret {raw!r}")
    return payload


def _assemble_scan_config(args: argparse.Namespace) -> DelayScanConfig:
    values: dict = {}
    if args.config is not None:
        values.update(_load_scan_config_file(args.config))

    if args.trials is not None:
        values["trials_per_z"] = args.trials
    if args.phi is not None:
        values["input_phi"] = args.phi
    if args.tau_coh_fs is not None:
        values["tau_coh"] = args.tau_coh_fs
    if args.ancilla is not None:
        values["ancilla_model"] = "haar" if args.ancilla == "haar" else "linear-waveplate"
    if args.vmax is not None:
        values["v_max"] = args.vmax
    if args.seed is not None:  # explicit flag beats config file
        values["seed"] = args.seed
    values.setdefault("seed", DEFAULT_SEED)

    tau = values.get("tau_coh", 80.0)
    z_flags = (args.z_min, args.z_max, args.z_steps)
    if any(flag is not None for flag in z_flags) or "z_values" not in values:
        z_span = 5.0 * tau * 2.0 * SPEED_OF_LIGHT_UM_PER_FS
        z_min = args.z_min if args.z_min is not None else -z_span
        z_max = args.z_max if args.z_max is not None else z_span
        steps = args.z_steps if args.z_steps is not None else 21
        if steps < 1:
            raise ValueError(f"z_steps: must be >= 1, got {steps}")
        values["z_values"] = tuple(float(z) for z in np.linspace(z_min, z_max, steps))

    values.setdefault("trials_per_z", 100_000)
    values.setdefault("input_phi", Qubit.from_label("H"))
    return DelayScanConfig(**values)


def _cmd_hom_scan(args: argparse.Namespace) -> int:
    cfg = _assemble_scan_config(args)
    if args.threads < 1:
        raise ValueError(f"threads: must be >= 1, got {args.threads}")
    tallies = run_scan(cfg, threads=args.threads)
    report = build_report(tallies, cfg)

    print(
        f"delay scan: {len(cfg.z_values)} positions, {cfg.trials_per_z} trials each, "
        f"ancilla {cfg.ancilla_model}, seed {cfg.seed}"
    )
    print(f"{'z_um':>12} {'c_clone':>9} {'c_anti':>9} {'r':>8} {'f':>8}")
    for row in report.rows:
        print(
            f"{row.z:>12.3f} {row.c_clone:>9} {row.c_anti:>9} "
            f"{row.r_ratio:>8.4f} {row.f_estimate:>8.4f}"
        )
    summary = report.summary
    print(
        f"peak (z = {summary.peak_z:.3f} um): R = {summary.peak_r:.4f} +/- "
        f"{summary.peak_r_sigma:.4f}, F = {summary.peak_f:.4f} +/- {summary.peak_f_sigma:.4f}"
    )
    print(f"anti-clone flatness: chi2/dof = {summary.anti_flatness_chi2_dof:.3f}")

    out = args.out if args.out is not None else Path(f"hom_scan.{args.format}")
    export_report(report, args.format, str(out))
    print(f"report written to {out}")
    if not args.no_figure:
        figure_path = out.with_suffix(".png")
        render_scan_figure(report, str(figure_path))
        print(f"figure written to {figure_path}")
    return 0


def _cmd_clone_fidelity(args: argparse.Namespace) -> int:
    print(_fmt(fidelity_from_r(args.r)))
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse handled usage errors or --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
