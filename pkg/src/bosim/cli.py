"""Command-line entry point.

Exit codes: 0 success, 1 invalid configuration, 2 runtime failure,
3 a ``verify`` criterion failed.
"""

from __future__ import annotations

import argparse
import configparser
import math
import os
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np

from . import acceptance, io
from .experiments import (
    DEFAULT_PAIR_BUDGET,
    DEFAULT_TRANSMISSION,
    ExperimentConfig,
    baseline_pair_probability,
    fit_visibility,
    hom_dip_probability,
    peak_contrast,
    polarization_hom_probability,
    run_scan,
    same_output_rate,
)
from .distinguishability import delay_from_path
from .tomography import (
    CANONICAL_SETTINGS,
    TomographySettings,
    expected_counts,
    fidelity,
    mle_reconstruct,
    named_state,
    simulate_tomography,
)

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME, EXIT_VERIFY = 0, 1, 2, 3
SEED_ENV = "BOSIM_SEED"

SCAN_COMMANDS = {"scan-projected": "projected", "scan-baseline": "baseline", "hom-dip": "hom_dip"}
POINT_EXPERIMENTS = ("scan-projected", "scan-baseline", "hom-dip", "same-output")

# key -> (type, default)
PARAMETERS: dict[str, tuple[type, Any]] = {
    "experiment": (str, "scan-projected"),
    "tau_c_fs": (float, 210.0),
    "scan_min_um": (float, -160.0),
    "scan_max_um": (float, 160.0),
    "points": (int, 81),
    "pairs": (float, DEFAULT_PAIR_BUDGET),
    "eta": (float, DEFAULT_TRANSMISSION),
    "visibility": (float, 1.0),
    "seed": (int, None),
    "monte_carlo": (bool, False),
    "out": (str, None),
    "format": (str, "csv"),
    "plot": (bool, False),
    "delay_fs": (float, 0.0),
    "state": (str, "HV"),
    "counts": (float, 5000.0),
    "exact": (bool, False),
    "counts_in": (str, None),
    "counts_out": (str, None),
}


class ConfigError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def load_config_file(path: str) -> dict[str, Any]:
    """Flat ``key = value`` file; an optional single section header is ignored."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        if not text.lstrip().startswith("["):
            text = "[bosim]\n" + text
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config file: {exc}") from exc
    values: dict[str, Any] = {}
    for section in parser.sections():
        for raw_key, raw in parser.items(section):
            key = raw_key.strip().replace("-", "_")
            if key not in PARAMETERS:
                raise ConfigError(f"unknown config key {raw_key!r}")
            kind = PARAMETERS[key][0]
            try:
                values[key] = _parse_bool(raw) if kind is bool else kind(raw.strip())
            except ValueError as exc:
                raise ConfigError(f"bad value for {raw_key!r}: {raw!r}") from exc
    return values


@dataclass
class RunConfig:
    command: str
    values: dict[str, Any]

    def __getattr__(self, name):
        try:
            return self.values[name]
        except KeyError:
            raise AttributeError(name) from None

    def experiment_config(self) -> ExperimentConfig:
        positions = np.linspace(self.scan_min_um, self.scan_max_um, self.points)
        try:
            return ExperimentConfig(
                tau_c=self.tau_c_fs,
                scan_positions=tuple(float(x) for x in positions),
                pair_budget=self.pairs,
                polarizer_transmission=self.eta,
                mode_match_visibility=self.visibility,
                rng_seed=self.seed,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


def resolve(command: str, args: argparse.Namespace) -> RunConfig:
    """Merge defaults, ``BOSIM_SEED``, the config file and flags (flags win)."""
    values = {key: default for key, (_, default) in PARAMETERS.items()}
    if getattr(args, "config", None):
        values.update(load_config_file(args.config))
    for key in PARAMETERS:
        flag = getattr(args, key, None)
        if flag is not None and flag is not False:
            values[key] = flag
    if values["seed"] is None:
        env = os.environ.get(SEED_ENV)
        try:
            values["seed"] = int(env) if env else 0
        except ValueError as exc:
            raise ConfigError(f"{SEED_ENV} is not an integer: {env!r}") from exc
    _range_check(values)
    return RunConfig(command, values)


def _range_check(v: dict[str, Any]) -> None:
    checks = [
        (v["tau_c_fs"] > 0 and math.isfinite(v["tau_c_fs"]), "tau-c-fs must be positive"),
        (v["scan_min_um"] <= v["scan_max_um"], "scan-min-um must not exceed scan-max-um"),
        (v["points"] >= 1, "points must be at least 1"),
        (v["pairs"] > 0, "pairs must be positive"),
        (0.0 <= v["eta"] <= 1.0, "eta must lie in [0, 1]"),
        (0.0 <= v["visibility"] <= 1.0, "visibility must lie in [0, 1]"),
        (0 <= v["seed"] < 2 ** 64, "seed must be an unsigned 64-bit integer"),
        (v["counts"] > 0, "counts must be positive"),
        (v["format"] in ("csv", "json"), "format must be csv or json"),
        (v["experiment"] in POINT_EXPERIMENTS, f"experiment must be one of {POINT_EXPERIMENTS}"),
    ]
    for ok, message in checks:
        if not ok:
            raise ConfigError(message)
    if v["plot"] and not v["out"]:
        raise ConfigError("--plot needs --out to place the figure next to")


# ---------------------------------------------------------------- commands


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _summary(line: str, cfg: RunConfig) -> None:
    # keep stdout clean for the artifact when no output file is given
    stream = sys.stdout if cfg.out or cfg.command in ("point", "verify") else sys.stderr
    print(line, file=stream)


def _figure_path(out: str) -> Path:
    return Path(out).with_suffix(".png")


def cmd_scan(cfg: RunConfig) -> int:
    kind = SCAN_COMMANDS[cfg.command]
    exp = cfg.experiment_config()
    curve = run_scan(kind, exp, monte_carlo=cfg.monte_carlo)
    if cfg.format == "csv":
        _emit(io.scan_to_csv(curve), cfg.out)
    else:
        meta = {
            "tau_c_fs": exp.tau_c,
            "pair_budget": exp.pair_budget,
            "polarizer_transmission": exp.polarizer_transmission,
            "mode_match_visibility": exp.mode_match_visibility,
            "seed": exp.rng_seed,
            "monte_carlo": cfg.monte_carlo,
        }
        _emit(io.dumps(io.scan_to_dict(curve, **meta)), cfg.out)
    if cfg.plot:
        from .plotting import plot_scans

        plot_scans([curve], _figure_path(cfg.out), title=cfg.command)

    p = curve.probabilities
    if kind == "projected":
        detail = f"P_min={p.min():.6f} P_max={p.max():.6f} contrast={peak_contrast(p):.4f}"
    elif kind == "baseline":
        detail = f"probability={p[0]:.6f} spread={p.max() - p.min():.3g} expected={curve.expected_counts[0]:.1f}"
    else:
        detail = f"P_min={p.min():.6f} P_max={p.max():.6f}"
        if len(p) >= 10:
            detail += f" visibility={fit_visibility(curve):.4f}"
    sim = curve.simulated_counts
    if sim is not None:
        detail += f" simulated_mean={sim.mean():.1f} simulated_std={sim.std(ddof=1) if len(sim) > 1 else 0.0:.1f}"
    _summary(f"{cfg.command}: points={len(curve.points)} {detail}", cfg)
    return EXIT_OK


def cmd_point(cfg: RunConfig) -> int:
    exp = cfg.experiment_config()
    fn = {
        "scan-projected": polarization_hom_probability,
        "scan-baseline": baseline_pair_probability,
        "hom-dip": hom_dip_probability,
        "same-output": same_output_rate,
    }[cfg.experiment]
    p = fn(cfg.delay_fs, exp)
    _summary(f"{cfg.experiment} delay_fs={cfg.delay_fs:g} probability={p:.12g}", cfg)
    return EXIT_OK


def cmd_tomo(cfg: RunConfig) -> int:
    if cfg.format != "json":
        raise ConfigError("tomo writes JSON; use --counts-out for a counts CSV")
    try:
        target = named_state(cfg.state)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    settings = TomographySettings(CANONICAL_SETTINGS, counts_per_setting=cfg.counts, rng_seed=cfg.seed)
    if cfg.counts_in:
        try:
            labels, counts = io.read_counts_csv(cfg.counts_in)
            settings = TomographySettings(labels, counts_per_setting=cfg.counts, rng_seed=cfg.seed)
        except (OSError, ValueError, IndexError) as exc:
            raise ConfigError(f"bad counts file: {exc}") from exc
    elif cfg.exact:
        counts = [float(x) for x in expected_counts(target, settings)]
    else:
        counts = simulate_tomography(target, settings)
    if cfg.counts_out:
        io.write_counts_csv(settings.projector_set, [round(c) for c in counts], cfg.counts_out)

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        result = mle_reconstruct(counts, settings)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    f = fidelity(result.rho, target)
    doc = io.density_to_dict(
        result.rho,
        target_state=cfg.state,
        fidelity=f,
        log_likelihood=result.log_likelihood,
        iterations=result.iterations,
        converged=result.converged,
        settings=list(settings.projector_set),
        counts=[float(c) for c in counts],
        counts_per_setting=settings.counts_per_setting,
        seed=cfg.seed,
    )
    _emit(io.dumps(doc), cfg.out)
    if cfg.plot:
        from .plotting import plot_density_matrix

        plot_density_matrix(result.rho, _figure_path(cfg.out), title=f"reconstructed ({cfg.state})")
    _summary(
        f"tomo: state={cfg.state} fidelity={f:.6f} iterations={result.iterations} converged={result.converged}", cfg
    )
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    if args.list:
        for c in acceptance.CRITERIA:
            print(c.id)
        return EXIT_OK
    tau_c = 210.0 if args.tau_c_fs is None else args.tau_c_fs
    first_failure = None
    for c in acceptance.CRITERIA:
        ok, detail = acceptance.run_criterion(c, tau_c)
        print(f"{'PASS' if ok else 'FAIL'} {c.id}: {detail}")
        if not ok and first_failure is None:
            first_failure = c.id
    if first_failure:
        print(f"verify failed: {first_failure}", file=sys.stderr)
        return EXIT_VERIFY
    print("all criteria passed")
    return EXIT_OK


# ---------------------------------------------------------------- parser


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value config file (flags override it)")
    p.add_argument("--tau-c-fs", dest="tau_c_fs", type=float, help="coherence time in fs (210)")
    p.add_argument("--scan-min-um", dest="scan_min_um", type=float, help="first prism position in um (-160)")
    p.add_argument("--scan-max-um", dest="scan_max_um", type=float, help="last prism position in um (160)")
    p.add_argument("--points", type=int, help="number of scan points (81)")
    p.add_argument("--pairs", type=float, help="expected detected pairs per point (20777)")
    p.add_argument("--eta", type=float, help="per-photon polarizer transmission (0.968)")
    p.add_argument("--visibility", type=float, help="HOM mode-matching visibility (1.0)")
    p.add_argument("--seed", type=int, help=f"64-bit seed (default ${SEED_ENV} or 0)")
    p.add_argument("--monte-carlo", dest="monte_carlo", action="store_true", help="add Poisson-sampled counts")
    p.add_argument("--out", help="output file (default: standard output)")
    p.add_argument("--format", choices=("csv", "json"), help="output format (csv)")
    p.add_argument("--plot", action="store_true", help="also render a PNG next to --out")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bosim", description="Two-photon polarization HOM simulator.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, text in (
        ("scan-projected", "pair counts through the 45 degree polarizer versus delay"),
        ("scan-baseline", "pair counts without the polarizer versus delay"),
        ("hom-dip", "HOM coincidence dip for co-polarized photons"),
    ):
        _add_common(sub.add_parser(name, help=text))
    point = sub.add_parser("point", help="one probability at a single delay")
    _add_common(point)
    point.add_argument("--experiment", choices=POINT_EXPERIMENTS, help="which probability (scan-projected)")
    point.add_argument("--delay-fs", dest="delay_fs", type=float, help="delay in fs (0)")
    point.add_argument("--position-um", dest="position_um", type=float, help="prism position in um, instead of --delay-fs")
    tomo = sub.add_parser("tomo", help="simulate tomography counts and reconstruct the density matrix")
    _add_common(tomo)
    tomo.add_argument("--state", help="HV, VH, DD, ..., psi+ or mixed (HV)")
    tomo.add_argument("--counts", type=float, help="expected counts per setting (5000)")
    tomo.add_argument("--exact", action="store_true", help="use exact expected counts instead of Poisson draws")
    tomo.add_argument("--counts-in", dest="counts_in", help="reconstruct from a setting,count CSV")
    tomo.add_argument("--counts-out", dest="counts_out", help="write the counts as setting,count CSV")
    verify = sub.add_parser("verify", help="run the built-in acceptance checks")
    verify.add_argument("--list", action="store_true", help="list criterion identifiers without running them")
    verify.add_argument("--tau-c-fs", dest="tau_c_fs", type=float, help="override the coherence time")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "verify":
        return cmd_verify(args)
    try:
        if getattr(args, "position_um", None) is not None:
            if args.delay_fs is not None:
                raise ConfigError("give either --delay-fs or --position-um")
            args.delay_fs = delay_from_path(args.position_um)
        if args.command == "tomo" and args.format is None:
            args.format = "json"
        cfg = resolve(args.command, args)
        if args.command in SCAN_COMMANDS:
            return cmd_scan(cfg)
        if args.command == "point":
            return cmd_point(cfg)
        return cmd_tomo(cfg)
    except ConfigError as exc:
        print(f"bosim: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # anything else is a runtime failure
        print(f"bosim: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
