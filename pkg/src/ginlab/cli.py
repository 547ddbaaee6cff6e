"""Seeded experiment commands emitting CSV, SVG, and a JSON run manifest.

Each command is a pure function of its configuration: matrices come from
per-trial streams derived from the seed, trials run in parallel but are
written in index order, and floats are serialized at 17 significant digits,
so repeat runs produce byte-identical CSVs.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import dataclasses
import hashlib
import json
import math
import os
import sys
import time
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__
from ._threads import thread_count
from .crouzeix import alpha_sweep, cauchy_defect, numerical_range_boundary, write_sweep_csv
from .ensembles import derive_seed, make_system, sample_ginibre
from .gmres import gmres_residuals
from .linalg import NumericalError, SingularMatrixError, eigenvalues
from .spectral_sets import annulus_probe, edge_e, resolvent_norm
from .svg import render_svg

__all__ = ["ExperimentConfig", "RunManifest", "run", "main"]

_COMMANDS = ("fig1", "fig2", "fig3", "fig4", "gmres", "pseudo", "nrange", "crouzeix")
_B_MODES = ("independent", "adversarial")

# Fig 2 probes z on the positive real axis; the x variable is |z|^2 - 1.
_FIG2_X_MIN, _FIG2_X_MAX, _FIG2_X_POINTS = 0.05, 1.5, 30
_REFERENCE_RADIUS = math.sqrt(2.0)

_DEFAULTS: dict[str, dict] = {
    "fig1": {"n": 1500, "sigma": 0.25, "k_max": 30, "trials": 1},
    "fig2": {"n": 1000, "trials": 10},
    "fig3": {"n": 1000, "trials": 1, "angles": 256},
    "fig4": {"n": 1000, "trials": 10},
    "gmres": {"n": 800, "sigma": 0.25, "k_max": 20, "trials": 1},
    "pseudo": {"n": 1000, "trials": 1, "angles": 32},
    "nrange": {"n": 1000, "trials": 1, "angles": 256},
    "crouzeix": {"n": 100, "trials": 1, "quad": 256},
}


def _default_alphas() -> tuple[float, ...]:
    return tuple(float(a) for a in np.linspace(-0.96, 0.96, 33))


@dataclasses.dataclass(frozen=True)
class ExperimentConfig:
    """Resolved settings for one experiment command."""

    command: str
    n: int = 1000
    sigma: float = 0.25
    seed: int = 0
    trials: int = 1
    k_max: int = 30
    out_dir: str = "runs"
    emit_svg: bool = False
    quad: int = 256
    angles: int = 256
    alphas: tuple[float, ...] | None = None
    b_mode: str = "independent"

    def __post_init__(self):
        if self.command not in _COMMANDS:
            raise ValueError(f"unknown command {self.command!r}, expected {_COMMANDS}")
        if not isinstance(self.n, int) or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n!r}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be an integer in [0, 2^64), got {self.seed!r}")
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ValueError(f"trials must be a positive integer, got {self.trials!r}")
        if not isinstance(self.k_max, int) or self.k_max < 1:
            raise ValueError(f"k_max must be a positive integer, got {self.k_max!r}")
        if self.command in ("fig1", "gmres"):
            if not (isinstance(self.sigma, float) and 0.0 < self.sigma < 1.0):
                raise ValueError(f"sigma must lie in (0, 1), got {self.sigma!r}")
        if not isinstance(self.quad, int) or self.quad < 16:
            raise ValueError(f"quad must be an integer >= 16, got {self.quad!r}")
        if not isinstance(self.angles, int) or self.angles < 3:
            raise ValueError(f"angles must be an integer >= 3, got {self.angles!r}")
        if self.b_mode not in _B_MODES:
            raise ValueError(f"b_mode must be one of {_B_MODES}, got {self.b_mode!r}")
        if self.alphas is not None:
            if not self.alphas:
                raise ValueError("alphas must be non-empty when given")
            for a in self.alphas:
                if not (isinstance(a, float) and math.isfinite(a) and abs(a) < 1.0):
                    raise ValueError(f"alphas must be reals with |alpha| < 1, got {a!r}")


@dataclasses.dataclass(frozen=True)
class RunManifest:
    """Record of one run: config echo, version, timing, and output hashes."""

    config: dict
    version: str
    wall_seconds: float
    outputs: tuple[dict, ...]
    notes: dict

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True)

    def write(self, path) -> None:
        # Write-then-rename so a crash never leaves a truncated manifest.
        path = Path(os.fspath(path))
        tmp = path.with_suffix(path.suffix + ".tmp")
        with open(tmp, "w", newline="\n") as fh:
            fh.write(self.to_json() + "\n")
        os.replace(tmp, path)


def _map_trials(fn: Callable[[int], object], n_trials: int) -> list:
    """Run fn(0..n_trials-1), possibly in parallel, results in index order."""
    if n_trials == 1:
        return [fn(0)]
    workers = min(thread_count(), n_trials)
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn, t) for t in range(n_trials)]
        return [f.result() for f in futures]


def _write_rows(path: Path, header: str, rows: list[str]) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(row + "\n")


def _suffix(name: str, trial: int, trials: int) -> str:
    return name if trials == 1 else f"{name}_{trial}"


def _residual_commands(cfg: ExperimentConfig, out: Path) -> list[tuple[Path, str]]:
    files = []
    modes = _B_MODES if cfg.command == "fig1" else (cfg.b_mode,)
    for mode in modes:
        system = make_system(cfg.n, cfg.sigma, mode, cfg.seed)
        curve = gmres_residuals(system, cfg.k_max)
        name = f"fig1_{mode}.csv" if cfg.command == "fig1" else "gmres_curve.csv"
        path = out / name
        curve.to_csv(path)
        files.append((path, "fig1"))
    return files


def _fig2_files(cfg: ExperimentConfig, out: Path) -> list[tuple[Path, str]]:
    xs = np.logspace(
        math.log10(_FIG2_X_MIN), math.log10(_FIG2_X_MAX), _FIG2_X_POINTS
    )
    abs_zs = np.sqrt(1.0 + xs)

    def one_trial(t: int) -> list[str]:
        g = sample_ginibre(cfg.n, derive_seed(cfg.seed, t))
        rows = []
        for x, az in zip(xs, abs_zs):
            nv = resolvent_norm(g, complex(az, 0.0))
            rows.append(f"{t},{az:.17g},{x:.17g},{nv:.17g}")
        return rows

    per_trial = _map_trials(one_trial, cfg.trials)
    samples = out / "fig2_samples.csv"
    _write_rows(samples, "trial,abs_z,x,resolvent_norm", [r for rs in per_trial for r in rs])
    overlay = out / "fig2_overlay.csv"
    overlay_rows = [
        f"{x:.17g},{az:.17g},{math.sqrt(edge_e(float(az))):.17g}"
        for x, az in zip(xs, abs_zs)
    ]
    _write_rows(overlay, "x,abs_z,e_sqrt", overlay_rows)
    return [(samples, "fig2"), (overlay, "fig2_overlay")]


def _circle_file(out: Path, prefix: str) -> Path:
    path = out / f"{prefix}_circle.csv"
    rows = []
    for j in range(256):
        t = 2.0 * math.pi * j / 256
        rows.append(
            f"{t:.17g},{_REFERENCE_RADIUS * math.cos(t):.17g},"
            f"{_REFERENCE_RADIUS * math.sin(t):.17g}"
        )
    _write_rows(path, "theta,re,im", rows)
    return path


def _nrange_files(cfg: ExperimentConfig, out: Path) -> list[tuple[Path, str]]:
    prefix = "fig3" if cfg.command == "fig3" else "nrange"

    def one_trial(t: int):
        g = sample_ginibre(cfg.n, derive_seed(cfg.seed, t))
        return numerical_range_boundary(g, cfg.angles), eigenvalues(g)

    results = _map_trials(one_trial, cfg.trials)
    files: list[tuple[Path, str]] = []
    for t, (poly, eigs) in enumerate(results):
        bpath = out / f"{_suffix(f'{prefix}_boundary', t, cfg.trials)}.csv"
        poly.to_csv(bpath)
        files.append((bpath, "fig3"))
        epath = out / f"{_suffix(f'{prefix}_eigenvalues', t, cfg.trials)}.csv"
        _write_rows(
            epath, "re,im", [f"{v.real:.17g},{v.imag:.17g}" for v in eigs]
        )
        files.append((epath, "fig3_eigs"))
    files.append((_circle_file(out, prefix), ""))
    return files


def _fig4_files(cfg: ExperimentConfig, out: Path) -> list[tuple[Path, str]]:
    alphas = cfg.alphas if cfg.alphas is not None else _default_alphas()

    def one_trial(t: int) -> list[str]:
        g = sample_ginibre(cfg.n, derive_seed(cfg.seed, t))
        # The grid itself is validated up front, so a ValueError here means
        # the sample's spectrum escaped the disk: a sample property, not a
        # configuration error.
        try:
            pairs = alpha_sweep(g, alphas, _REFERENCE_RADIUS)
        except ValueError as exc:
            raise NumericalError(f"alpha_sweep (trial {t}): {exc}") from exc
        return [f"{t},{a:.17g},{v:.17g}" for a, v in pairs]

    per_trial = _map_trials(one_trial, cfg.trials)
    path = out / "fig4_sweep.csv"
    _write_rows(path, "trial,alpha,norm", [r for rs in per_trial for r in rs])
    return [(path, "fig4")]


def _pseudo_files(cfg: ExperimentConfig, out: Path) -> list[tuple[Path, str]]:
    def one_trial(t: int):
        g = sample_ginibre(cfg.n, derive_seed(cfg.seed, t))
        return annulus_probe(g, 1.2, 1.5, 4, cfg.angles)

    probes = _map_trials(one_trial, cfg.trials)
    files = []
    for t, probe in enumerate(probes):
        path = out / f"{_suffix('pseudo_annulus', t, cfg.trials)}.csv"
        probe.to_csv(path)
        files.append((path, "annulus"))
    return files


def _crouzeix_files(cfg: ExperimentConfig, out: Path) -> list[tuple[Path, str]]:
    g = sample_ginibre(cfg.n, cfg.seed)
    try:
        report = cauchy_defect(g, 0.0, _REFERENCE_RADIUS, cfg.quad)
    except ValueError as exc:
        # Spectrum escaping the disk is a property of the sample, not of the
        # requested configuration.
        raise NumericalError(f"cauchy_defect: {exc}") from exc
    jpath = out / "crouzeix_defect.json"
    report.write_json(jpath)
    alphas = cfg.alphas if cfg.alphas is not None else _default_alphas()
    try:
        pairs = alpha_sweep(g, alphas, _REFERENCE_RADIUS)
    except ValueError as exc:
        raise NumericalError(f"alpha_sweep: {exc}") from exc
    spath = out / "crouzeix_sweep.csv"
    write_sweep_csv(spath, pairs)
    return [(jpath, ""), (spath, "fig4")]


_RUNNERS = {
    "fig1": _residual_commands,
    "gmres": _residual_commands,
    "fig2": _fig2_files,
    "fig3": _nrange_files,
    "nrange": _nrange_files,
    "fig4": _fig4_files,
    "pseudo": _pseudo_files,
    "crouzeix": _crouzeix_files,
}


def _notes(cfg: ExperimentConfig) -> dict:
    notes: dict = {}
    if cfg.command == "fig2":
        notes["x_grid"] = (
            f"{_FIG2_X_POINTS} log-spaced points on [{_FIG2_X_MIN}, {_FIG2_X_MAX}] "
            "in |z|^2 - 1, z on the positive real axis"
        )
    if cfg.command in ("fig4", "crouzeix") and cfg.alphas is None:
        notes["alpha_grid"] = "33 uniform points on [-0.96, 0.96]"
    if cfg.command in ("fig3", "nrange"):
        notes["reference_circle"] = "radius sqrt(2), 256 nodes"
    if cfg.command in ("fig4", "crouzeix", "fig3", "nrange"):
        notes["disk_radius"] = _REFERENCE_RADIUS
    return notes


def run(config: ExperimentConfig) -> RunManifest:
    """Execute one command, render requested SVGs, and write the manifest.

    Returns the manifest; all outputs land in ``config.out_dir``, with the
    manifest written last via an atomic rename.
    """
    start = time.perf_counter()
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = _RUNNERS[config.command](config, out)
    paths = [p for p, _ in files]
    if config.emit_svg:
        for p, kind in files:
            if kind:
                paths.append(render_svg(p, kind))
    outputs = []
    for p in paths:
        digest = hashlib.sha256(p.read_bytes()).hexdigest()
        outputs.append({"name": p.name, "sha256": digest})
    manifest = RunManifest(
        config=dataclasses.asdict(config),
        version=__version__,
        wall_seconds=time.perf_counter() - start,
        outputs=tuple(outputs),
        notes=_notes(config),
    )
    manifest.write(out / f"{config.command}_manifest.json")
    return manifest


def _parse_alphas(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad alpha list {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("alpha list is empty")
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ginlab",
        description="Seeded random-matrix experiments: GMRES rates, resolvent "
        "norms, numerical range, and Blaschke norm sweeps.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)
    for cmd in _COMMANDS:
        d = _DEFAULTS[cmd]
        sp = subs.add_parser(cmd, help=f"run the {cmd} experiment")
        sp.add_argument("--n", type=int, default=d.get("n", 1000))
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--trials", type=int, default=d.get("trials", 1))
        sp.add_argument("--out", default=f"runs/{cmd}")
        sp.add_argument("--svg", action="store_true")
        if cmd in ("fig1", "gmres"):
            sp.add_argument("--sigma", type=float, default=d["sigma"])
            sp.add_argument("--k-max", type=int, default=d["k_max"])
        if cmd == "gmres":
            sp.add_argument("--b-mode", choices=_B_MODES, default="independent")
        if cmd in ("fig3", "pseudo", "nrange"):
            sp.add_argument("--angles", type=int, default=d["angles"])
        if cmd == "crouzeix":
            sp.add_argument("--quad", type=int, default=d["quad"])
        if cmd in ("fig4", "crouzeix"):
            sp.add_argument("--alphas", type=_parse_alphas, default=None)
    return parser


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    kwargs = {
        "command": args.command,
        "n": args.n,
        "seed": args.seed,
        "trials": args.trials,
        "out_dir": args.out,
        "emit_svg": args.svg,
    }
    for attr, field in (
        ("sigma", "sigma"),
        ("k_max", "k_max"),
        ("b_mode", "b_mode"),
        ("angles", "angles"),
        ("quad", "quad"),
        ("alphas", "alphas"),
    ):
        if hasattr(args, attr):
            kwargs[field] = getattr(args, attr)
    return ExperimentConfig(**kwargs)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = _config_from_args(args)
        manifest = run(config)
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, SingularMatrixError) as exc:
        print(f"numerical failure in {args.command}: {exc}", file=sys.stderr)
        return 1
    print(
        f"{args.command}: {len(manifest.outputs)} files in {config.out_dir} "
        f"({manifest.wall_seconds:.2f}s)"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
