"""File formats, run configuration, and the command-line interface.

Commands: simulate, certify, hedge, contour, keyrate. Each reads a flat
key = value config file plus targeted command-line overrides, and every
certification run is written out as a run record that reproduces the
reported numbers from the echoed configuration alone.

Exit codes: 0 certified (or plain success for commands that do not
certify), 1 not certified, 2 inapplicable, 3 and above errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from ._version import __version__
from .bounds import (
    BoundReport,
    CorrelationStats,
    DetectorGeometry,
    discrete_steering_check,
    secret_key_rate,
    steering_certificate,
    steering_rhs,
)
from .entropy import NORMALIZATION_TOL, JointDistribution, marginal_a, marginal_b
from .spdc_sim import (
    BiphotonModel,
    counts_to_joint,
    joint_momentum_distribution,
    joint_position_distribution,
    sample_counts,
    threshold_renormalize,
    truncate_to_window,
)
from .stats import (
    ContourGrid,
    GaussianFit,
    agreement_best_ordering,
    agreement_identity,
    agreement_reversed,
    contour_grid,
    domain_probability_from_fit,
    effective_domain,
    hedge_min_domain,
    lhs_std,
)

EXIT_CERTIFIED = 0
EXIT_NOT_CERTIFIED = 1
EXIT_INAPPLICABLE = 2
EXIT_ERROR = 3

_VERDICT_EXIT = {
    "certified": EXIT_CERTIFIED,
    "not-certified": EXIT_NOT_CERTIFIED,
    "inapplicable": EXIT_INAPPLICABLE,
}


class ConfigError(ValueError):
    pass


class JointFileError(ValueError):
    pass


# ---------------------------------------------------------------------------
# run configuration

_CONFIG_TYPES = {
    "delta_x": float, "delta_k": float, "rhs_bits": float, "n_bar": int,
    "fill_x": float, "fill_k": float, "efficiency": float, "dims": int,
    "eta_x": float, "eta_k": float, "mu_x": float, "mu_k": float,
    "n_coinc_x": int, "n_coinc_k": int,
    "position_path": str, "momentum_path": str,
    "sigma_plus": float, "sigma_minus": float, "grid_extent": float,
    "pixels_per_axis": int, "momentum_extent": float, "counts": int,
    "ordering": str, "threshold": float, "sigma_multiplier": float,
    "resolution": int, "hedge_mode": str, "hedge_fixed_mu": float,
    "output_dir": str, "seed": int,
}

_MODEL_KEYS = ("sigma_plus", "sigma_minus", "grid_extent", "pixels_per_axis",
               "momentum_extent")


@dataclass
class RunConfig:
    """Flat run configuration mirroring the config-file keys one to one."""

    delta_x: float | None = None
    delta_k: float | None = None
    rhs_bits: float | None = None
    n_bar: int | None = None
    fill_x: float = 1.0
    fill_k: float = 1.0
    efficiency: float = 1.0
    dims: int = 1
    eta_x: float | None = None
    eta_k: float | None = None
    mu_x: float | None = None
    mu_k: float | None = None
    n_coinc_x: int | None = None
    n_coinc_k: int | None = None
    position_path: str | None = None
    momentum_path: str | None = None
    sigma_plus: float | None = None
    sigma_minus: float | None = None
    grid_extent: float | None = None
    pixels_per_axis: int | None = None
    momentum_extent: float | None = None
    counts: int | None = None
    ordering: str = "best"
    threshold: float = 0.0
    sigma_multiplier: float = 5.0
    resolution: int = 101
    hedge_mode: str = "common"
    hedge_fixed_mu: float = 1.0
    output_dir: str | None = None
    seed: int = 0

    def __post_init__(self):
        if self.ordering not in ("best", "identity", "reversed"):
            raise ConfigError("ordering must be 'best', 'identity' or 'reversed'")
        if self.sigma_multiplier < 0:
            raise ConfigError("sigma_multiplier must be nonnegative")
        if self.has_paths and self.has_model:
            raise ConfigError("configure either input paths or a model, not both")
        if (self.position_path is None) != (self.momentum_path is None):
            raise ConfigError("position_path and momentum_path must come together")

    @property
    def has_paths(self) -> bool:
        return self.position_path is not None

    @property
    def has_model(self) -> bool:
        return any(getattr(self, k) is not None for k in _MODEL_KEYS)

    def model(self) -> BiphotonModel:
        defaults = BiphotonModel()
        return BiphotonModel(
            sigma_plus=self.sigma_plus if self.sigma_plus is not None else defaults.sigma_plus,
            sigma_minus=self.sigma_minus if self.sigma_minus is not None else defaults.sigma_minus,
            grid_extent=self.grid_extent if self.grid_extent is not None else defaults.grid_extent,
            pixels_per_axis=self.pixels_per_axis if self.pixels_per_axis is not None else defaults.pixels_per_axis,
            momentum_extent=self.momentum_extent,
        )

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        values = {}
        text = Path(path).read_text()
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key not in _CONFIG_TYPES:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                values[key] = _CONFIG_TYPES[key](value)
            except ValueError as err:
                raise ConfigError(f"{path}:{lineno}: bad value for {key!r}: {err}")
        return cls(**values)

    def with_overrides(self, overrides: dict) -> "RunConfig":
        clean = {k: v for k, v in overrides.items() if v is not None}
        return dataclasses.replace(self, **clean)

    def echo(self) -> dict:
        return {k: v for k, v in dataclasses.asdict(self).items() if v is not None}


def parse_config(path) -> RunConfig:
    return RunConfig.from_file(path)


# ---------------------------------------------------------------------------
# joint-distribution files

_JOINT_MAGIC = "# fanosteer joint v1"


def save_joint(j: JointDistribution, path) -> None:
    """Write a joint distribution as a human-inspectable text file.

    Floats are written with shortest round-trip precision, so a save/load
    cycle is lossless.
    """
    lines = [
        _JOINT_MAGIC,
        f"# shape: {j.shape[0]} {j.shape[1]}",
        f"# bin_width_a: {j.bin_width_a!r}",
        f"# bin_width_b: {j.bin_width_b!r}",
        f"# axis_a: {j.axis_a}",
        f"# axis_b: {j.axis_b}",
        f"# mass: {j.mass!r}",
    ]
    if j.total_counts is not None:
        lines.append(f"# total_counts: {j.total_counts}")
    for row in j.matrix:
        lines.append(" ".join(repr(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def load_joint(path) -> JointDistribution:
    """Read a joint-distribution file, normalizing counts data on load.

    The matrix may either be normalized probabilities or raw counts whose
    sum matches the declared total_counts; anything else is rejected as
    corrupt. Negative entries are reported with their row and column.
    """
    header: dict[str, str] = {}
    rows: list[np.ndarray] = []
    path = Path(path)
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line.lstrip("#").strip()
            if ":" in body:
                key, _, value = body.partition(":")
                header[key.strip()] = value.strip()
            continue
        try:
            rows.append(np.array([float(tok) for tok in line.split()], dtype=float))
        except ValueError:
            raise JointFileError(f"{path}:{lineno}: unparseable matrix row")

    if "shape" not in header:
        raise JointFileError(f"{path}: missing shape header")
    try:
        n_a, n_b = (int(tok) for tok in header["shape"].split())
    except ValueError:
        raise JointFileError(f"{path}: malformed shape header {header['shape']!r}")
    if len(rows) != n_a or any(r.size != n_b for r in rows):
        raise JointFileError(
            f"{path}: matrix is {len(rows)}x{set(r.size for r in rows)}, "
            f"header declares {n_a}x{n_b}")
    matrix = np.vstack(rows) if rows else np.zeros((0, 0))

    negative = np.argwhere(matrix < 0)
    if negative.size:
        r, c = negative[0]
        raise JointFileError(f"{path}: negative entry at row {r}, column {c}")

    try:
        bin_a = float(header["bin_width_a"])
        bin_b = float(header["bin_width_b"])
    except KeyError as err:
        raise JointFileError(f"{path}: missing header {err}")
    mass = float(header.get("mass", 1.0))
    axis_a = header.get("axis_a", "A")
    axis_b = header.get("axis_b", "B")
    total_counts = int(header["total_counts"]) if "total_counts" in header else None

    total = matrix.sum()
    if abs(total - 1.0) <= NORMALIZATION_TOL:
        return JointDistribution(matrix, bin_a, bin_b, total_counts=total_counts,
                                 mass=mass, axis_a=axis_a, axis_b=axis_b)
    if total_counts is not None and abs(total - total_counts) <= 0.5:
        return JointDistribution.from_counts(matrix, bin_a, bin_b, mass=mass,
                                             axis_a=axis_a, axis_b=axis_b)
    raise JointFileError(
        f"{path}: matrix sums to {total!r}, neither normalized nor matching "
        f"a declared total_counts")


def save_contour(grid: ContourGrid, path, sigma_multiplier: float = 5.0) -> None:
    """Emit a contour grid as a delimited text table for external plotting.

    One record per grid cell with at least 15 significant digits, so level
    sets (zero threshold and sigma offsets) can be extracted losslessly.
    """
    lines = [
        "# fanosteer contour v1",
        f"# sigma_multiplier: {sigma_multiplier!r}",
    ]
    if grid.sigma is None:
        lines.append("eta_x,eta_k,violation")
        for i, ex in enumerate(grid.eta_x_values):
            for jdx, ek in enumerate(grid.eta_k_values):
                lines.append(f"{ex!r},{ek!r},{grid.violation[i, jdx]!r}")
    else:
        lines.append("eta_x,eta_k,violation,sigma")
        for i, ex in enumerate(grid.eta_x_values):
            for jdx, ek in enumerate(grid.eta_k_values):
                lines.append(f"{ex!r},{ek!r},{grid.violation[i, jdx]!r},"
                             f"{grid.sigma[i, jdx]!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_contour(path) -> ContourGrid:
    """Read a contour table back into a grid (inverse of save_contour)."""
    records = []
    has_sigma = False
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("eta_x"):
            has_sigma = line.split(",")[-1] == "sigma"
            continue
        records.append(tuple(float(tok) for tok in line.split(",")))
    eta_x = sorted({r[0] for r in records})
    eta_k = sorted({r[1] for r in records})
    index = {(r[0], r[1]): r for r in records}
    violation = np.array([[index[(ex, ek)][2] for ek in eta_k] for ex in eta_x])
    sigma = None
    if has_sigma:
        sigma = np.array([[index[(ex, ek)][3] for ek in eta_k] for ex in eta_x])
    return ContourGrid(eta_x_values=np.array(eta_x), eta_k_values=np.array(eta_k),
                       violation=violation, sigma=sigma)


# ---------------------------------------------------------------------------
# pipeline

@dataclass
class RunRecord:
    """Everything a certification run reported, reproducible from the echo."""

    command: str
    config: dict
    verdict: str
    stats: CorrelationStats | None = None
    certificate: BoundReport | None = None
    key_rate: BoundReport | None = None
    discrete: BoundReport | None = None
    agreements: dict = field(default_factory=dict)
    fits: dict = field(default_factory=dict)
    mu_source: str | None = None
    extras: dict = field(default_factory=dict)
    created_utc: str = ""
    version: str = __version__

    def __post_init__(self):
        if not self.created_utc:
            self.created_utc = datetime.now(timezone.utc).isoformat()

    def to_dict(self) -> dict:
        def convert(obj):
            if isinstance(obj, BoundReport):
                return dataclasses.asdict(obj) | {"verdict": obj.verdict}
            if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
                return convert(dataclasses.asdict(obj))
            if isinstance(obj, dict):
                return {k: convert(v) for k, v in obj.items()}
            if isinstance(obj, np.ndarray):
                return obj.tolist()
            if isinstance(obj, (np.floating, np.integer)):
                return obj.item()
            if isinstance(obj, (list, tuple)):
                return [convert(v) for v in obj]
            return obj
        return {f.name: convert(getattr(self, f.name))
                for f in dataclasses.fields(self)}

    def write(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")


def _stage(name: str, condition: bool, message: str):
    if not condition:
        raise ValueError(f"[{name}] {message}")


def _acquire_joints(cfg: RunConfig):
    """Load or simulate the windowed position and momentum joints.

    Returns (jx, jk, n_coinc_x, n_coinc_k) or (None, None, None, None) when
    the run is driven by directly supplied statistics.
    """
    if cfg.has_paths:
        jx = load_joint(cfg.position_path)
        jk = load_joint(cfg.momentum_path)
        n_x, n_k = jx.total_counts, jk.total_counts
        if cfg.n_bar is not None:
            for name, j in (("position", jx), ("momentum", jk)):
                _stage("window", cfg.n_bar <= j.shape[0],
                       f"n_bar {cfg.n_bar} exceeds the {name} grid {j.shape}")
            if cfg.n_bar < jx.shape[0]:
                jx, _ = truncate_to_window(jx, cfg.n_bar)
            if cfg.n_bar < jk.shape[0]:
                jk, _ = truncate_to_window(jk, cfg.n_bar)
        return jx, jk, n_x, n_k

    if cfg.has_model:
        model = cfg.model()
        jx = joint_position_distribution(model)
        jk = joint_momentum_distribution(model)
        window = cfg.n_bar if cfg.n_bar is not None else model.pixels_per_axis
        _stage("window", window <= model.pixels_per_axis,
               f"n_bar {window} exceeds the simulated grid")
        if window < model.pixels_per_axis:
            jx, _ = truncate_to_window(jx, window)
            jk, _ = truncate_to_window(jk, window)
        n_x = n_k = None
        if cfg.counts:
            cm_x = sample_counts(jx, cfg.counts, cfg.seed)
            cm_k = sample_counts(jk, cfg.counts, cfg.seed + 1)
            jx, jk = counts_to_joint(cm_x, jx), counts_to_joint(cm_k, jk)
            n_x, n_k = cm_x.total, cm_k.total
        return jx, jk, n_x, n_k

    return None, None, None, None


def _extract_agreement(j: JointDistribution, policy: str):
    identity = agreement_identity(j)
    reversed_ = agreement_reversed(j)
    best, ordering = agreement_best_ordering(j)
    used = {"best": best, "identity": identity, "reversed": reversed_}[policy]
    used_kind = {"best": ordering.kind, "identity": "identity",
                 "reversed": "reversed-axis"}[policy]
    return used, {"identity": identity, "reversed": reversed_, "best": best,
                  "used": used, "used_ordering": used_kind}


def _fit_domain(j: JointDistribution, n_bar: int, fits: dict, tag: str) -> float:
    """Per-observable domain probability: the smaller of the two arms' fits."""
    mu_a, fit_a = domain_probability_from_fit(marginal_a(j), n_bar)
    mu_b, fit_b = domain_probability_from_fit(marginal_b(j), n_bar)
    fits[f"{tag}_a"] = fit_a
    fits[f"{tag}_b"] = fit_b
    return min(mu_a, mu_b, 1.0)


def _geometry(cfg: RunConfig, n_bar: int,
              jx: JointDistribution | None = None,
              jk: JointDistribution | None = None) -> DetectorGeometry:
    common = dict(n_bar=n_bar, fill_x=cfg.fill_x, fill_k=cfg.fill_k,
                  efficiency=cfg.efficiency, dims=cfg.dims)
    if cfg.rhs_bits is not None:
        return DetectorGeometry.from_rhs_bits(cfg.rhs_bits, **common)
    if cfg.delta_x is not None and cfg.delta_k is not None:
        return DetectorGeometry(delta_x=cfg.delta_x, delta_k=cfg.delta_k, **common)
    if jx is not None and jk is not None:
        return DetectorGeometry(delta_x=jx.bin_width_a, delta_k=jk.bin_width_a,
                                **common)
    raise ValueError("[geometry] need rhs_bits, both bin widths, or joint data")


def run_pipeline(cfg: RunConfig, command: str) -> RunRecord:
    """Shared certify/keyrate pipeline from config to RunRecord."""
    jx, jk, n_x, n_k = _acquire_joints(cfg)

    agreements: dict = {}
    fits: dict = {}
    if jx is not None:
        _stage("window", jx.shape[0] == jx.shape[1] and jk.shape[0] == jk.shape[1],
               "joint matrices must be square")
        _stage("window", jx.shape == jk.shape,
               f"position window {jx.shape} and momentum window {jk.shape} "
               f"differ; a single shared n_bar is required")
        n_bar = jx.shape[0]
        if cfg.threshold > 0:
            jx = threshold_renormalize(jx, cfg.threshold)
            jk = threshold_renormalize(jk, cfg.threshold)
        eta_x, agreements["position"] = _extract_agreement(jx, cfg.ordering)
        eta_k, agreements["momentum"] = _extract_agreement(jk, cfg.ordering)
        if cfg.eta_x is not None:
            eta_x = cfg.eta_x
        if cfg.eta_k is not None:
            eta_k = cfg.eta_k
        if cfg.mu_x is not None and cfg.mu_k is not None:
            mu_x, mu_k, mu_source = cfg.mu_x, cfg.mu_k, "config"
        else:
            mu_x = cfg.mu_x if cfg.mu_x is not None else _fit_domain(jx, n_bar, fits, "position")
            mu_k = cfg.mu_k if cfg.mu_k is not None else _fit_domain(jk, n_bar, fits, "momentum")
            mu_source = "fit"
    else:
        _stage("acquire", cfg.eta_x is not None and cfg.eta_k is not None,
               "without joint data, eta_x and eta_k must be supplied")
        _stage("geometry", cfg.n_bar is not None,
               "without joint data, n_bar must be supplied")
        eta_x, eta_k, n_bar = cfg.eta_x, cfg.eta_k, cfg.n_bar
        mu_x = cfg.mu_x if cfg.mu_x is not None else 1.0
        mu_k = cfg.mu_k if cfg.mu_k is not None else 1.0
        mu_source = "config"

    mu_x_eff = effective_domain(mu_x, cfg.fill_x, cfg.efficiency)
    mu_k_eff = effective_domain(mu_k, cfg.fill_k, cfg.efficiency)

    n_x = cfg.n_coinc_x if cfg.n_coinc_x is not None else n_x
    n_k = cfg.n_coinc_k if cfg.n_coinc_k is not None else n_k
    stats = CorrelationStats(eta_x_bar=eta_x, eta_k_bar=eta_k,
                             mu_x=mu_x_eff, mu_k=mu_k_eff,
                             n_coinc_x=n_x, n_coinc_k=n_k)

    geometry = _geometry(cfg, n_bar, jx, jk)
    certificate = steering_certificate(stats, geometry)
    if n_x is not None and n_k is not None:
        certificate = dataclasses.replace(
            certificate, sigma=lhs_std(stats, geometry.n_bar))
    rate = secret_key_rate(stats, geometry)
    discrete = discrete_steering_check(jx, jk, geometry) if jx is not None else None

    headline = certificate if command == "certify" else rate
    return RunRecord(command=command, config=cfg.echo(), verdict=headline.verdict,
                     stats=stats, certificate=certificate, key_rate=rate,
                     discrete=discrete, agreements=agreements, fits=fits,
                     mu_source=mu_source,
                     extras={"geometry": dataclasses.asdict(geometry)})


def cmd_certify(cfg: RunConfig) -> RunRecord:
    """Full pipeline from data or supplied statistics to a steering verdict."""
    return run_pipeline(cfg, "certify")


def cmd_keyrate(cfg: RunConfig) -> RunRecord:
    return run_pipeline(cfg, "keyrate")


def cmd_simulate(cfg: RunConfig) -> tuple[Path, Path]:
    """Generate (optionally sampled) windowed joints and write them to disk."""
    _stage("acquire", not cfg.has_paths, "simulate needs a model, not input paths")
    if not cfg.has_model:
        cfg = dataclasses.replace(cfg, sigma_plus=BiphotonModel().sigma_plus)
    jx, jk, _, _ = _acquire_joints(cfg)
    out = Path(cfg.output_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    path_x, path_k = out / "position.joint", out / "momentum.joint"
    save_joint(jx, path_x)
    save_joint(jk, path_k)
    return path_x, path_k


def cmd_hedge(cfg: RunConfig) -> float:
    """Minimum domain probability that still certifies, from config or data."""
    if cfg.eta_x is not None and cfg.eta_k is not None:
        eta_x, eta_k = cfg.eta_x, cfg.eta_k
        _stage("geometry", cfg.n_bar is not None, "hedge needs n_bar")
        n_bar = cfg.n_bar
        geometry = _geometry(cfg, n_bar)
    else:
        record = run_pipeline(cfg, "certify")
        eta_x = record.stats.eta_x_bar
        eta_k = record.stats.eta_k_bar
        n_bar = record.extras["geometry"]["n_bar"]
        geometry = DetectorGeometry(**record.extras["geometry"])
    rhs = steering_rhs(geometry)
    return hedge_min_domain(eta_x, eta_k, n_bar, rhs, mode=cfg.hedge_mode,
                            fixed_mu=cfg.hedge_fixed_mu)


def cmd_contour(cfg: RunConfig) -> Path:
    """Evaluate the violation grid and write it as a contour table."""
    _stage("geometry", cfg.n_bar is not None, "contour needs n_bar")
    geometry = _geometry(cfg, cfg.n_bar)
    mu_x = cfg.mu_x if cfg.mu_x is not None else 1.0
    mu_k = cfg.mu_k if cfg.mu_k is not None else 1.0
    counts = None
    if cfg.n_coinc_x is not None and cfg.n_coinc_k is not None:
        counts = (cfg.n_coinc_x, cfg.n_coinc_k)
    grid = contour_grid(geometry, mu_x, mu_k, cfg.resolution, counts=counts)
    out = Path(cfg.output_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    path = out / "contour.csv"
    save_contour(grid, path, sigma_multiplier=cfg.sigma_multiplier)
    return path


# ---------------------------------------------------------------------------
# command-line interface

class _Parser(argparse.ArgumentParser):
    # usage problems must not collide with the 'inapplicable' exit code 2
    def error(self, message):
        raise ConfigError(message)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fanosteer",
                     description="Certify EPR steering with Fano steering bounds.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("simulate", "generate synthetic joint distributions"),
        ("certify", "evaluate the steering certificate"),
        ("hedge", "find the minimum certifying domain probability"),
        ("contour", "export the violation grid for plotting"),
        ("keyrate", "evaluate the secret-key-rate lower bound"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", type=str, default=None)
        p.add_argument("--eta-x", type=float, dest="eta_x")
        p.add_argument("--eta-k", type=float, dest="eta_k")
        p.add_argument("--mu-x", type=float, dest="mu_x")
        p.add_argument("--mu-k", type=float, dest="mu_k")
        p.add_argument("--n-bar", type=int, dest="n_bar")
        p.add_argument("--rhs-bits", type=float, dest="rhs_bits")
        p.add_argument("--fill-x", type=float, dest="fill_x")
        p.add_argument("--fill-k", type=float, dest="fill_k")
        p.add_argument("--efficiency", type=float)
        p.add_argument("--seed", type=int)
        p.add_argument("--threshold", type=float)
        p.add_argument("--counts", type=int)
        p.add_argument("--resolution", type=int)
        p.add_argument("--hedge-mode", type=str, dest="hedge_mode")
        p.add_argument("--output-dir", type=str, dest="output_dir")
    return parser


_OVERRIDE_KEYS = ("eta_x", "eta_k", "mu_x", "mu_k", "n_bar", "rhs_bits",
                  "fill_x", "fill_k", "efficiency", "seed", "threshold",
                  "counts", "resolution", "hedge_mode", "output_dir")


def main(argv=None) -> int:
    """Run the CLI; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
        cfg = cfg.with_overrides({k: getattr(args, k) for k in _OVERRIDE_KEYS})

        if args.command == "simulate":
            path_x, path_k = cmd_simulate(cfg)
            print(f"wrote {path_x} and {path_k}")
            return EXIT_CERTIFIED
        if args.command == "hedge":
            mu_min = cmd_hedge(cfg)
            print(f"minimum certifying domain probability ({cfg.hedge_mode}): "
                  f"{mu_min:.4f}")
            return EXIT_CERTIFIED
        if args.command == "contour":
            path = cmd_contour(cfg)
            print(f"wrote {path}")
            return EXIT_CERTIFIED

        record = cmd_certify(cfg) if args.command == "certify" else cmd_keyrate(cfg)
        if cfg.output_dir is not None:
            out = Path(cfg.output_dir)
            out.mkdir(parents=True, exist_ok=True)
            record.write(out / "run_record.json")
        headline = record.certificate if args.command == "certify" else record.key_rate
        sigma_note = ""
        if headline.sigma is not None:
            sigma_note = f" (sigma {headline.sigma:.4f})"
        print(f"{args.command}: {record.verdict}; lhs {headline.lhs:.4f} bits, "
              f"rhs {headline.rhs:.4f} bits, margin {headline.violation:.4f} "
              f"bits{sigma_note}")
        return _VERDICT_EXIT[record.verdict]
    except (ConfigError, ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_ERROR


def cli() -> None:
    sys.exit(main())
