"""Experiment configurations, figure presets and the end-to-end pipeline.

A single experiment solves one model for its NESS (or a few decay modes),
diagonalizes the requested magnetization blocks, unfolds each block
separately, pools the spacings and classifies the level statistics.
Presets carry the published parameter sets together with a desk-scale
variant (n capped at 11, sectors pooled around half filling) that runs on
an ordinary machine.
"""

import csv
import json
import time

import numpy as np

from dataclasses import dataclass, asdict
from pathlib import Path

from . import rmtstats
from .eigen import block_spectrum, find_decay_modes, find_ness
from .exceptions import ConfigError, NesstatError
from .lindblad import BathSpec, ChainModel, SectorBasis, build_superoperator_sector
from .spinops import ChainSpec, staggered_field


@dataclass
class ExperimentConfig:
    name: str
    n: int
    delta: float = 0.0
    field_pattern: str = "none"  # "none", "staggered", or explicit list
    field: list = None
    gamma_drive: float = 1.0
    mu: float = 0.0
    mu_bar: float = 0.0
    gamma_deph: float = 0.0
    sectors: list = None
    target: str = "ness"  # "ness" or "hdm"
    k_modes: int = 2
    degree: int = 6
    trim_fraction: float = 0.02
    use_log: bool = None  # None: log for NESS blocks, raw for HDM blocks
    zero_cutoff: float = 1e-12
    seed: int = 0
    tol: float = 1e-8
    max_iter: int = 20000
    s_max: float = 4.0
    bin_width: float = 0.2
    margin: float = 0.02

    def __post_init__(self):
        if self.sectors is None:
            self.sectors = default_sectors(self.n)
        if self.target not in ("ness", "hdm"):
            raise ConfigError(f"target must be 'ness' or 'hdm', got {self.target!r}")
        if any(not 0 <= z <= self.n for z in self.sectors):
            raise ConfigError(f"sectors must lie in 0..{self.n}: {self.sectors}")
        if self.tol <= 0 or self.zero_cutoff < 0:
            raise ConfigError("tolerances must be positive")

    def resolve_field(self):
        if self.field is not None:
            return tuple(float(b) for b in self.field)
        if self.field_pattern == "staggered":
            return staggered_field(self.n)
        if self.field_pattern == "none":
            return (0.0,) * self.n
        raise ConfigError(f"unknown field pattern {self.field_pattern!r}")

    def to_model(self):
        try:
            chain = ChainSpec(n=self.n, delta=self.delta, field=self.resolve_field())
            bath = BathSpec(gamma_drive=self.gamma_drive, mu=self.mu,
                            mu_bar=self.mu_bar, gamma_deph=self.gamma_deph)
        except ValueError as err:
            raise ConfigError(str(err)) from err
        return ChainModel(chain=chain, bath=bath)

    @classmethod
    def from_dict(cls, data):
        known = {f for f in cls.__dataclass_fields__}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        if "name" not in data or "n" not in data:
            raise ConfigError("config requires at least 'name' and 'n'")
        try:
            return cls(**data)
        except TypeError as err:
            raise ConfigError(str(err)) from err


def default_sectors(n):
    """Sectors within one up-spin of half filling, largest blocks first-hand."""
    half = n // 2
    sectors = sorted({max(0, half - 1), half, min(n, half + 1), min(n, n - half + 1)})
    return [z for z in sectors if 0 <= z <= n]


# Published parameter sets (scale "paper") and their desk-scale variants.
_PRESETS = {
    "fig1a": dict(
        comment="XX chain NESS, Poissonian",
        paper=dict(n=16, sectors=[10]),
        desk=dict(n=10, sectors=[4, 5, 6], degree=4, trim_fraction=0.0,
                  use_log=False),
        params=dict(delta=0.0, gamma_drive=1.0, mu=0.2, mu_bar=0.3),
        target="ness",
    ),
    "fig1b": dict(
        comment="XX chain with dephasing, NESS, Poissonian",
        paper=dict(n=14, sectors=[7]),
        desk=dict(n=10, sectors=[4, 5, 6]),
        params=dict(delta=0.0, gamma_drive=1.0, mu=0.2, mu_bar=0.3, gamma_deph=1.0),
        target="ness",
    ),
    "fig1c": dict(
        comment="XXX chain at maximal driving, NESS, Poissonian "
                "(desk scale reports discard counts only)",
        paper=dict(n=20, sectors=[5]),
        desk=dict(n=9, sectors=[3, 4, 5]),
        params=dict(delta=1.0, gamma_drive=0.1, mu=1.0, mu_bar=0.0),
        target="ness",
    ),
    "fig2a": dict(
        comment="XXZ chain Delta=0.5, NESS, GUE",
        paper=dict(n=14, sectors=[7]),
        desk=dict(n=11, sectors=[5, 6], degree=4),
        params=dict(delta=0.5, gamma_drive=1.0, mu=0.2, mu_bar=0.3),
        target="ness",
    ),
    "fig2b": dict(
        comment="XXZ chain Delta=0.5 in a staggered field, NESS, GUE",
        paper=dict(n=14, sectors=[7]),
        desk=dict(n=11, sectors=[5, 6]),
        params=dict(delta=0.5, gamma_drive=1.0, mu=0.1, mu_bar=0.0,
                    field_pattern="staggered"),
        target="ness",
    ),
    "fig3": dict(
        comment="XXZ NESS anisotropy sweep: increasingly Poisson-like with Delta",
        paper=dict(n=13, sectors=[7]),
        desk=dict(n=9, sectors=[3, 4, 5, 6]),
        params=dict(gamma_drive=1.0, mu=0.2, mu_bar=0.3),
        target="ness",
        sweep_deltas=[0.5, 1.0, 1.5, 2.0, 3.0],
    ),
    "fig4": dict(
        comment="XX chain with dephasing, two leading decay modes, Poissonian",
        paper=dict(n=13, sectors=[7]),
        desk=dict(n=10, sectors=[4, 5, 6]),
        params=dict(delta=0.0, gamma_drive=1.0, mu=0.2, mu_bar=0.3, gamma_deph=1.0),
        target="hdm",
        k_modes=2,
    ),
    "fig5": dict(
        comment="XXZ in a staggered field, two leading decay modes, GUE",
        paper=dict(n=13, sectors=[7]),
        desk=dict(n=10, sectors=[4, 5, 6], delta=1.0),
        params=dict(delta=0.5, gamma_drive=1.0, mu=0.1, mu_bar=0.0,
                    field_pattern="staggered"),
        target="hdm",
        k_modes=2,
    ),
}


def list_presets():
    """Catalog of figure presets: published parameters and desk-scale sizes."""
    return {name: dict(entry) for name, entry in _PRESETS.items()}


def preset_configs(name, scale="desk", **overrides):
    """Experiment configs for a preset; sweeps expand to one config per point."""
    if name not in _PRESETS:
        raise ConfigError(f"unknown preset {name!r}; valid presets: {sorted(_PRESETS)}")
    if scale not in ("paper", "desk"):
        raise ConfigError(f"scale must be 'paper' or 'desk', got {scale!r}")
    entry = _PRESETS[name]
    base = dict(entry["params"])
    base.update(entry[scale])
    base["target"] = entry["target"]
    if "k_modes" in entry:
        base["k_modes"] = entry["k_modes"]
    base.update(overrides)
    if "sweep_deltas" in entry:
        configs = []
        for d in entry["sweep_deltas"]:
            cfg = dict(base)
            cfg["delta"] = d
            configs.append(ExperimentConfig(name=f"{name}_delta{d:g}", **cfg))
        return configs
    return [ExperimentConfig(name=name, **base)]


@dataclass
class OperatorResult:
    operator_id: str
    kind: str
    eigenvalue: complex
    residual: float
    sectors: list
    sector_samples: list
    sample: rmtstats.SpacingSample
    ks: dict
    classification: str
    number_variance: dict


@dataclass
class ResultBundle:
    config: ExperimentConfig
    operators: list
    wall_time: float
    failed: str = None

    def pooled_sample(self):
        return rmtstats.pool_samples([op.sample for op in self.operators])


def _analyze_operator(op, op_id, config):
    use_log = config.use_log
    if use_log is None:
        use_log = op.kind == "ness"
    sectors = []
    samples = []
    nv_values = {1: [], 2: [], 3: []}
    for n_up in config.sectors:
        spec = block_spectrum(op, n_up, zero_cutoff=config.zero_cutoff)
        sector_log = use_log and bool(np.all(spec.values > 0))
        unfolded = rmtstats.unfold(spec, degree=config.degree,
                                   trim_fraction=config.trim_fraction, use_log=sector_log)
        samples.append(rmtstats.spacing_sample(
            unfolded, provenance=[(op_id, int(n_up), len(spec), spec.discarded_count)]))
        sectors.append(dict(
            n_up=int(n_up), levels=len(spec), discarded=spec.discarded_count,
            unfolding=unfolded.method, trimmed=unfolded.trimmed,
        ))
        span = unfolded.levels[-1] - unfolded.levels[0]
        for ell in nv_values:
            if ell <= span / 3.0:
                nv_values[ell].append(
                    rmtstats.number_variance(unfolded, ell, seed=config.seed))
    pooled = rmtstats.pool_samples(samples)
    ks = {e: rmtstats.ks_statistic(pooled, e) for e in rmtstats.ENSEMBLES}
    try:
        label = rmtstats.classify(pooled, margin=config.margin)
    except NesstatError:
        label = "undersized"
    nv = {str(ell): (float(np.mean(v)) if v else None) for ell, v in nv_values.items()}
    return OperatorResult(
        operator_id=op_id, kind=op.kind, eigenvalue=complex(op.eigenvalue),
        residual=op.residual, sectors=sectors, sector_samples=samples,
        sample=pooled, ks=ks, classification=label, number_variance=nv,
    )


def run_experiment(config, out_dir=None, sector_matrix=None, basis=None):
    """Solve, unfold, pool and classify one experiment; optionally write files.

    Solver failures still produce a summary.json (with a `failed` marker)
    before the error propagates.
    """
    model = config.to_model()
    start = time.perf_counter()
    if basis is None:
        basis = SectorBasis(config.n)
    if sector_matrix is None:
        sector_matrix = build_superoperator_sector(model, basis)
    try:
        if config.target == "ness":
            ops = [find_ness(model, tol=config.tol, max_iter=config.max_iter,
                             basis=basis, sector_matrix=sector_matrix)]
            ids = [config.name]
        else:
            ops = find_decay_modes(model, config.k_modes, tol=config.tol,
                                   max_iter=config.max_iter, basis=basis,
                                   sector_matrix=sector_matrix)
            ids = [f"{config.name}_mode{i + 1}" for i in range(len(ops))]
    except NesstatError as err:
        if out_dir is not None:
            _write_summary(ResultBundle(config, [], time.perf_counter() - start,
                                        failed=str(err)), Path(out_dir))
        raise
    results = [_analyze_operator(op, op_id, config) for op, op_id in zip(ops, ids)]
    bundle = ResultBundle(config=config, operators=results,
                          wall_time=time.perf_counter() - start)
    if out_dir is not None:
        write_bundle(bundle, Path(out_dir))
    return bundle


def _write_summary(bundle, out_dir):
    out_dir.mkdir(parents=True, exist_ok=True)
    summary = dict(
        config=asdict(bundle.config),
        wall_time_seconds=bundle.wall_time,
        failed=bundle.failed,
        operators=[
            dict(
                operator_id=op.operator_id,
                kind=op.kind,
                eigenvalue=[op.eigenvalue.real, op.eigenvalue.imag],
                residual=op.residual,
                sectors=op.sectors,
                spacing_count=len(op.sample.spacings),
                ks=op.ks,
                classification=op.classification,
                number_variance=op.number_variance,
                zero_cutoff=bundle.config.zero_cutoff,
            )
            for op in bundle.operators
        ],
    )
    with open(out_dir / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)


def write_bundle(bundle, out_dir):
    """Write summary.json, spacings.csv and the figure data files."""
    out_dir = Path(out_dir)
    _write_summary(bundle, out_dir)
    with open(out_dir / "spacings.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["model_id", "n_up", "index", "spacing"])
        for op in bundle.operators:
            for sample in op.sector_samples:
                (model_id, n_up, _, _), = sample.provenance
                for i, s in enumerate(sample.spacings):
                    writer.writerow([model_id, n_up, i, f"{s:.12g}"])
    emit_figure_data(bundle, bundle.config.s_max, bundle.config.bin_width, out_dir)


def emit_figure_data(bundle, s_max, bin_width, out_dir):
    """Histogram of the pooled spacings plus dense surmise curves for overlay."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if bundle.operators:
        pooled = bundle.pooled_sample()
        hist = rmtstats.spacing_histogram(pooled, bin_width, s_max)
        with open(out_dir / "histogram.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["bin_center", "density"])
            for center, density in hist:
                writer.writerow([f"{center:.6g}", f"{density:.12g}"])
    grid = np.linspace(0.0, s_max, 401)
    with open(out_dir / "surmise_curves.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["s", "poisson", "goe", "gue"])
        for s in grid:
            writer.writerow([f"{s:.6g}"] + [
                f"{rmtstats.surmise_pdf(e, float(s)):.12g}"
                for e in ("poisson", "goe", "gue")
            ])
