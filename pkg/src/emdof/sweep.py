"""Parameter sweeps over paired square planes, including the figure presets."""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from .channel import LAYOUT, PolarizationMode, assemble_channel, correlation
from .config import ExperimentConfig, parse_mapping, resolve_mode
from .geometry import make_paired_planes
from .green import field_boundaries
from .spectra import (
    capacity_edof,
    capacity_exact,
    db_to_linear,
    dof,
    edof_from_channel,
    hermitian_eigenvalues,
    normalize_spectrum,
    paraxial_dof,
    summarize,
)

CONVENTIONS = {
    "length_unit": "free-space wavelength",
    "k0": "2*pi",
    "time_convention": "exp(-j k0 R)",
    "block_layout": LAYOUT,
    "element_order": "row-major, x fastest",
    "correlation_side": "smaller of H^dagger H / H H^dagger (ties: H^dagger H)",
    "source_polarization_subsets": "columns of the exact dyadic kernel for the retained source axes",
    "scalar_mode": "single co-polarized source/receiver pair using the scalar kernel",
    "capacity_streams": "n = DOF at the threshold unless n_override is set; sum over the n largest eigenvalues",
    "capacity_normalization": "trace: eigenvalues rescaled to sum to n before the capacity sum",
}


@dataclass
class SweepResult:
    columns: list[str]
    rows: list[tuple]
    metadata: dict = field(default_factory=dict)

    def column(self, name):
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def records(self):
        return [dict(zip(self.columns, r)) for r in self.rows]

    def where(self, **match):
        """Rows whose named columns equal the given values."""
        idx = {k: self.columns.index(k) for k in match}
        rows = [r for r in self.rows if all(r[i] == match[k] for k, i in idx.items())]
        return SweepResult(self.columns, rows, self.metadata)


def mode_label(spec) -> str:
    if isinstance(spec, str):
        return spec
    m = resolve_mode(spec)
    return f"{m.kind.value}:{''.join(m.source_mask)}->{''.join(m.receiver_mask)}"


def _channel(L, N, D, mode: PolarizationMode, grid):
    src, rx = make_paired_planes(L, N, D, grid)
    return assemble_channel(src, rx, mode)


def _edof_point(L, N, D, mode, grid):
    return edof_from_channel(_channel(L, N, D, mode, grid))


def _spectrum_point(L, N, D, mode, grid):
    return hermitian_eigenvalues(correlation(_channel(L, N, D, mode, grid)))


def _pmap(fn, tasks, workers):
    if workers <= 1 or len(tasks) <= 1:
        return [fn(*t) for t in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda t: fn(*t), tasks))


def _metadata(cfg: ExperimentConfig, extra=None):
    md = {
        "preset": cfg.preset,
        "config": cfg.to_dict(),
        "conventions": dict(CONVENTIONS, grid=cfg.grid),
        "threshold": cfg.threshold,
        "code_version": __version__,
    }
    if extra:
        md.update(extra)
    return md


def _fmt_mode_rows(cfg):
    return [(mode_label(s), resolve_mode(s)) for s in cfg.modes]


def run_fig2(cfg: ExperimentConfig) -> SweepResult:
    """Exact equal-power capacity against the EDOF approximation over SNR."""
    (L,), (N,), (D,) = cfg.L, cfg.N, cfg.D
    (label, mode), = _fmt_mode_rows(cfg)[:1] or [("scalar", PolarizationMode.scalar())]
    spec = _spectrum_point(L, N, D, mode, cfg.grid)
    base = summarize(spec, None, cfg.bandwidth, cfg.threshold, cfg.n_override, cfg.normalization)
    n = base.n_streams
    s = normalize_spectrum(spec, n) if cfg.normalization == "trace" else spec
    rows = []
    for db in cfg.snr_db:
        rho = float(db_to_linear(db))
        rows.append((db, capacity_exact(s, rho, cfg.bandwidth, n),
                     capacity_edof(base.edof, rho, cfg.bandwidth)))
    md = _metadata(cfg, {
        "mode": label, "edof": base.edof, "dof": base.dof, "n_streams": n,
        "geometry": {"L": L, "N": N, "D": D},
    })
    return SweepResult(["rho_db", "capacity_exact", "capacity_edof"], rows, md)


def run_fig3(cfg: ExperimentConfig) -> SweepResult:
    """EDOF against element count per distance and kernel."""
    modes = _fmt_mode_rows(cfg)
    tasks, keys = [], []
    for (label, mode), L, D, N in itertools.product(modes, cfg.L, cfg.D, cfg.N):
        tasks.append((L, N, D, mode, cfg.grid))
        keys.append((label, L, D, N))
    if cfg.spectrum == "edof":
        vals = _pmap(_edof_point, tasks, cfg.workers)
        rows = [(lab, L, N, D, e) for (lab, L, D, N), e in zip(keys, vals)]
        cols = ["mode", "L", "N", "D", "edof"]
    else:
        specs = _pmap(_spectrum_point, tasks, cfg.workers)
        rows = []
        for (lab, L, D, N), s in zip(keys, specs):
            sm = summarize(s, None, cfg.bandwidth, cfg.threshold)
            rows.append((lab, L, N, D, sm.edof, sm.dof))
        cols = ["mode", "L", "N", "D", "edof", "dof"]
    return SweepResult(cols, rows, _metadata(cfg, {
        "coverage": "N and D values form a covering set chosen for the sweep",
    }))


def saturation_elements(L, D, mode, grid, counts, tolerance, workers=1) -> int:
    """Smallest N^2 whose EDOF reaches ``(1 - tolerance)`` of the largest EDOF over ``counts``."""
    vals = _pmap(_edof_point, [(L, N, D, mode, grid) for N in counts], workers)
    top = max(vals)
    for N, v in zip(counts, vals):
        if v >= (1.0 - tolerance) * top:
            return N * N
    return counts[-1] ** 2  # pragma: no cover


def run_fig4(cfg: ExperimentConfig) -> SweepResult:
    """Model-based mode count against the paraxial solid-angle estimate over distance."""
    (label, mode), = _fmt_mode_rows(cfg)[:1]
    tasks, keys = [], []
    for L, N, D in itertools.product(cfg.L, cfg.N, cfg.D):
        tasks.append((L, N, D, mode, cfg.grid))
        keys.append((L, N, D))
    specs = _pmap(_spectrum_point, tasks, cfg.workers)
    cols = ["mode", "L", "N", "D", "elements", "edof", "dof", "paraxial_dof"]
    if cfg.saturation_N:
        cols.append("saturation_elements")
    rows = []
    for (L, N, D), s in zip(keys, specs):
        sm = summarize(s, None, cfg.bandwidth, cfg.threshold)
        row = [label, L, N, D, N * N, sm.edof, sm.dof, paraxial_dof(L * L, L * L, D)]
        if cfg.saturation_N:
            row.append(saturation_elements(L, D, mode, cfg.grid, cfg.saturation_N,
                                           cfg.saturation_tolerance, cfg.workers))
        rows.append(tuple(row))
    return SweepResult(cols, rows, _metadata(cfg, {
        "side_length_note": "default L = 10; L = 5 is an alternative reading of this comparison (set geometry.L=5)",
        "saturation_tolerance": cfg.saturation_tolerance if cfg.saturation_N else None,
    }))


def run_fig5(cfg: ExperimentConfig) -> SweepResult:
    """EDOF for different source polarization subsets over distance."""
    modes = _fmt_mode_rows(cfg)
    tasks, keys = [], []
    for L, N, D in itertools.product(cfg.L, cfg.N, cfg.D):
        for label, mode in modes:
            tasks.append((L, N, D, mode, cfg.grid))
            keys.append((label, L, N, D))
    specs = _pmap(_spectrum_point, tasks, cfg.workers)
    rows = []
    for (label, L, N, D), s in zip(keys, specs):
        sm = summarize(s, None, cfg.bandwidth, cfg.threshold)
        rows.append((label, L, N, D, sm.edof, sm.dof))
    bounds = {str(L): dict(zip(("near", "far"), field_boundaries(L))) for L in cfg.L}
    return SweepResult(["mode", "L", "N", "D", "edof", "dof"], rows, _metadata(cfg, {
        "field_boundaries": bounds,
        "mode_realization": "exact dyadic entries with source-axis column selection; receivers keep x, y, z",
    }))


def run_custom(cfg: ExperimentConfig) -> SweepResult:
    """Cartesian product over modes, L, N, D (D varies fastest), optionally SNR."""
    modes = _fmt_mode_rows(cfg)
    tasks, keys = [], []
    for (label, mode), L, N, D in itertools.product(modes, cfg.L, cfg.N, cfg.D):
        tasks.append((L, N, D, mode, cfg.grid))
        keys.append((label, L, N, D))
    cols = ["mode", "L", "N", "D"]
    if cfg.snr_db:
        cols.append("rho_db")
    if cfg.spectrum == "edof":
        vals = _pmap(_edof_point, tasks, cfg.workers)
        rows = [(lab, L, N, D, e, paraxial_dof(L * L, L * L, D)) for (lab, L, N, D), e in zip(keys, vals)]
        return SweepResult(["mode", "L", "N", "D", "edof", "paraxial_dof"], rows, _metadata(cfg))
    cols += ["edof", "dof", "paraxial_dof"]
    if cfg.snr_db:
        cols += ["capacity_exact", "capacity_edof"]
    specs = _pmap(_spectrum_point, tasks, cfg.workers)
    rows = []
    for (lab, L, N, D), s in zip(keys, specs):
        par = paraxial_dof(L * L, L * L, D)
        if not cfg.snr_db:
            sm = summarize(s, None, cfg.bandwidth, cfg.threshold, cfg.n_override, cfg.normalization)
            rows.append((lab, L, N, D, sm.edof, sm.dof, par))
            continue
        for db in cfg.snr_db:
            sm = summarize(s, float(db_to_linear(db)), cfg.bandwidth, cfg.threshold,
                           cfg.n_override, cfg.normalization)
            rows.append((lab, L, N, D, db, sm.edof, sm.dof, par, sm.capacity_exact, sm.capacity_edof))
    return SweepResult(cols, rows, _metadata(cfg))


RUNNERS = {
    "fig2": run_fig2,
    "fig3a": run_fig3,
    "fig3b": run_fig3,
    "fig4": run_fig4,
    "fig5": run_fig5,
    "custom": run_custom,
}


def run(cfg: ExperimentConfig, merge_info: Optional[dict] = None) -> SweepResult:
    result = RUNNERS[cfg.preset](cfg)
    if merge_info is not None:
        result.metadata["merge"] = merge_info
    return result


def run_preset(tag: str, **overrides) -> SweepResult:
    """Run a figure preset, optionally overriding any config field."""
    cfg, info = parse_mapping(dict(overrides, preset=tag))
    return run(cfg, info)
