"""Desk-scale reproductions of the controlled perturbation studies.

Each runner perturbs the standard disk lattice, scores every step with the
metrics module (no experiment-local math), and returns a CurveTable. Tables
serialize to CSV (the canonical artifact, 12 significant digits) or to a
minimal self-contained SVG line chart.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from xml.sax.saxutils import escape

from .metrics import (
    SoftPQConfig,
    detection_scores,
    panoptic_quality,
    softpq,
)
from .overlap import pixel_binary_scores
from .perturb import DiskGridSpec, make_disk_grid, morph_instances, split_instances

__all__ = [
    "CurveTable",
    "erosion_curve",
    "threshold_sweep",
    "overseg_curve",
    "penalty_ablation",
    "emit",
]

DEFAULT_L_GRID = (0.05, 0.15, 0.25, 0.35, 0.45, 0.5)


@dataclass(frozen=True)
class CurveTable:
    """Aligned score series over a shared x axis, plus a config echo."""

    x_label: str
    x_values: tuple[float, ...]
    series: dict[str, tuple[float, ...]]
    metadata: dict[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for name, values in self.series.items():
            if len(values) != len(self.x_values):
                raise ValueError(
                    f"series {name!r} has {len(values)} points for {len(self.x_values)} x values"
                )
            if not all(math.isfinite(v) for v in values):
                raise ValueError(f"series {name!r} contains non-finite scores")


def _config_name(config: SoftPQConfig) -> str:
    name = f"softpq_l{config.lower:g}_h{config.upper:g}"
    if config.penalty != "sqrt":
        name += f"_{config.penalty}"
    if config.mode != "over":
        name += f"_{config.mode}"
    return name


def _with_deltas(series: dict[str, list[float]]) -> dict[str, tuple[float, ...]]:
    """Append a signed successive-difference companion for every series."""
    out: dict[str, tuple[float, ...]] = {k: tuple(v) for k, v in series.items()}
    for name, values in series.items():
        deltas = [0.0] + [values[i] - values[i - 1] for i in range(1, len(values))]
        out[f"delta_{name}"] = tuple(deltas)
    return out


def erosion_curve(
    steps: int = 25,
    configs: tuple[SoftPQConfig, ...] = (SoftPQConfig(),),
    baselines: bool = True,
    disk_spec: DiskGridSpec = DiskGridSpec(),
) -> CurveTable:
    """Scores while the prediction erodes away from a perfect copy of GT.

    x runs 0..steps; every series gets a delta_* companion so per-step jumps
    can be compared across metrics.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    gt = make_disk_grid(disk_spec)
    series: dict[str, list[float]] = {_config_name(c): [] for c in configs}
    if baselines:
        for name in ("pq", "f1_at_half", "map", "pixel_iou", "dice"):
            series[name] = []
    pred = gt
    for step in range(steps + 1):
        if step:
            pred = morph_instances(pred, "erode", 1)
        for config in configs:
            series[_config_name(config)].append(softpq(gt, pred, config))
        if baselines:
            pq, _, _ = panoptic_quality(gt, pred)
            f1, ap = detection_scores(gt, pred)
            piou, dice = pixel_binary_scores(gt, pred)
            series["pq"].append(pq)
            series["f1_at_half"].append(f1)
            series["map"].append(ap)
            series["pixel_iou"].append(piou)
            series["dice"].append(dice)
    return CurveTable(
        x_label="erosion_step",
        x_values=tuple(float(i) for i in range(steps + 1)),
        series=_with_deltas(series),
        metadata={
            "steps": steps,
            "disk": asdict(disk_spec),
            "configs": [asdict(c) for c in configs],
        },
    )


def threshold_sweep(
    l_grid: tuple[float, ...] = DEFAULT_L_GRID,
    h: float = 0.5,
    perturbation: str = "erode",
    steps: int = 25,
    disk_spec: DiskGridSpec = DiskGridSpec(),
) -> CurveTable:
    """One soft-PQ series per lower threshold, plus the PQ reference.

    The l = h series coincides with PQ (empty soft interval); more lenient
    thresholds keep credit flowing after PQ collapses.
    """
    if perturbation not in ("erode", "dilate"):
        raise ValueError("perturbation must be 'erode' or 'dilate'")
    if any(l > h for l in l_grid):
        raise ValueError("every lower threshold must be <= h")
    gt = make_disk_grid(disk_spec)
    configs = {f"softpq_l{l:g}": SoftPQConfig(lower=l, upper=h) for l in l_grid}
    series: dict[str, list[float]] = {name: [] for name in configs}
    series["pq"] = []
    pred = gt
    for step in range(steps + 1):
        if step:
            pred = morph_instances(pred, perturbation, 1)
        for name, config in configs.items():
            series[name].append(softpq(gt, pred, config))
        series["pq"].append(panoptic_quality(gt, pred)[0])
    return CurveTable(
        x_label=f"{perturbation}_step",
        x_values=tuple(float(i) for i in range(steps + 1)),
        series={k: tuple(v) for k, v in series.items()},
        metadata={"h": h, "l_grid": list(l_grid), "steps": steps, "disk": asdict(disk_spec)},
    )


def overseg_curve(
    fractions: tuple[float, ...] = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0),
    fragments_list: tuple[int, ...] = (2, 3, 4, 5),
    config: SoftPQConfig = SoftPQConfig(),
    l_envelope: tuple[float, ...] = DEFAULT_L_GRID,
    gap: int = 1,
    seed: int = 0,
    disk_spec: DiskGridSpec = DiskGridSpec(),
) -> CurveTable:
    """Scores as a growing share of instances is split into fragments.

    Per fragment count f: soft PQ, PQ and mAP series over the split fractions,
    plus envelope_min/max across the l values in l_envelope (the band showing
    how threshold choice moves the soft score).
    """
    gt = make_disk_grid(disk_spec)
    series: dict[str, list[float]] = {}
    for f in fragments_list:
        cols = {
            f"softpq_f{f}": [],
            f"pq_f{f}": [],
            f"map_f{f}": [],
            f"softpq_env_min_f{f}": [],
            f"softpq_env_max_f{f}": [],
        }
        for fraction in fractions:
            pred, _ = split_instances(gt, f, fraction, gap=gap, seed=seed)
            cols[f"softpq_f{f}"].append(softpq(gt, pred, config))
            cols[f"pq_f{f}"].append(panoptic_quality(gt, pred)[0])
            cols[f"map_f{f}"].append(detection_scores(gt, pred)[1])
            env = [
                softpq(gt, pred, SoftPQConfig(lower=l, upper=config.upper,
                                              penalty=config.penalty, mode=config.mode))
                for l in l_envelope
            ]
            cols[f"softpq_env_min_f{f}"].append(min(env))
            cols[f"softpq_env_max_f{f}"].append(max(env))
        series.update(cols)
    return CurveTable(
        x_label="split_fraction",
        x_values=tuple(float(x) for x in fractions),
        series={k: tuple(v) for k, v in series.items()},
        metadata={
            "fragments_list": list(fragments_list),
            "config": asdict(config),
            "l_envelope": list(l_envelope),
            "gap": gap,
            "seed": seed,
            "disk": asdict(disk_spec),
        },
    )


def penalty_ablation(
    fragments_list: tuple[int, ...] = (1, 2, 3, 4, 5),
    l: float = 0.05,
    h: float = 0.5,
    gap: int = 1,
    seed: int = 0,
    disk_spec: DiskGridSpec = DiskGridSpec(),
) -> CurveTable:
    """Soft PQ under each penalty kind as every instance splits into n parts.

    Also tabulates the inverse weights 1/f(n) -- sqrt(n+1), n+1, ln(n+1) --
    so the analytic behaviour sits next to the measured scores.
    """
    if any(f < 1 or f > 5 for f in fragments_list):
        raise ValueError("fragments_list entries must be in 1..5")
    gt = make_disk_grid(disk_spec)
    series: dict[str, list[float]] = {
        "softpq_sqrt": [], "softpq_linear": [], "softpq_log": [],
        "inv_weight_sqrt": [], "inv_weight_linear": [], "inv_weight_log": [],
    }
    for f in fragments_list:
        pred, _ = split_instances(gt, f, 1.0, gap=gap, seed=seed)
        for kind in ("sqrt", "linear", "log"):
            config = SoftPQConfig(lower=l, upper=h, penalty=kind)
            series[f"softpq_{kind}"].append(softpq(gt, pred, config))
        series["inv_weight_sqrt"].append(math.sqrt(f + 1))
        series["inv_weight_linear"].append(float(f + 1))
        series["inv_weight_log"].append(math.log(f + 1))
    return CurveTable(
        x_label="fragments",
        x_values=tuple(float(f) for f in fragments_list),
        series={k: tuple(v) for k, v in series.items()},
        metadata={"l": l, "h": h, "gap": gap, "seed": seed, "disk": asdict(disk_spec)},
    )


# ---------------------------------------------------------------------------
# Emission


def _fmt(v: float) -> str:
    return f"{v:.12g}"


def _emit_csv(table: CurveTable) -> bytes:
    names = list(table.series)
    lines = [",".join(["x"] + names)]
    for i, x in enumerate(table.x_values):
        lines.append(",".join([_fmt(x)] + [_fmt(table.series[n][i]) for n in names]))
    return ("\n".join(lines) + "\n").encode("ascii")


_PALETTE = (
    "#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8", "#ffbb78",
)


def _emit_svg(table: CurveTable) -> bytes:
    width, height = 800, 500
    left, right, top, bottom = 60, 210, 20, 40
    plot_w = width - left - right
    plot_h = height - top - bottom
    xs = table.x_values
    x_min, x_max = min(xs), max(xs)
    x_span = (x_max - x_min) or 1.0
    y_min = 0.0
    y_max = max(1.0, max((max(v) for v in table.series.values()), default=1.0))
    y_span = (y_max - y_min) or 1.0

    def sx(x: float) -> float:
        return left + (x - x_min) / x_span * plot_w

    def sy(y: float) -> float:
        return top + plot_h - (y - y_min) / y_span * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{left}" y1="{top + plot_h}" x2="{left + plot_w}" y2="{top + plot_h}" '
        'stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + plot_h}" stroke="black"/>',
        f'<text x="{left + plot_w / 2:.1f}" y="{height - 8}" text-anchor="middle" '
        f'font-size="13">{escape(table.x_label)}</text>',
    ]
    for i, (name, values) in enumerate(table.series.items()):
        color = _PALETTE[i % len(_PALETTE)]
        points = " ".join(f"{sx(x):.2f},{sy(v):.2f}" for x, v in zip(xs, values))
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{points}"/>'
        )
        ly = top + 14 + 14 * i
        parts.append(
            f'<rect x="{left + plot_w + 10}" y="{ly - 9}" width="10" height="10" fill="{color}"/>'
        )
        parts.append(
            f'<text x="{left + plot_w + 24}" y="{ly}" font-size="11">{escape(name)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts).encode("utf-8")


def emit(table: CurveTable, format: str = "csv") -> bytes:
    """Serialize a table: 'csv' (header x,<series...>) or 'svg' (800x500 chart)."""
    if format == "csv":
        return _emit_csv(table)
    if format == "svg":
        return _emit_svg(table)
    raise ValueError(f"unknown emit format {format!r}; use 'csv' or 'svg'")
