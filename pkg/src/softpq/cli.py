"""Command-line surface.

Subcommands:
  eval        score a mask pair or two directories paired by filename (JSON)
  compare     per-image PQ vs soft PQ table for paired directories (CSV)
  perturb     apply one controlled error family to a label image
  experiment  run a named study and emit CSV (optionally SVG)
  disks       write the synthetic disk-lattice ground truth
  bench       time the hot kernels on every available backend

Exit codes: 0 success, 2 usage/pairing/format errors, 3 dimension mismatch.
All numbers printed here come straight from the library; the CLI does no
arithmetic of its own.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict
from pathlib import Path

from .bench import run_benchmark
from .experiments import (
    emit,
    erosion_curve,
    overseg_curve,
    penalty_ablation,
    threshold_sweep,
)
from .labelgrid import (
    LabelFormatError,
    LabelGrid,
    ShapeMismatchError,
    read_label_image,
    sniff_format,
    write_label_image,
)
from .metrics import DEFAULT_MAP_THRESHOLDS, PENALTY_KINDS, SoftPQConfig, evaluate_all
from .perturb import DiskGridSpec, PerturbSpec, PlacementError, apply_perturbation, make_disk_grid

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SHAPE = 3

# threshold presets for common regimes; strict sits at the lower corner of
# the usual high-precision range (h 0.6-0.75, l 0.4-0.5)
PRESETS = {
    "benchmark": {"lower": 0.25, "upper": 0.5},
    "strict": {"lower": 0.4, "upper": 0.6},
    "lenient": {"lower": 0.05, "upper": 0.5},
}

_RUNCONFIG_KEYS = {"lower", "upper", "penalty", "mode", "thresholds", "seed", "out"}


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_USAGE):
        super().__init__(message)
        self.code = code


def _load_grid(path: Path) -> LabelGrid:
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return read_label_image(data, sniff_format(data))
    except LabelFormatError as exc:
        raise CliError(f"{path}: {exc}") from exc


def _save_grid(grid: LabelGrid, path: Path) -> None:
    fmt = "ascii" if path.suffix.lower() in (".txt", ".asc") else "pgm"
    try:
        path.write_bytes(write_label_image(grid, fmt))
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror}") from exc


def _resolve_config(args: argparse.Namespace) -> SoftPQConfig:
    """defaults -> config file -> preset -> explicit flags, later wins."""
    values: dict[str, object] = {"lower": 0.05, "upper": 0.5, "penalty": "sqrt", "mode": "over"}
    if getattr(args, "config", None):
        path = Path(args.config)
        try:
            loaded = json.loads(path.read_text())
        except OSError as exc:
            raise CliError(f"cannot read config {path}: {exc.strerror}") from exc
        except json.JSONDecodeError as exc:
            raise CliError(f"config {path} is not valid JSON: {exc}") from exc
        unknown = set(loaded) - _RUNCONFIG_KEYS
        if unknown:
            raise CliError(f"config {path} has unknown keys: {', '.join(sorted(unknown))}")
        values.update({k: loaded[k] for k in ("lower", "upper", "penalty", "mode") if k in loaded})
        if "seed" in loaded and getattr(args, "seed", None) is None:
            args.seed = int(loaded["seed"])
        if "out" in loaded and getattr(args, "out", None) is None:
            args.out = str(loaded["out"])
        if "thresholds" in loaded:
            taus = tuple(float(t) for t in loaded["thresholds"])
            if not taus or any(not 0.0 <= t <= 1.0 for t in taus):
                raise CliError(f"config {path}: thresholds must be a non-empty list in [0, 1]")
            args.map_thresholds = taus
    if getattr(args, "preset", None):
        values.update(PRESETS[args.preset])
    for key in ("lower", "upper", "penalty", "mode"):
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    try:
        return SoftPQConfig(**values)  # type: ignore[arg-type]
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def _pair_directories(gt_dir: Path, pred_dir: Path) -> list[tuple[str, Path, Path]]:
    gt_names = {p.name for p in gt_dir.iterdir() if p.is_file()}
    pred_names = {p.name for p in pred_dir.iterdir() if p.is_file()}
    unmatched = sorted(gt_names ^ pred_names)
    if unmatched:
        raise CliError(
            "unmatched filenames between directories: " + ", ".join(unmatched)
        )
    if not gt_names:
        raise CliError(f"no files to pair in {gt_dir} and {pred_dir}")
    return [(n, gt_dir / n, pred_dir / n) for n in sorted(gt_names)]


def _score_pairs(
    pairs: list[tuple[str, Path, Path]],
    config: SoftPQConfig,
    jobs: int,
    thresholds: tuple[float, ...] = DEFAULT_MAP_THRESHOLDS,
) -> list[tuple[str, dict[str, float]]]:
    """Per-image score dicts, in filename order regardless of scheduling."""

    def one(item: tuple[str, Path, Path]) -> tuple[str, dict[str, float]]:
        name, gt_path, pred_path = item
        gt = _load_grid(gt_path)
        pred = _load_grid(pred_path)
        try:
            return name, evaluate_all(gt, pred, config, thresholds).as_dict()
        except ShapeMismatchError as exc:
            raise CliError(f"{name}: {exc}", EXIT_SHAPE) from exc

    if jobs > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(one, pairs))
    else:
        results = [one(item) for item in pairs]
    return sorted(results, key=lambda t: t[0])


def _write_or_print(payload: str, out: str | None) -> None:
    if out:
        Path(out).write_text(payload)
    else:
        sys.stdout.write(payload)


# ---------------------------------------------------------------------------
# Subcommands


def cmd_eval(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    gt_path = Path(args.gt)
    pred_path = Path(args.pred)
    if gt_path.is_dir() != pred_path.is_dir():
        raise CliError("gt and pred must both be files or both be directories")
    if gt_path.is_dir():
        pairs = _pair_directories(gt_path, pred_path)
    else:
        pairs = [(gt_path.name, gt_path, pred_path)]
    thresholds = getattr(args, "map_thresholds", None) or DEFAULT_MAP_THRESHOLDS
    results = _score_pairs(pairs, config, args.jobs, thresholds)

    keys = ["softpq", "pq", "sq", "rq_f1", "map", "pixel_iou", "dice"]
    aggregate = {k: sum(r[k] for _, r in results) / len(results) for k in keys}
    report = {
        "config": asdict(config),
        "images": [{"name": n, **r} for n, r in results],
        "aggregate": aggregate,
    }
    payload = json.dumps(report, indent=2, sort_keys=True) + "\n"
    sys.stdout.write(payload)
    if args.out:
        Path(args.out).write_text(payload)
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    pairs = _pair_directories(Path(args.gt_dir), Path(args.pred_dir))
    results = _score_pairs(pairs, config, args.jobs)
    lines = ["name,pq,softpq,softpq_minus_pq"]
    violations = 0
    for name, scores in results:
        diff = scores["softpq"] - scores["pq"]
        if scores["softpq"] < scores["pq"] - 1e-12:
            violations += 1
        lines.append(f"{name},{scores['pq']:.12g},{scores['softpq']:.12g},{diff:.12g}")
    csv_payload = "\n".join(lines) + "\n"
    summary = f"rows with softpq < pq - 1e-12: {violations} of {len(results)}\n"
    if args.out:
        Path(args.out).write_text(csv_payload)
        sys.stdout.write(summary)
    else:
        sys.stdout.write(csv_payload)
        sys.stderr.write(summary)
    return EXIT_OK


def cmd_perturb(args: argparse.Namespace) -> int:
    grid = _load_grid(Path(args.input))
    try:
        spec = PerturbSpec(
            kind=args.kind,
            iterations=args.iterations,
            fragments=args.fragments,
            fraction=args.fraction,
            gap=args.gap,
            ghost_count=args.count,
            ghost_radius=args.radius,
            keep_fraction=args.keep_fraction,
            seed=args.seed if args.seed is not None else 0,
        )
        perturbed, notes = apply_perturbation(grid, spec)
    except (ValueError, PlacementError) as exc:
        raise CliError(str(exc)) from exc
    _save_grid(perturbed, Path(args.out))
    for note in notes:
        sys.stderr.write(note + "\n")
    return EXIT_OK


def _experiment_assertions(name: str, table) -> list[str]:
    """Human-readable pass/fail lines for the study's headline claims."""
    lines = []

    def check(label: str, ok: bool) -> None:
        lines.append(f"{'PASS' if ok else 'FAIL'}: {label}")

    s = table.series
    if name == "erosion":
        soft = next(v for k, v in s.items() if k.startswith("softpq_") and "delta" not in k)
        check("softpq series monotone non-increasing",
              all(b <= a + 1e-12 for a, b in zip(soft, soft[1:])))
        if "pq" in s:
            drop = lambda v: max((a - b for a, b in zip(v, v[1:])), default=0.0)
            check("softpq max per-step drop < pq max per-step drop", drop(soft) < drop(s["pq"]))
    elif name == "sweep":
        strict = [k for k in s if k == "softpq_l0.5"]
        if strict:
            check("l=0.5 series equals pq within 1e-12",
                  all(abs(a - b) <= 1e-12 for a, b in zip(s[strict[0]], s["pq"])))
        for k in s:
            if k.startswith("softpq_l"):
                check(f"{k} >= pq - 1e-12 pointwise",
                      all(a >= b - 1e-12 for a, b in zip(s[k], s["pq"])))
    elif name == "overseg":
        for k in [k for k in s if k.startswith("softpq_f") and "env" not in k]:
            f = k.removeprefix("softpq_")
            check(f"{k} >= pq_{f} pointwise",
                  all(a >= b - 1e-12 for a, b in zip(s[k], s[f"pq_{f}"])))
    elif name == "ablation":
        check("sqrt >= linear pointwise",
              all(a >= b - 1e-12 for a, b in zip(s["softpq_sqrt"], s["softpq_linear"])))
    return lines


def cmd_experiment(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else 0
    if args.name == "erosion":
        table = erosion_curve(steps=args.steps)
    elif args.name == "sweep":
        table = threshold_sweep(perturbation=args.perturbation, steps=args.steps)
    elif args.name == "overseg":
        table = overseg_curve(seed=seed)
    elif args.name == "ablation":
        table = penalty_ablation(seed=seed)
    else:  # argparse choices guard this
        raise CliError(f"unknown experiment {args.name!r}")

    out_dir = Path(args.out) if args.out else Path(".")
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{args.name}.csv"
    csv_path.write_bytes(emit(table, "csv"))
    written = [str(csv_path)]
    if args.svg:
        svg_path = out_dir / f"{args.name}.svg"
        svg_path.write_bytes(emit(table, "svg"))
        written.append(str(svg_path))
    for line in _experiment_assertions(args.name, table):
        sys.stdout.write(line + "\n")
    sys.stdout.write("wrote " + " ".join(written) + "\n")
    return EXIT_OK


def cmd_disks(args: argparse.Namespace) -> int:
    try:
        spec = DiskGridSpec(rows=args.rows, cols=args.cols, radius=args.radius,
                            spacing=args.spacing)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    _save_grid(make_disk_grid(spec), Path(args.out))
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    sys.stdout.write(run_benchmark(size=args.size, repeats=args.repeats))
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser


def _add_metric_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lower", type=float, default=None, help="lower IoU threshold")
    p.add_argument("--upper", type=float, default=None, help="upper IoU threshold")
    p.add_argument("--penalty", choices=PENALTY_KINDS, default=None)
    p.add_argument("--mode", choices=("over", "under"), default=None,
                   help="soft-credit anchor: GT side (over) or prediction side (under)")
    p.add_argument("--preset", choices=sorted(PRESETS), default=None)
    p.add_argument("--config", default=None, help="JSON run-config file; flags override it")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1, help="parallel image evaluations")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="softpq",
        description="Graded instance-segmentation metrics with dual IoU thresholds",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="score a mask pair or paired directories (JSON)")
    p.add_argument("gt")
    p.add_argument("pred")
    p.add_argument("--out", default=None, help="also write the JSON report here")
    _add_metric_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("compare", help="per-image PQ vs soft PQ CSV")
    p.add_argument("gt_dir")
    p.add_argument("pred_dir")
    p.add_argument("--out", default=None, help="CSV destination (stdout if omitted)")
    _add_metric_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("perturb", help="apply a controlled error family")
    p.add_argument("input")
    p.add_argument("--kind", required=True, choices=("erode", "dilate", "split", "ghost", "partial"))
    p.add_argument("--out", required=True)
    p.add_argument("--iterations", type=int, default=1)
    p.add_argument("--fragments", type=int, default=2)
    p.add_argument("--fraction", type=float, default=1.0)
    p.add_argument("--gap", type=int, choices=(0, 1), default=1)
    p.add_argument("--count", type=int, default=3, help="ghost count")
    p.add_argument("--radius", type=int, default=6, help="ghost radius")
    p.add_argument("--keep-fraction", dest="keep_fraction", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("experiment", help="run a named study, write CSV (+SVG)")
    p.add_argument("name", choices=("erosion", "sweep", "overseg", "ablation"))
    p.add_argument("--steps", type=int, default=25)
    p.add_argument("--perturbation", choices=("erode", "dilate"), default="erode",
                   help="sweep only")
    p.add_argument("--out", default=None, help="output directory (default .)")
    p.add_argument("--svg", action="store_true", help="also write an SVG chart")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("disks", help="write the synthetic disk-lattice ground truth")
    p.add_argument("--rows", type=int, default=5)
    p.add_argument("--cols", type=int, default=5)
    p.add_argument("--radius", type=int, default=18)
    p.add_argument("--spacing", type=int, default=51)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_disks)

    p = sub.add_parser("bench", help="time the hot kernels per backend")
    p.add_argument("--size", type=int, default=1024, help="square grid edge length")
    p.add_argument("--repeats", type=int, default=5)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.code
    except ShapeMismatchError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_SHAPE
    except LabelFormatError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
