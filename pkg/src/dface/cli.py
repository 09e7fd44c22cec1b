"""Command line driver tying the whole pipeline together.

Exit codes: 0 success, 2 usage or configuration problem, 3 data problem.
Diagnostics go to stderr as ``error[<code>]: message``; machine-readable
results go to stdout or to files, and identical inputs always produce
byte-identical outputs.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .augment import act_on_image, augment_dataset, kernel_bank, manifest_csv, orbit
from .aus import (
    activations_csv,
    classify_emotion,
    detect_active_aus,
)
from .config import Config, load_config
from .dihedral import (
    axiom_report_csv,
    cayley_csv,
    parse_element,
    verify_group_axioms,
)
from .errors import ConfigError, DfaceError, DomainError, SchemaError
from .face import FrameSequence, load_frame, load_sequence, serialize_frame
from .formatting import fmt
from .overlay import render_overlay
from .raster import (
    bounding_rect,
    canny_edges,
    crop,
    gaussian_smooth,
    pad_to_square,
    read_image,
    to_grayscale,
    write_image,
)
from .symmetry import (
    MidlineAxis,
    asymmetry_report,
    estimate_midline,
    movement_asymmetry,
    reconstruct_occluded,
    report_csv,
    structural_asymmetry,
)

__all__ = ["main"]


class _UsageError(Exception):
    pass


def _positive_order(raw: str) -> int:
    try:
        n = int(raw)
    except ValueError:
        raise _UsageError(f"group order must be an integer, got {raw!r}") from None
    if n < 1:
        raise _UsageError(f"group order must be >= 1, got {n}")
    return n


def _element(raw: str):
    try:
        return parse_element(4, raw)
    except DomainError as exc:
        raise _UsageError(str(exc)) from None


def _write_or_stdout(data: bytes, output: str | None) -> None:
    if output:
        Path(output).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)


def _cmd_cayley(args, config: Config) -> int:
    sys.stdout.write(cayley_csv(_positive_order(args.n)))
    return 0


def _cmd_verify(args, config: Config) -> int:
    report = verify_group_axioms(_positive_order(args.n))
    sys.stdout.write(axiom_report_csv(report))
    return 0 if report.passed else 3


def _cmd_transform(args, config: Config) -> int:
    g = _element(args.element)
    img = read_image(Path(args.image).read_bytes())
    _write_or_stdout(write_image(act_on_image(g, img)), args.output)
    return 0


def _cmd_orbit(args, config: Config) -> int:
    img = read_image(Path(args.image).read_bytes())
    manifest, images = orbit(img, Path(args.image).stem)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for entry in manifest.entries:
        (outdir / entry.path).write_bytes(write_image(images[entry.element]))
    (outdir / "manifest.csv").write_text(manifest_csv([manifest]), encoding="utf-8")
    return 0


def _parse_kernel(text: str) -> np.ndarray:
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.replace(",", " ").split()
        try:
            rows.append([float(t) for t in tokens])
        except ValueError:
            raise SchemaError(f"line {lineno}: bad kernel value") from None
    if not rows:
        raise SchemaError("kernel file holds no rows")
    if len({len(r) for r in rows}) != 1:
        raise SchemaError("kernel rows have unequal lengths")
    return np.array(rows, dtype=np.float64)


def _cmd_kernels(args, config: Config) -> int:
    kernel = _parse_kernel(Path(args.kernel_file).read_text(encoding="utf-8"))
    bank = kernel_bank(kernel)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    stem = Path(args.kernel_file).stem
    for name, mat in bank:
        lines = [",".join(fmt(v) for v in row) for row in mat]
        (outdir / f"{stem}__{name}.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return 0


def _cmd_preprocess(args, config: Config) -> int:
    img = read_image(Path(args.image).read_bytes())
    gray = to_grayscale(img)
    smooth = gaussian_smooth(gray, config.canny_sigma)
    edges = canny_edges(smooth, config.canny_low, config.canny_high, config.canny_sigma)
    rect = bounding_rect(edges)
    square, _offset = pad_to_square(crop(gray, rect))
    if args.output:
        Path(args.output).write_bytes(write_image(square))
    sys.stdout.write(rect.csv() + "\n")
    return 0


def _cmd_midline(args, config: Config) -> int:
    axis = estimate_midline(load_frame(args.frame))
    out = [
        f"point,{fmt(axis.point[0])},{fmt(axis.point[1])}",
        f"direction,{fmt(axis.direction[0])},{fmt(axis.direction[1])}",
        f"residual,{fmt(axis.fit_residual)}",
        f"degenerate,{1 if axis.degenerate else 0}",
    ]
    sys.stdout.write("\n".join(out) + "\n")
    return 0


def _load_any_sequence(path: str) -> FrameSequence:
    p = Path(path)
    if p.is_dir():
        return load_sequence(p)
    return FrameSequence((load_frame(p),))


def _cmd_asymmetry(args, config: Config) -> int:
    seq = _load_any_sequence(args.path)
    axes = [estimate_midline(f) for f in seq.frames]
    if args.structural:
        sys.stdout.write(fmt(asymmetry_report(seq, axes).structural) + "\n")
    elif args.movement:
        sys.stdout.write(fmt(movement_asymmetry(seq, axes)) + "\n")
    else:
        sys.stdout.write(report_csv(asymmetry_report(seq, axes)))
    return 0


def _parse_axis(raw: str) -> MidlineAxis | None:
    if raw == "auto":
        return None
    parts = raw.split(",")
    if len(parts) != 4:
        raise _UsageError("--axis takes 'auto' or 'x,y,dx,dy'")
    try:
        x, y, dx, dy = (float(t) for t in parts)
    except ValueError:
        raise _UsageError(f"bad axis {raw!r}") from None
    norm = (dx * dx + dy * dy) ** 0.5
    if norm == 0.0:
        raise _UsageError("axis direction must be nonzero")
    return MidlineAxis((x, y), (dx / norm, dy / norm), 0.0)


def _cmd_reconstruct(args, config: Config) -> int:
    frame = load_frame(args.frame)
    axis = _parse_axis(args.axis)
    restored = reconstruct_occluded(frame, axis)
    text = serialize_frame(restored)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_aus(args, config: Config) -> int:
    neutral, expr = load_frame(args.neutral), load_frame(args.expr)
    acts = detect_active_aus(neutral, expr, threshold=config.au_threshold)
    sys.stdout.write(activations_csv(acts))
    return 0


def _cmd_classify(args, config: Config) -> int:
    neutral, expr = load_frame(args.neutral), load_frame(args.expr)
    acts = detect_active_aus(neutral, expr, threshold=config.au_threshold)
    result = classify_emotion(acts, config.tie_order)
    if result.is_neutral:
        sys.stdout.write("Neutral\n")
        return 0
    for rank, (emotion, score) in enumerate(result.ranking, start=1):
        sys.stdout.write(f"{emotion.value},{score:.3f},rank={rank}\n")
    return 0


def _cmd_augment(args, config: Config) -> int:
    element_names = None
    if args.elements:
        element_names = [t.strip() for t in args.elements.split(",") if t.strip()]
        for name in element_names:
            _element(name)
    center = None
    if args.center:
        parts = args.center.split(",")
        if len(parts) != 2:
            raise _UsageError("--center takes 'x,y'")
        try:
            center = (float(parts[0]), float(parts[1]))
        except ValueError:
            raise _UsageError(f"bad center {args.center!r}") from None
    summary = augment_dataset(
        args.indir, args.outdir,
        element_names=element_names,
        center=center,
        require_square=args.require_square,
    )
    for name, message in summary.errors:
        print(f"error[data]: {name}: {message}", file=sys.stderr)
    sys.stdout.write(
        f"processed={summary.processed} written={summary.written} "
        f"errors={len(summary.errors)}\n"
    )
    return 0


def _cmd_report(args, config: Config) -> int:
    seq = load_sequence(args.seqdir)
    neutral = load_frame(args.neutral) if args.neutral else seq.frames[0]
    axes = [estimate_midline(f) for f in seq.frames]
    mode = args.report_format or config.report_format
    if mode not in ("csv", "svg", "both"):
        raise _UsageError(f"unknown report format {mode!r}")
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    if mode in ("csv", "both"):
        rows = ["frame,structural,movement_cumulative"]
        for i, frame in enumerate(seq.frames):
            structural = structural_asymmetry(frame, axes[i])
            if i == 0:
                cumulative = 0.0
            else:
                prefix = FrameSequence(seq.frames[: i + 1],
                                       interocular_ref=seq.interocular_ref)
                cumulative = movement_asymmetry(prefix, axes[: i + 1])
            rows.append(f"{i},{fmt(structural)},{fmt(cumulative)}")
        (outdir / "asymmetry.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")

        rows = ["frame,label,score"]
        for i, frame in enumerate(seq.frames):
            acts = detect_active_aus(neutral, frame, threshold=config.au_threshold)
            result = classify_emotion(acts, config.tie_order)
            score = fmt(result.ranking[0][1]) if result.ranking else ""
            rows.append(f"{i},{result.label},{score}")
        (outdir / "classification.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")

    if mode in ("svg", "both"):
        for i, frame in enumerate(seq.frames):
            (outdir / f"overlay_{i}.svg").write_text(
                render_overlay(frame, axes[i]), encoding="utf-8"
            )
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dface",
        description="Square-symmetry toolkit for facial key point analysis.",
    )
    parser.add_argument("--config", default=None, help="INI config path")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cayley", help="print the D_n multiplication table")
    p.add_argument("n")
    p.set_defaults(handler=_cmd_cayley)

    p = sub.add_parser("verify", help="check the group axioms for D_n")
    p.add_argument("n")
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("transform", help="apply one group element to an image")
    p.add_argument("element")
    p.add_argument("image")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(handler=_cmd_transform)

    p = sub.add_parser("orbit", help="write all 8 transformed images plus a manifest")
    p.add_argument("image")
    p.add_argument("outdir")
    p.set_defaults(handler=_cmd_orbit)

    p = sub.add_parser("kernels", help="write the 8-member transformed kernel bank")
    p.add_argument("kernel_file")
    p.add_argument("outdir")
    p.set_defaults(handler=_cmd_kernels)

    p = sub.add_parser(
        "preprocess",
        help="grayscale, denoise, find edges, crop to their box, pad square",
    )
    p.add_argument("image")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(handler=_cmd_preprocess)

    p = sub.add_parser("midline", help="estimate the facial midline of one frame")
    p.add_argument("frame")
    p.set_defaults(handler=_cmd_midline)

    p = sub.add_parser("asymmetry", help="structural/movement asymmetry scores")
    p.add_argument("path", help="frame CSV or sequence directory")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--structural", action="store_true")
    group.add_argument("--movement", action="store_true")
    p.set_defaults(handler=_cmd_asymmetry)

    p = sub.add_parser("reconstruct", help="fill occluded points by mirroring")
    p.add_argument("frame")
    p.add_argument("--axis", default="auto", help="'auto' or 'x,y,dx,dy'")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(handler=_cmd_reconstruct)

    p = sub.add_parser("aus", help="detect activated action units")
    p.add_argument("neutral")
    p.add_argument("expr")
    p.set_defaults(handler=_cmd_aus)

    p = sub.add_parser("classify", help="rank basic emotions for an expression")
    p.add_argument("neutral")
    p.add_argument("expr")
    p.set_defaults(handler=_cmd_classify)

    p = sub.add_parser("augment", help="expand a dataset by the group orbit")
    p.add_argument("indir")
    p.add_argument("outdir")
    p.add_argument("--elements", default=None, help="comma list, e.g. 'e,r,sr2'")
    p.add_argument("--center", default=None, help="key point pivot 'x,y'")
    p.add_argument("--require-square", action="store_true")
    p.set_defaults(handler=_cmd_augment)

    p = sub.add_parser("report", help="per-frame asymmetry and emotion report")
    p.add_argument("seqdir")
    p.add_argument("outdir")
    p.add_argument("--report-format", default=None, choices=("csv", "svg", "both"))
    p.add_argument("--neutral", default=None, help="neutral frame CSV (default: first frame)")
    p.set_defaults(handler=_cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code is None else int(exc.code)
    try:
        config = load_config(args.config)
        return args.handler(args, config)
    except _UsageError as exc:
        print(f"error[usage]: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error[io]: {exc}", file=sys.stderr)
        return 3
    except DfaceError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return 3
