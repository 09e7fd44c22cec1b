"""Square-symmetry group action on images, key points, and kernels, plus
orbit generation for dataset augmentation.

The action convention is fixed once: element g moves the content, so the
output at position p shows the input at g^-1 p, with positions taken in
centered math coordinates (y up).  On the pixel lattice every one of the
eight transforms is a pure permutation — rotations by multiples of 90
degrees and axis flips — so nothing is interpolated and nothing is lost.
Even-sized images pivot about the half-integer center (w-1)/2, which the
permutation realizes exactly.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dihedral import GroupElement, element_name, elements, matrix_of
from .errors import DfaceError, RasterShapeError, UnsupportedOrderError
from .face import FaceFrame, KeyPoint, counterpart, load_frame, save_frame
from .raster import RasterImage, read_image, write_image

__all__ = [
    "act_on_image",
    "act_on_keypoints",
    "transform_kernel",
    "kernel_bank",
    "orbit",
    "augment_dataset",
    "OrbitEntry",
    "OrbitManifest",
    "AugmentSummary",
    "manifest_csv",
]


def _require_d4(g: GroupElement) -> None:
    if g.order_n != 4:
        raise UnsupportedOrderError(
            f"image actions are defined for the square group only, got D{g.order_n}"
        )


def act_on_image(g: GroupElement, img: RasterImage) -> RasterImage:
    """Permute pixels by g: rotate counterclockwise k quarter turns, then
    flip horizontally if g reflects.  Quarter-turn elements transpose the
    output dimensions."""
    _require_d4(g)
    arr = img.array()
    out = np.rot90(arr, g.rotation_k)
    if g.reflection_j:
        out = np.fliplr(out)
    return RasterImage.from_array(np.ascontiguousarray(out))


def act_on_keypoints(
    g: GroupElement, frame: FaceFrame, center: tuple[float, float]
) -> FaceFrame:
    """Move every present key point to M(g) (p - center) + center.

    Coordinates are raster (y down); the matrix acts in y-up convention, so
    the vertical component is negated around the pivot.  Reflections swap
    anatomical sides, and the schema keys points by side, so each
    transformed coordinate is stored under its mirror id: the frame stays
    canonical and the subject's left data lands in the slot now on the
    subject's left.
    """
    _require_d4(g)
    matrix = matrix_of(g)
    cx, cy = center
    swap = matrix.determinant < 0
    moved: dict[int, tuple[float, float, bool]] = {}
    for p in frame.points:
        if not p.present:
            continue
        mx, my = matrix.apply((p.x - cx, cy - p.y))
        target = counterpart(p.point_id) if swap else p.point_id
        moved[target] = (cx + mx, cy - my, p.reconstructed)
    points = []
    for slot in frame.points:
        if slot.point_id in moved:
            x, y, rec = moved[slot.point_id]
            points.append(
                KeyPoint(slot.point_id, slot.region, slot.laterality, slot.state,
                         x, y, reconstructed=rec)
            )
        else:
            points.append(KeyPoint(slot.point_id, slot.region, slot.laterality, slot.state))
    return FaceFrame(tuple(points))


def transform_kernel(g: GroupElement, kernel: np.ndarray) -> np.ndarray:
    """Same index permutation as the image action, applied to a square
    odd-sized convolution kernel; entry sum is preserved exactly."""
    _require_d4(g)
    k = np.asarray(kernel, dtype=np.float64)
    if k.ndim != 2 or k.shape[0] != k.shape[1]:
        raise RasterShapeError(f"kernel must be square, got shape {k.shape}")
    if k.shape[0] % 2 == 0:
        raise RasterShapeError(f"kernel side must be odd, got {k.shape[0]}")
    out = np.rot90(k, g.rotation_k)
    if g.reflection_j:
        out = np.fliplr(out)
    return np.ascontiguousarray(out)


def kernel_bank(kernel: np.ndarray) -> list[tuple[str, np.ndarray]]:
    """The eight transformed copies of a kernel, in canonical element
    order — the filter bank for symmetry-respecting convolution."""
    return [(element_name(g), transform_kernel(g, kernel)) for g in elements(4)]


@dataclass(frozen=True)
class OrbitEntry:
    element: str
    path: str
    sha256: str


@dataclass(frozen=True)
class OrbitManifest:
    source_id: str
    entries: tuple[OrbitEntry, ...]
    distinct_count: int


def _suffix(img: RasterImage) -> str:
    return ".pgm" if img.channels == 1 else ".ppm"


def orbit(img: RasterImage, source_id: str = "image") -> tuple[OrbitManifest, dict[str, RasterImage]]:
    """All eight transformed images plus a manifest of content hashes.

    Only square images have a well-defined orbit here: a quarter turn of a
    non-square image changes its shape.  The number of distinct results
    always divides eight (it is 8 / |stabilizer|).
    """
    if not img.is_square:
        raise RasterShapeError(
            f"orbit needs a square image, got {img.width}x{img.height}; "
            "pad_to_square first"
        )
    images: dict[str, RasterImage] = {}
    entries = []
    hashes = set()
    for g in elements(4):
        name = element_name(g)
        out = act_on_image(g, img)
        digest = hashlib.sha256(write_image(out)).hexdigest()
        hashes.add(digest)
        images[name] = out
        entries.append(OrbitEntry(name, f"{source_id}__{name}{_suffix(out)}", digest))
    return OrbitManifest(source_id, tuple(entries), len(hashes)), images


@dataclass(frozen=True)
class AugmentSummary:
    processed: int
    written: int
    errors: tuple[tuple[str, str], ...]


def manifest_csv(manifests: list[OrbitManifest]) -> str:
    lines = ["source,element,path,sha256"]
    for m in manifests:
        for e in m.entries:
            lines.append(f"{m.source_id},{e.element},{e.path},{e.sha256}")
    return "\n".join(lines) + "\n"


def augment_dataset(
    in_dir: str | Path,
    out_dir: str | Path,
    element_names: list[str] | None = None,
    center: tuple[float, float] | None = None,
    require_square: bool = False,
) -> AugmentSummary:
    """Expand every image in ``in_dir`` into its orbit under the chosen
    elements (all eight by default), carrying along any key point file that
    shares the image's stem.

    Output naming is ``<stem>__<element>`` with the image's own suffix.
    Unreadable or non-square inputs are recorded in the summary and skipped
    unless ``require_square`` makes them fatal.  The manifest is sorted by
    input name then canonical element order, so reruns are byte-identical.
    """
    in_dir, out_dir = Path(in_dir), Path(out_dir)
    wanted = set(element_names) if element_names is not None else None
    order = [element_name(g) for g in elements(4)]
    if wanted is not None:
        unknown = wanted - set(order)
        if unknown:
            raise DfaceError(f"unknown elements: {','.join(sorted(unknown))}")
    out_dir.mkdir(parents=True, exist_ok=True)
    sources = sorted(
        p for p in in_dir.iterdir() if p.suffix.lower() in (".pgm", ".ppm")
    )
    manifests = []
    errors = []
    processed = written = 0
    for src in sources:
        try:
            img = read_image(src.read_bytes())
            manifest, images = orbit(img, src.stem)
            kp_path = src.with_suffix(".csv")
            frame = load_frame(kp_path) if kp_path.exists() else None
        except DfaceError as exc:
            if require_square and isinstance(exc, RasterShapeError):
                raise
            errors.append((src.name, str(exc)))
            continue
        pivot = center if center is not None else ((img.width - 1) / 2.0, (img.height - 1) / 2.0)
        kept = []
        for g, entry in zip(elements(4), manifest.entries):
            if wanted is not None and entry.element not in wanted:
                continue
            kept.append(entry)
            (out_dir / entry.path).write_bytes(write_image(images[entry.element]))
            written += 1
            if frame is not None:
                moved = act_on_keypoints(g, frame, pivot)
                save_frame(out_dir / f"{src.stem}__{entry.element}.csv", moved)
        manifests.append(OrbitManifest(manifest.source_id, tuple(kept), manifest.distinct_count))
        processed += 1
    (out_dir / "manifest.csv").write_text(manifest_csv(manifests), encoding="utf-8")
    return AugmentSummary(processed, written, tuple(errors))
