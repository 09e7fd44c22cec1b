"""Schema and I/O for the 24-point facial key point layout.

Point ids are fixed by convention:

    0-2    left eyebrow, medial to lateral
    3-5    right eyebrow, medial to lateral
    6-9    left eye: inner corner, top lid, outer corner, bottom lid
    10-13  right eye, same order
    14-16  left mouth corner: apex, upper lip edge, lower lip edge
    17-19  right mouth corner, same order
    20-23  lip midline, top to bottom

"Left" and "right" name the subject's anatomical sides.  Coordinates are
raster pixels: x grows rightward, y grows downward.  Each point carries a
motion state: mimic points (brows, mouth) are ``active``, eye corners and
lids are ``stable`` anchors used for normalization.
"""

from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import (
    DegenerateFaceError,
    FrameParseError,
    MissingPointError,
    SchemaError,
)
from .formatting import fmt as _format_float

__all__ = [
    "Region",
    "Laterality",
    "PointState",
    "KeyPoint",
    "FaceFrame",
    "FrameSequence",
    "POINT_COUNT",
    "CANONICAL_LAYOUT",
    "LATERAL_PAIRS",
    "MIDLINE_IDS",
    "counterpart",
    "default_state",
    "build_frame",
    "interocular_distance",
    "parse_frame",
    "serialize_frame",
    "load_frame",
    "save_frame",
    "load_sequence",
    "save_sequence",
]


class Region(str, Enum):
    EYEBROW = "eyebrow"
    EYE = "eye"
    LIP_CORNER = "lip_corner"
    LIP_MIDDLE = "lip_middle"


class Laterality(str, Enum):
    LEFT = "left"
    RIGHT = "right"
    MIDLINE = "midline"


class PointState(str, Enum):
    STABLE = "stable"
    ACTIVE = "active"
    PASSIVE = "passive"


POINT_COUNT = 24

# Named ids for the points the measurement code addresses directly.
LEFT_BROW_INNER, LEFT_BROW_MID, LEFT_BROW_OUTER = 0, 1, 2
RIGHT_BROW_INNER, RIGHT_BROW_MID, RIGHT_BROW_OUTER = 3, 4, 5
LEFT_EYE_INNER, LEFT_EYE_TOP, LEFT_EYE_OUTER, LEFT_EYE_BOTTOM = 6, 7, 8, 9
RIGHT_EYE_INNER, RIGHT_EYE_TOP, RIGHT_EYE_OUTER, RIGHT_EYE_BOTTOM = 10, 11, 12, 13
LEFT_LIP_CORNER, LEFT_LIP_UPPER, LEFT_LIP_LOWER = 14, 15, 16
RIGHT_LIP_CORNER, RIGHT_LIP_UPPER, RIGHT_LIP_LOWER = 17, 18, 19
LIP_TOP, LIP_UPPER_MID, LIP_LOWER_MID, LIP_BOTTOM = 20, 21, 22, 23

LEFT_EYE_IDS = (6, 7, 8, 9)
RIGHT_EYE_IDS = (10, 11, 12, 13)
LEFT_BROW_IDS = (0, 1, 2)
RIGHT_BROW_IDS = (3, 4, 5)

CANONICAL_LAYOUT: tuple[tuple[Region, Laterality], ...] = (
    (Region.EYEBROW, Laterality.LEFT),
    (Region.EYEBROW, Laterality.LEFT),
    (Region.EYEBROW, Laterality.LEFT),
    (Region.EYEBROW, Laterality.RIGHT),
    (Region.EYEBROW, Laterality.RIGHT),
    (Region.EYEBROW, Laterality.RIGHT),
    (Region.EYE, Laterality.LEFT),
    (Region.EYE, Laterality.LEFT),
    (Region.EYE, Laterality.LEFT),
    (Region.EYE, Laterality.LEFT),
    (Region.EYE, Laterality.RIGHT),
    (Region.EYE, Laterality.RIGHT),
    (Region.EYE, Laterality.RIGHT),
    (Region.EYE, Laterality.RIGHT),
    (Region.LIP_CORNER, Laterality.LEFT),
    (Region.LIP_CORNER, Laterality.LEFT),
    (Region.LIP_CORNER, Laterality.LEFT),
    (Region.LIP_CORNER, Laterality.RIGHT),
    (Region.LIP_CORNER, Laterality.RIGHT),
    (Region.LIP_CORNER, Laterality.RIGHT),
    (Region.LIP_MIDDLE, Laterality.MIDLINE),
    (Region.LIP_MIDDLE, Laterality.MIDLINE),
    (Region.LIP_MIDDLE, Laterality.MIDLINE),
    (Region.LIP_MIDDLE, Laterality.MIDLINE),
)

# Mirror pairs (left id, right id); midline points are their own mirror.
LATERAL_PAIRS: tuple[tuple[int, int], ...] = (
    (0, 3), (1, 4), (2, 5),
    (6, 10), (7, 11), (8, 12), (9, 13),
    (14, 17), (15, 18), (16, 19),
)

MIDLINE_IDS: tuple[int, ...] = (20, 21, 22, 23)

_COUNTERPART = {pid: pid for pid in MIDLINE_IDS}
for _l, _r in LATERAL_PAIRS:
    _COUNTERPART[_l] = _r
    _COUNTERPART[_r] = _l


def counterpart(point_id: int) -> int:
    """Mirror-image id of a point; midline points map to themselves."""
    try:
        return _COUNTERPART[point_id]
    except KeyError:
        raise SchemaError(f"point id out of range: {point_id}") from None


def default_state(point_id: int) -> PointState:
    region, _ = CANONICAL_LAYOUT[point_id]
    return PointState.STABLE if region is Region.EYE else PointState.ACTIVE


@dataclass(frozen=True)
class KeyPoint:
    """One labelled key point; ``x``/``y`` are None when the point is
    occluded, ``reconstructed`` marks coordinates filled in by mirroring."""

    point_id: int
    region: Region
    laterality: Laterality
    state: PointState
    x: float | None = None
    y: float | None = None
    reconstructed: bool = False

    @property
    def present(self) -> bool:
        return self.x is not None and self.y is not None

    @property
    def coords(self) -> tuple[float, float]:
        if not self.present:
            raise MissingPointError(f"point {self.point_id} has no coordinates")
        return (self.x, self.y)


@dataclass(frozen=True)
class FaceFrame:
    """An immutable snapshot of all 24 key points.

    The tuple is always index-aligned with point ids, and region and
    laterality labels must match the canonical layout; construction fails
    otherwise.
    """

    points: tuple[KeyPoint, ...]

    def __post_init__(self):
        if len(self.points) != POINT_COUNT:
            raise SchemaError(f"a frame needs {POINT_COUNT} points, got {len(self.points)}")
        for pid, (point, (region, lat)) in enumerate(zip(self.points, CANONICAL_LAYOUT)):
            if point.point_id != pid:
                raise SchemaError(f"point at index {pid} has id {point.point_id}")
            if point.region is not region or point.laterality is not lat:
                raise SchemaError(
                    f"point {pid} labelled {point.region.value}/{point.laterality.value}, "
                    f"expected {region.value}/{lat.value}"
                )
            if (point.x is None) != (point.y is None):
                raise SchemaError(f"point {pid} has only one coordinate")

    def point(self, point_id: int) -> KeyPoint:
        if not 0 <= point_id < POINT_COUNT:
            raise SchemaError(f"point id out of range: {point_id}")
        return self.points[point_id]

    def coords(self, point_id: int) -> tuple[float, float]:
        return self.point(point_id).coords

    def present_ids(self) -> tuple[int, ...]:
        return tuple(p.point_id for p in self.points if p.present)

    def missing_ids(self) -> tuple[int, ...]:
        return tuple(p.point_id for p in self.points if not p.present)

    @property
    def complete(self) -> bool:
        return all(p.present for p in self.points)

    def replace_points(self, updates: Mapping[int, KeyPoint]) -> "FaceFrame":
        pts = list(self.points)
        for pid, kp in updates.items():
            pts[pid] = kp
        return FaceFrame(tuple(pts))

    def with_coords(self, updates: Mapping[int, tuple[float, float]],
                    reconstructed: bool = False) -> "FaceFrame":
        out = {}
        for pid, (x, y) in updates.items():
            out[pid] = replace(self.point(pid), x=float(x), y=float(y),
                               reconstructed=reconstructed)
        return self.replace_points(out)


def build_frame(coords: Mapping[int, tuple[float, float]] | Sequence[tuple[float, float] | None],
                states: Mapping[int, PointState] | None = None) -> FaceFrame:
    """Assemble a frame from coordinates alone.

    ``coords`` is either a mapping from point id to (x, y) or a 24-long
    sequence where None marks an occluded point; labels and (unless
    overridden) motion states come from the canonical layout.
    """
    if isinstance(coords, Mapping):
        table: dict[int, tuple[float, float] | None] = {pid: None for pid in range(POINT_COUNT)}
        for pid, xy in coords.items():
            if not 0 <= pid < POINT_COUNT:
                raise SchemaError(f"point id out of range: {pid}")
            table[pid] = xy
        seq = [table[pid] for pid in range(POINT_COUNT)]
    else:
        seq = list(coords)
        if len(seq) != POINT_COUNT:
            raise SchemaError(f"a frame needs {POINT_COUNT} points, got {len(seq)}")
    points = []
    for pid, xy in enumerate(seq):
        region, lat = CANONICAL_LAYOUT[pid]
        state = (states or {}).get(pid, default_state(pid))
        x, y = (None, None) if xy is None else (float(xy[0]), float(xy[1]))
        points.append(KeyPoint(pid, region, lat, state, x, y))
    return FaceFrame(tuple(points))


def interocular_distance(frame: FaceFrame) -> float:
    """Distance between the two eye centroids (all four points each).

    The usual normalization length; raises if any eye point is occluded or
    the centroids coincide.
    """
    missing = [pid for pid in LEFT_EYE_IDS + RIGHT_EYE_IDS if not frame.point(pid).present]
    if missing:
        raise MissingPointError(
            "interocular distance needs all eye points; missing "
            + ",".join(str(m) for m in missing)
        )
    lx = sum(frame.coords(pid)[0] for pid in LEFT_EYE_IDS) / 4.0
    ly = sum(frame.coords(pid)[1] for pid in LEFT_EYE_IDS) / 4.0
    rx = sum(frame.coords(pid)[0] for pid in RIGHT_EYE_IDS) / 4.0
    ry = sum(frame.coords(pid)[1] for pid in RIGHT_EYE_IDS) / 4.0
    d = math.hypot(lx - rx, ly - ry)
    if d <= 0.0:
        raise DegenerateFaceError("eye centroids coincide")
    return d


_HEADER = "id,region,laterality,state,x,y,present"


def serialize_frame(frame: FaceFrame) -> str:
    """Frame as CSV text.  ``present`` is 0 for occluded points (empty
    coordinate fields), 1 for measured, 2 for reconstructed."""
    lines = [_HEADER]
    for p in frame.points:
        if p.present:
            flag = "2" if p.reconstructed else "1"
            xs, ys = _format_float(p.x), _format_float(p.y)
        else:
            flag, xs, ys = "0", "", ""
        lines.append(
            f"{p.point_id},{p.region.value},{p.laterality.value},{p.state.value},{xs},{ys},{flag}"
        )
    return "\n".join(lines) + "\n"


def parse_frame(text: str) -> FaceFrame:
    """Inverse of :func:`serialize_frame`, with line-numbered errors."""
    lines = text.splitlines()
    if not lines:
        raise FrameParseError("expected 24 rows, found 0")
    if lines[0].strip() != _HEADER:
        raise FrameParseError(f"expected header {_HEADER!r}", line=1)
    seen: dict[int, KeyPoint] = {}
    for lineno, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        fields = raw.split(",")
        if len(fields) != 7:
            raise FrameParseError(f"expected 7 fields, got {len(fields)}", line=lineno)
        sid, sregion, slat, sstate, sx, sy, sflag = (f.strip() for f in fields)
        try:
            pid = int(sid)
        except ValueError:
            raise FrameParseError(f"bad point id {sid!r}", line=lineno) from None
        if not 0 <= pid < POINT_COUNT:
            raise FrameParseError(f"point id out of range: {pid}", line=lineno)
        if pid in seen:
            raise FrameParseError(f"duplicate point id {pid}", line=lineno)
        try:
            region = Region(sregion)
            lat = Laterality(slat)
            state = PointState(sstate)
        except ValueError as exc:
            raise FrameParseError(str(exc), line=lineno) from None
        if sflag not in ("0", "1", "2"):
            raise FrameParseError(f"present flag must be 0, 1 or 2, got {sflag!r}", line=lineno)
        if sflag == "0":
            if sx or sy:
                raise FrameParseError("occluded point must have empty coordinates", line=lineno)
            x = y = None
        else:
            try:
                x, y = float(sx), float(sy)
            except ValueError:
                raise FrameParseError(f"bad coordinates {sx!r},{sy!r}", line=lineno) from None
            if not (math.isfinite(x) and math.isfinite(y)):
                raise FrameParseError("coordinates must be finite", line=lineno)
        seen[pid] = KeyPoint(pid, region, lat, state, x, y, reconstructed=sflag == "2")
    missing = sorted(set(range(POINT_COUNT)) - set(seen))
    if missing:
        raise FrameParseError("missing point ids " + ",".join(str(m) for m in missing))
    try:
        return FaceFrame(tuple(seen[pid] for pid in range(POINT_COUNT)))
    except SchemaError as exc:
        raise FrameParseError(str(exc)) from None


def load_frame(path: str | Path) -> FaceFrame:
    return parse_frame(Path(path).read_text(encoding="utf-8"))


def save_frame(path: str | Path, frame: FaceFrame) -> None:
    Path(path).write_text(serialize_frame(frame), encoding="utf-8")


@dataclass(frozen=True)
class FrameSequence:
    """Ordered frames of one recording plus optional metadata.

    ``interocular_ref`` fixes the normalization length for motion measures;
    when absent, callers fall back to the first frame's own eye distance.
    """

    frames: tuple[FaceFrame, ...]
    timestamps: tuple[float, ...] | None = None
    interocular_ref: float | None = None

    def __post_init__(self):
        if not self.frames:
            raise SchemaError("a sequence needs at least one frame")
        if self.timestamps is not None:
            if len(self.timestamps) != len(self.frames):
                raise SchemaError(
                    f"{len(self.timestamps)} timestamps for {len(self.frames)} frames"
                )
            if any(b <= a for a, b in zip(self.timestamps, self.timestamps[1:])):
                raise SchemaError("timestamps must be strictly increasing")
        if self.interocular_ref is not None and self.interocular_ref <= 0:
            raise SchemaError(
                f"interocular_ref must be positive, got {self.interocular_ref}"
            )

    def __len__(self) -> int:
        return len(self.frames)

    def reference_interocular(self) -> float:
        if self.interocular_ref is not None:
            return self.interocular_ref
        return interocular_distance(self.frames[0])


_FRAME_FILE = re.compile(r"frame_(\d+)\.csv$")


def load_sequence(directory: str | Path) -> FrameSequence:
    """Read ``frame_<i>.csv`` files (sorted by index) and an optional
    ``sequence.ini`` holding ``interocular_ref`` and ``timestamps``."""
    directory = Path(directory)
    found = []
    for p in directory.iterdir():
        m = _FRAME_FILE.fullmatch(p.name)
        if m:
            found.append((int(m.group(1)), p))
    if not found:
        raise SchemaError(f"no frame_<i>.csv files in {directory}")
    found.sort()
    frames = []
    for _, p in found:
        try:
            frames.append(load_frame(p))
        except FrameParseError as exc:
            raise FrameParseError(f"{p.name}: {exc}") from None

    timestamps = None
    ref = None
    ini = directory / "sequence.ini"
    if ini.exists():
        cp = configparser.ConfigParser()
        cp.read(ini)
        if cp.has_section("sequence"):
            if cp.has_option("sequence", "interocular_ref"):
                ref = cp.getfloat("sequence", "interocular_ref")
                if ref <= 0:
                    raise SchemaError(f"interocular_ref must be positive, got {ref}")
            if cp.has_option("sequence", "timestamps"):
                raw = cp.get("sequence", "timestamps")
                timestamps = tuple(float(t) for t in raw.split(",") if t.strip())
    return FrameSequence(tuple(frames), timestamps=timestamps, interocular_ref=ref)


def save_sequence(directory: str | Path, seq: FrameSequence) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for i, frame in enumerate(seq.frames):
        save_frame(directory / f"frame_{i}.csv", frame)
    if seq.timestamps is not None or seq.interocular_ref is not None:
        lines = ["[sequence]"]
        if seq.interocular_ref is not None:
            lines.append(f"interocular_ref = {_format_float(seq.interocular_ref)}")
        if seq.timestamps is not None:
            lines.append("timestamps = " + ",".join(_format_float(t) for t in seq.timestamps))
        (directory / "sequence.ini").write_text("\n".join(lines) + "\n", encoding="utf-8")
