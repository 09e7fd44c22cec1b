"""Facial midline estimation, mirror geometry, and asymmetry scores.

The midline is fit by total least squares through the midpoints of the
left/right key point pairs: on a perfectly mirrored face every midpoint
lies on the axis, so the fit is exact.  All scores are normalized by the
interocular distance, which makes them invariant under rigid motion and
uniform scaling of the whole frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateFaceError,
    InsufficientFramesError,
    InsufficientPairsError,
    MissingPointError,
    SchemaError,
    UnrecoverablePointError,
)
from .face import (
    LATERAL_PAIRS,
    MIDLINE_IDS,
    FaceFrame,
    FrameSequence,
    Region,
    counterpart,
    interocular_distance,
)
from .formatting import fmt

__all__ = [
    "MidlineAxis",
    "AsymmetryReport",
    "estimate_midline",
    "reflect_about",
    "structural_asymmetry",
    "movement_asymmetry",
    "reconstruct_occluded",
    "asymmetry_report",
    "report_csv",
]

MIN_PAIRS = 3

_REGION_ORDER = (Region.EYEBROW, Region.EYE, Region.LIP_CORNER, Region.LIP_MIDDLE)


@dataclass(frozen=True)
class MidlineAxis:
    """A line through ``point`` along unit vector ``direction`` (oriented
    with non-negative y so "down the face" is consistent in raster
    coordinates).  ``fit_residual`` is the RMS distance of the pair
    midpoints to the line, normalized by interocular distance."""

    point: tuple[float, float]
    direction: tuple[float, float]
    fit_residual: float
    degenerate: bool = False

    def __post_init__(self):
        dx, dy = self.direction
        if abs(math.hypot(dx, dy) - 1.0) > 1e-12:
            raise SchemaError("axis direction must be a unit vector")

    def offset(self, p: tuple[float, float]) -> float:
        """Signed perpendicular distance of ``p`` from the line."""
        dx, dy = self.direction
        vx, vy = p[0] - self.point[0], p[1] - self.point[1]
        return vx * dy - vy * dx

    def distance(self, p: tuple[float, float]) -> float:
        return abs(self.offset(p))


def estimate_midline(frame: FaceFrame) -> MidlineAxis:
    """Total-least-squares line through the midpoints of all complete
    left/right pairs.

    Needs at least three complete pairs.  If every midpoint coincides the
    fit is underdetermined and a vertical axis through that point is
    returned, flagged degenerate.
    """
    mids = []
    for left, right in LATERAL_PAIRS:
        lp, rp = frame.point(left), frame.point(right)
        if lp.present and rp.present:
            mids.append(((lp.x + rp.x) / 2.0, (lp.y + rp.y) / 2.0))
    if len(mids) < MIN_PAIRS:
        raise InsufficientPairsError(
            f"midline fit needs >= {MIN_PAIRS} complete pairs, got {len(mids)}"
        )
    pts = np.asarray(mids, dtype=float)
    centroid = pts.mean(axis=0)
    centered = pts - centroid
    anchor = (float(centroid[0]), float(centroid[1]))
    if not centered.any():
        return MidlineAxis(anchor, (0.0, 1.0), 0.0, degenerate=True)

    # Principal axis of the midpoint scatter; eigh is deterministic and the
    # larger eigenvalue comes last.
    cov = centered.T @ centered
    _, vecs = np.linalg.eigh(cov)
    dx, dy = float(vecs[0, 1]), float(vecs[1, 1])
    if dy < 0.0 or (dy == 0.0 and dx < 0.0):
        dx, dy = -dx, -dy
    perp = centered[:, 0] * dy - centered[:, 1] * dx
    rms = float(np.sqrt(np.mean(perp ** 2)))
    return MidlineAxis(anchor, (dx, dy), rms / _normalizer(frame))


def reflect_about(axis: MidlineAxis, p: tuple[float, float]) -> tuple[float, float]:
    """Mirror image of ``p`` across the axis line (Householder form)."""
    ax, ay = axis.point
    dx, dy = axis.direction
    vx, vy = p[0] - ax, p[1] - ay
    t = vx * dx + vy * dy
    return (2.0 * t * dx - vx + ax, 2.0 * t * dy - vy + ay)


def _normalizer(frame: FaceFrame) -> float:
    """Interocular distance, or (when eye points are occluded) the mean
    span of the complete pairs as a stand-in length scale."""
    try:
        return interocular_distance(frame)
    except MissingPointError:
        spans = []
        for left, right in LATERAL_PAIRS:
            lp, rp = frame.point(left), frame.point(right)
            if lp.present and rp.present:
                spans.append(math.hypot(lp.x - rp.x, lp.y - rp.y))
        if spans:
            mean = sum(spans) / len(spans)
            if mean > 0.0:
                return mean
        raise DegenerateFaceError("no usable normalization length") from None


def _structural_terms(frame: FaceFrame, axis: MidlineAxis) -> list[tuple[Region, float]]:
    """Unnormalized mismatch terms: per complete pair, the distance between
    the reflected left point and the right point; per present midline
    point, its distance to the axis."""
    terms = []
    for left, right in LATERAL_PAIRS:
        lp, rp = frame.point(left), frame.point(right)
        if lp.present and rp.present:
            mx, my = reflect_about(axis, (lp.x, lp.y))
            terms.append((lp.region, math.hypot(mx - rp.x, my - rp.y)))
    for pid in MIDLINE_IDS:
        mp = frame.point(pid)
        if mp.present:
            terms.append((mp.region, axis.distance((mp.x, mp.y))))
    return terms


def structural_asymmetry(frame: FaceFrame, axis: MidlineAxis | None = None) -> float:
    """Mean mismatch between each side and the mirror of the other,
    normalized by interocular distance; exactly 0 on a mirrored face."""
    if axis is None:
        axis = estimate_midline(frame)
    terms = _structural_terms(frame, axis)
    if not any(region is not Region.LIP_MIDDLE for region, _ in terms):
        raise InsufficientPairsError("structural score needs at least one complete pair")
    return (sum(t for _, t in terms) / len(terms)) / _normalizer(frame)


def _movement_terms(
    seq: FrameSequence, axes: list[MidlineAxis]
) -> list[tuple[Region, float]]:
    terms = []
    for t in range(len(seq.frames) - 1):
        a, b = seq.frames[t], seq.frames[t + 1]
        for left, right in LATERAL_PAIRS:
            la, lb = a.point(left), b.point(left)
            ra, rb = a.point(right), b.point(right)
            if not (la.present and lb.present and ra.present and rb.present):
                continue
            d_left = math.hypot(lb.x - la.x, lb.y - la.y)
            max_, may = reflect_about(axes[t], (ra.x, ra.y))
            mbx, mby = reflect_about(axes[t + 1], (rb.x, rb.y))
            d_right = math.hypot(mbx - max_, mby - may)
            terms.append((la.region, abs(d_left - d_right)))
    return terms


def movement_asymmetry(
    seq: FrameSequence,
    axes: list[MidlineAxis] | None = None,
    reference: float | None = None,
) -> float:
    """Mean absolute difference between left displacement magnitudes and
    mirrored right displacement magnitudes over consecutive frames,
    normalized by the sequence's reference interocular distance.

    Mirroring uses each frame's own axis, so the score tracks genuine
    one-sided motion rather than head translation.
    """
    if len(seq.frames) < 2:
        raise InsufficientFramesError(
            f"movement score needs >= 2 frames, got {len(seq.frames)}"
        )
    if axes is None:
        axes = [estimate_midline(f) for f in seq.frames]
    if len(axes) != len(seq.frames):
        raise SchemaError(f"{len(axes)} axes for {len(seq.frames)} frames")
    terms = _movement_terms(seq, axes)
    if not terms:
        raise InsufficientPairsError("movement score needs at least one tracked pair")
    ref = reference if reference is not None else seq.reference_interocular()
    return (sum(t for _, t in terms) / len(terms)) / ref


def reconstruct_occluded(frame: FaceFrame, axis: MidlineAxis | None = None) -> FaceFrame:
    """Fill occluded lateral points with the mirror image of their present
    counterparts.

    Reconstructed points carry a flag so downstream consumers can tell
    measured from inferred coordinates.  A point whose counterpart is also
    missing, or a missing midline point, cannot be recovered.
    """
    if axis is None:
        axis = estimate_midline(frame)
    lost = []
    fixable = []
    for p in frame.points:
        if p.present:
            continue
        if p.point_id in MIDLINE_IDS:
            lost.append(p.point_id)
            continue
        partner = frame.point(counterpart(p.point_id))
        if partner.present:
            fixable.append((p.point_id, partner))
        else:
            lost.append(p.point_id)
    if lost:
        raise UnrecoverablePointError(lost)
    if not fixable:
        return frame
    updates = {}
    for pid, partner in fixable:
        x, y = reflect_about(axis, (partner.x, partner.y))
        updates[pid] = (x, y)
    return frame.with_coords(updates, reconstructed=True)


@dataclass(frozen=True)
class AsymmetryReport:
    """Aggregate scores for one recording; per_region holds the same two
    scores restricted to each region's points."""

    structural: float
    movement: float
    per_region: dict[Region, tuple[float, float]]
    frames_used: int


def _aggregate(terms: list[tuple[Region, float]], norm: float) -> dict[Region, float]:
    out = {}
    for region in _REGION_ORDER:
        vals = [t for r, t in terms if r is region]
        out[region] = (sum(vals) / len(vals)) / norm if vals else 0.0
    return out


def asymmetry_report(
    seq: FrameSequence, axes: list[MidlineAxis] | None = None
) -> AsymmetryReport:
    """Whole-sequence summary: structural score averaged over frames,
    movement score over consecutive steps, split by region."""
    if axes is None:
        axes = [estimate_midline(f) for f in seq.frames]
    structural_vals = []
    struct_region_acc = {region: [] for region in _REGION_ORDER}
    for frame, axis in zip(seq.frames, axes):
        norm = _normalizer(frame)
        terms = _structural_terms(frame, axis)
        if not terms:
            raise InsufficientPairsError("structural score needs at least one complete pair")
        structural_vals.append((sum(t for _, t in terms) / len(terms)) / norm)
        for region, value in _aggregate(terms, norm).items():
            struct_region_acc[region].append(value)

    if len(seq.frames) >= 2:
        ref = seq.reference_interocular()
        mv_terms = _movement_terms(seq, axes)
        movement = (sum(t for _, t in mv_terms) / len(mv_terms)) / ref if mv_terms else 0.0
        mv_region = _aggregate(mv_terms, ref)
    else:
        movement = 0.0
        mv_region = {region: 0.0 for region in _REGION_ORDER}

    per_region = {
        region: (sum(struct_region_acc[region]) / len(struct_region_acc[region]),
                 mv_region[region])
        for region in _REGION_ORDER
    }
    return AsymmetryReport(
        structural=sum(structural_vals) / len(structural_vals),
        movement=movement,
        per_region=per_region,
        frames_used=len(seq.frames),
    )


def report_csv(report: AsymmetryReport) -> str:
    lines = ["metric,region,value"]
    lines.append(f"structural,all,{fmt(report.structural)}")
    lines.append(f"movement,all,{fmt(report.movement)}")
    for region in _REGION_ORDER:
        s, m = report.per_region[region]
        lines.append(f"structural,{region.value},{fmt(s)}")
        lines.append(f"movement,{region.value},{fmt(m)}")
    lines.append(f"frames_used,all,{report.frames_used}")
    return "\n".join(lines) + "\n"
