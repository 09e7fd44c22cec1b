"""Bit-exact raster stack: netpbm I/O, luma, Gaussian smoothing, Canny
edges, and rectangle cropping.

Everything here is deterministic down to the byte.  Convolutions accumulate
in double precision with a fixed tap order and round once, half away from
zero, at the end; file round-trips reproduce input bytes exactly.  Only
binary PGM (P5) and PPM (P6) with maxval 255 are supported.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from math import ceil

import numpy as np

from .errors import DomainError, ImageFormatError, RasterShapeError
from .formatting import fmt  # noqa: F401  (re-exported alongside rect_csv helpers)

__all__ = [
    "RasterImage",
    "Rect",
    "read_image",
    "write_image",
    "to_grayscale",
    "gaussian_smooth",
    "canny_edges",
    "bounding_rect",
    "crop",
    "pad_to_square",
]


@dataclass(frozen=True)
class RasterImage:
    """Immutable 8-bit image; ``samples`` is the row-major payload, one or
    three bytes per pixel."""

    width: int
    height: int
    channels: int
    samples: bytes

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise RasterShapeError(f"bad dimensions {self.width}x{self.height}")
        if self.channels not in (1, 3):
            raise RasterShapeError(f"channels must be 1 or 3, got {self.channels}")
        expect = self.width * self.height * self.channels
        if len(self.samples) != expect:
            raise RasterShapeError(
                f"payload holds {len(self.samples)} bytes, geometry needs {expect}"
            )

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "RasterImage":
        a = np.asarray(arr)
        if a.ndim == 2:
            channels = 1
        elif a.ndim == 3 and a.shape[2] == 3:
            channels = 3
        else:
            raise RasterShapeError(f"expected HxW or HxWx3 array, got shape {a.shape}")
        if a.dtype != np.uint8:
            if np.issubdtype(a.dtype, np.floating):
                raise RasterShapeError("float arrays must be rounded before wrapping")
            if a.min(initial=0) < 0 or a.max(initial=0) > 255:
                raise RasterShapeError("sample values outside [0, 255]")
            a = a.astype(np.uint8)
        h, w = a.shape[0], a.shape[1]
        return cls(w, h, channels, np.ascontiguousarray(a).tobytes())

    def array(self) -> np.ndarray:
        """Read-only uint8 view, shape (h, w) or (h, w, 3)."""
        a = np.frombuffer(self.samples, dtype=np.uint8)
        if self.channels == 1:
            return a.reshape(self.height, self.width)
        return a.reshape(self.height, self.width, self.channels)

    @property
    def is_square(self) -> bool:
        return self.width == self.height


@dataclass(frozen=True)
class Rect:
    """Pixel rectangle, inclusive x0/y0, exclusive x1/y1."""

    x0: int
    y0: int
    x1: int
    y1: int

    def __post_init__(self):
        if self.x0 >= self.x1 or self.y0 >= self.y1:
            raise RasterShapeError(
                f"degenerate rectangle ({self.x0},{self.y0},{self.x1},{self.y1})"
            )

    @property
    def width(self) -> int:
        return self.x1 - self.x0

    @property
    def height(self) -> int:
        return self.y1 - self.y0

    def csv(self) -> str:
        return f"{self.x0},{self.y0},{self.x1},{self.y1}"


_WHITESPACE = b" \t\r\n\v\f"


def _header_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """Read ``count`` whitespace-separated header tokens, honoring
    ``#`` comments; returns the tokens and the offset just past the single
    whitespace byte that terminates the last one."""
    tokens: list[bytes] = []
    i, n = 0, len(data)
    while len(tokens) < count:
        while i < n:
            if data[i] in _WHITESPACE:
                i += 1
            elif data[i] == 0x23:  # '#' comment runs to end of line
                while i < n and data[i] != 0x0A:
                    i += 1
            else:
                break
        start = i
        while i < n and data[i] not in _WHITESPACE:
            i += 1
        if start == i:
            raise ImageFormatError("unexpected end of header")
        tokens.append(data[start:i])
    if i >= n:
        raise ImageFormatError("missing pixel payload")
    return tokens, i + 1  # exactly one whitespace byte precedes the payload


def read_image(data: bytes) -> RasterImage:
    """Decode binary PGM (P5) or PPM (P6), maxval 255, exact payload."""
    if len(data) < 2:
        raise ImageFormatError("not a netpbm file")
    magic = data[:2]
    if magic == b"P5":
        channels = 1
    elif magic == b"P6":
        channels = 3
    else:
        raise ImageFormatError(f"unsupported magic {magic!r} (want P5 or P6)")
    tokens, offset = _header_tokens(data[2:], 3)
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError:
        raise ImageFormatError("non-numeric header field") from None
    if width < 1 or height < 1:
        raise ImageFormatError(f"bad dimensions {width}x{height}")
    if maxval != 255:
        raise ImageFormatError(f"unsupported maxval {maxval} (want 255)")
    payload = data[2 + offset :]
    expect = width * height * channels
    if len(payload) < expect:
        raise ImageFormatError(
            f"truncated payload: need {expect} bytes, have {len(payload)}"
        )
    if len(payload) > expect:
        raise ImageFormatError("trailing data after pixel payload")
    return RasterImage(width, height, channels, payload)


def write_image(img: RasterImage) -> bytes:
    magic = b"P5" if img.channels == 1 else b"P6"
    header = magic + b"\n%d %d\n255\n" % (img.width, img.height)
    return header + img.samples


def to_grayscale(img: RasterImage) -> RasterImage:
    """Integer luma 0.299 R + 0.587 G + 0.114 B; a no-op on gray input."""
    if img.channels == 1:
        return img
    rgb = img.array().astype(np.float64)
    luma = 0.299 * rgb[:, :, 0] + 0.587 * rgb[:, :, 1] + 0.114 * rgb[:, :, 2]
    return RasterImage.from_array(np.floor(luma + 0.5).astype(np.uint8))


def _gaussian_taps(sigma: float) -> np.ndarray:
    radius = ceil(3.0 * sigma)
    xs = np.arange(-radius, radius + 1, dtype=np.float64)
    taps = np.exp(-(xs ** 2) / (2.0 * sigma * sigma))
    return taps / taps.sum()


def _smooth_float(plane: np.ndarray, sigma: float) -> np.ndarray:
    """Separable Gaussian on a float plane, symmetric-reflect border,
    fixed left-to-right tap order."""
    taps = _gaussian_taps(sigma)
    radius = len(taps) // 2
    h, w = plane.shape
    padded = np.pad(plane, radius, mode="symmetric")
    rows = np.zeros((h + 2 * radius, w), dtype=np.float64)
    for i, t in enumerate(taps):
        rows += t * padded[:, i : i + w]
    out = np.zeros((h, w), dtype=np.float64)
    for i, t in enumerate(taps):
        out += t * rows[i : i + h, :]
    return out


def gaussian_smooth(img: RasterImage, sigma: float) -> RasterImage:
    if img.channels != 1:
        raise RasterShapeError("smoothing expects a single-channel image")
    if sigma <= 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    smooth = _smooth_float(img.array().astype(np.float64), sigma)
    return RasterImage.from_array(np.floor(smooth + 0.5).clip(0, 255).astype(np.uint8))


_SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.float64)
_SOBEL_Y = _SOBEL_X.T

# Neighbor step (drow, dcol) per gradient-direction bin: 0 horizontal
# gradient, 1 diagonal, 2 vertical, 3 anti-diagonal.
_NMS_STEPS = ((0, 1), (1, 1), (1, 0), (1, -1))


def _convolve3(plane: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Valid 3x3 correlation embedded back at full size, zero border."""
    h, w = plane.shape
    out = np.zeros((h, w), dtype=np.float64)
    if h < 3 or w < 3:
        return out
    acc = np.zeros((h - 2, w - 2), dtype=np.float64)
    for dy in range(3):
        for dx in range(3):
            acc += kernel[dy, dx] * plane[dy : dy + h - 2, dx : dx + w - 2]
    out[1 : h - 1, 1 : w - 1] = acc
    return out


def canny_edges(
    img: RasterImage, low: float, high: float, sigma: float = 1.4
) -> RasterImage:
    """Classic edge pipeline: smooth, Sobel, non-maximum suppression,
    double-threshold hysteresis.

    ``low`` and ``high`` are fractions of the maximum gradient magnitude.
    When two neighbors along the gradient tie exactly, the earlier pixel in
    scan order survives, so a symmetric step yields a single edge column.
    Output is binary {0, 255} with a one-pixel zero border.
    """
    if img.channels != 1:
        raise RasterShapeError("edge detection expects a single-channel image")
    if not (0.0 < low < high <= 1.0):
        raise DomainError(f"thresholds must satisfy 0 < low < high <= 1, got {low}, {high}")
    plane = _smooth_float(img.array().astype(np.float64), sigma)
    gx = _convolve3(plane, _SOBEL_X)
    gy = _convolve3(plane, _SOBEL_Y)
    mag = np.hypot(gx, gy)
    h, w = mag.shape

    angle = np.mod(np.arctan2(gy, gx), np.pi)
    bins = np.mod(np.round(angle / (np.pi / 4.0)).astype(np.int64), 4)

    keep = np.zeros((h, w), dtype=bool)
    for b, (dr, dc) in enumerate(_NMS_STEPS):
        rows = np.arange(max(1, dr), h - max(1, dr))
        cols = np.arange(max(1, abs(dc)), w - max(1, abs(dc)))
        if rows.size == 0 or cols.size == 0:
            continue
        rr, cc = np.meshgrid(rows, cols, indexing="ij")
        sel = bins[rr, cc] == b
        center = mag[rr, cc]
        before = mag[rr - dr, cc - dc]
        after = mag[rr + dr, cc + dc]
        keep[rr, cc] |= sel & (center > before) & (center >= after)

    peak = float(mag.max())
    if peak <= 0.0:
        return RasterImage.from_array(np.zeros((h, w), dtype=np.uint8))
    strong_t, weak_t = high * peak, low * peak
    strong = keep & (mag >= strong_t)
    weak = keep & (mag >= weak_t)

    # hysteresis: grow strong pixels through weak ones, 8-connected
    edges = np.zeros((h, w), dtype=bool)
    queue = deque(zip(*np.nonzero(strong)))
    edges[strong] = True
    while queue:
        r, c = queue.popleft()
        for dr in (-1, 0, 1):
            for dc in (-1, 0, 1):
                if dr == 0 and dc == 0:
                    continue
                nr, nc = r + dr, c + dc
                if 0 <= nr < h and 0 <= nc < w and weak[nr, nc] and not edges[nr, nc]:
                    edges[nr, nc] = True
                    queue.append((nr, nc))

    edges[0, :] = edges[-1, :] = False
    edges[:, 0] = edges[:, -1] = False
    return RasterImage.from_array(np.where(edges, 255, 0).astype(np.uint8))


def bounding_rect(edges: RasterImage) -> Rect:
    """Tightest rectangle containing every nonzero pixel."""
    if edges.channels != 1:
        raise RasterShapeError("bounding box expects a single-channel image")
    ys, xs = np.nonzero(edges.array())
    if ys.size == 0:
        raise DomainError("empty edge map has no bounding rectangle")
    return Rect(int(xs.min()), int(ys.min()), int(xs.max()) + 1, int(ys.max()) + 1)


def crop(img: RasterImage, r: Rect) -> RasterImage:
    if r.x0 < 0 or r.y0 < 0 or r.x1 > img.width or r.y1 > img.height:
        raise RasterShapeError(
            f"rectangle ({r.csv()}) exceeds image bounds {img.width}x{img.height}"
        )
    arr = img.array()
    return RasterImage.from_array(np.ascontiguousarray(arr[r.y0 : r.y1, r.x0 : r.x1]))


def pad_to_square(
    img: RasterImage, fill: int = 0
) -> tuple[RasterImage, tuple[int, int]]:
    """Center the image on a max(w, h) square canvas; returns the padded
    image and the (left, top) offset for remapping key points."""
    if not 0 <= fill <= 255:
        raise DomainError(f"fill sample must be in [0, 255], got {fill}")
    side = max(img.width, img.height)
    pad_x, pad_y = side - img.width, side - img.height
    left, top = pad_x // 2, pad_y // 2
    if pad_x == 0 and pad_y == 0:
        return img, (0, 0)
    arr = img.array()
    widths = ((top, pad_y - top), (left, pad_x - left))
    if img.channels == 3:
        widths = widths + ((0, 0),)
    padded = np.pad(arr, widths, mode="constant", constant_values=fill)
    return RasterImage.from_array(padded), (left, top)
