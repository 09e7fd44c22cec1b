"""Netpbm I/O, luma, smoothing, edge detection, and cropping."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dface.errors import DomainError, ImageFormatError, RasterShapeError
from dface.raster import (
    RasterImage,
    Rect,
    bounding_rect,
    canny_edges,
    crop,
    gaussian_smooth,
    pad_to_square,
    read_image,
    to_grayscale,
    write_image,
)


def gray(arr) -> RasterImage:
    return RasterImage.from_array(np.asarray(arr, dtype=np.uint8))


def test_raster_validation():
    with pytest.raises(RasterShapeError):
        RasterImage(0, 4, 1, b"")
    with pytest.raises(RasterShapeError):
        RasterImage(2, 2, 2, b"\x00" * 8)
    with pytest.raises(RasterShapeError):
        RasterImage(2, 2, 1, b"\x00" * 5)
    with pytest.raises(RasterShapeError):
        RasterImage.from_array(np.zeros((2, 2), dtype=np.float64))
    with pytest.raises(RasterShapeError):
        RasterImage.from_array(np.full((2, 2), 300, dtype=np.int64))


def test_from_array_round_trip():
    arr = np.arange(12, dtype=np.uint8).reshape(3, 4)
    img = RasterImage.from_array(arr)
    assert (img.width, img.height, img.channels) == (4, 3, 1)
    assert np.array_equal(img.array(), arr)
    rgb = np.arange(24, dtype=np.uint8).reshape(2, 4, 3)
    img3 = RasterImage.from_array(rgb)
    assert img3.channels == 3
    assert np.array_equal(img3.array(), rgb)


def test_write_read_gray_round_trip():
    img = gray(np.arange(20, dtype=np.uint8).reshape(4, 5))
    data = write_image(img)
    assert data.startswith(b"P5\n5 4\n255\n")
    back = read_image(data)
    assert back == img
    assert write_image(back) == data


def test_write_read_color_round_trip():
    rng = np.random.default_rng(0)
    img = RasterImage.from_array(rng.integers(0, 256, (3, 7, 3), dtype=np.uint8))
    data = write_image(img)
    assert data.startswith(b"P6\n7 3\n255\n")
    assert read_image(data) == img


def test_read_accepts_header_comments():
    data = b"P5 # magic\n# a full comment line\n2 2 # size\n255\n" + bytes(4)
    img = read_image(data)
    assert (img.width, img.height) == (2, 2)


def test_read_accepts_minimal_whitespace():
    data = b"P5 2 2 255 " + bytes(4)
    assert read_image(data).samples == bytes(4)


def test_read_payload_may_contain_anything():
    # payload bytes that look like whitespace or '#' must pass through
    payload = b"\n# \x23"
    img = read_image(b"P5\n2 2\n255\n" + payload)
    assert img.samples == payload


def test_read_rejects_bad_magic():
    with pytest.raises(ImageFormatError):
        read_image(b"P4\n2 2\n255\n" + bytes(4))
    with pytest.raises(ImageFormatError):
        read_image(b"")


def test_read_rejects_bad_maxval():
    with pytest.raises(ImageFormatError) as exc:
        read_image(b"P5\n2 2\n65535\n" + bytes(8))
    assert "maxval" in str(exc.value)


def test_read_rejects_truncated_payload():
    with pytest.raises(ImageFormatError) as exc:
        read_image(b"P5\n2 2\n255\n" + bytes(3))
    assert "truncated" in str(exc.value)


def test_read_rejects_trailing_bytes():
    with pytest.raises(ImageFormatError) as exc:
        read_image(b"P5\n2 2\n255\n" + bytes(5))
    assert "trailing" in str(exc.value)


def test_read_rejects_non_numeric_header():
    with pytest.raises(ImageFormatError):
        read_image(b"P5\ntwo 2\n255\n" + bytes(4))


def test_read_rejects_missing_payload():
    with pytest.raises(ImageFormatError):
        read_image(b"P5\n2 2\n255")


bytes_strategy = st.binary(min_size=1, max_size=64)


@given(st.integers(1, 8), st.integers(1, 8), st.integers(0, 2 ** 32 - 1))
def test_round_trip_property(w, h, seed):
    rng = np.random.default_rng(seed)
    img = RasterImage.from_array(rng.integers(0, 256, (h, w), dtype=np.uint8))
    assert read_image(write_image(img)) == img


def test_luma_values():
    rgb = np.array(
        [[[255, 0, 0], [0, 255, 0], [0, 0, 255], [255, 255, 255], [0, 0, 0]]],
        dtype=np.uint8,
    )
    lum = to_grayscale(RasterImage.from_array(rgb))
    assert lum.channels == 1
    # floor(0.299*255 + 0.5) etc.
    assert list(lum.samples) == [76, 150, 29, 255, 0]


def test_luma_rounding_half_up():
    # 0.299*5 = 1.495 -> 1; 0.299*9 = 2.691 -> 3
    rgb = np.array([[[5, 0, 0], [9, 0, 0]]], dtype=np.uint8)
    assert list(to_grayscale(RasterImage.from_array(rgb)).samples) == [1, 3]


def test_luma_noop_on_gray():
    img = gray([[1, 2], [3, 4]])
    assert to_grayscale(img) is img


def test_smooth_constant_is_fixed_point():
    img = gray(np.full((5, 5), 77))
    assert gaussian_smooth(img, 1.4) == img


def test_smooth_preserves_mass_of_impulse():
    arr = np.zeros((15, 15), dtype=np.uint8)
    arr[7, 7] = 255
    out = gaussian_smooth(gray(arr), 1.0)
    total = int(out.array().astype(np.int64).sum())
    # rounding may shift total mass by at most half a count per pixel
    assert abs(total - 255) <= out.width * out.height / 2
    assert out.array()[7, 7] == out.array().max()


def test_smooth_validations():
    with pytest.raises(DomainError):
        gaussian_smooth(gray([[0]]), 0.0)
    rgb = RasterImage.from_array(np.zeros((2, 2, 3), dtype=np.uint8))
    with pytest.raises(RasterShapeError):
        gaussian_smooth(rgb, 1.0)


def _reflect_index(i: int, n: int) -> int:
    # half-sample symmetric border, period 2n
    i %= 2 * n
    return i if i < n else 2 * n - 1 - i


def _smooth_oracle(arr: np.ndarray, sigma: float) -> np.ndarray:
    """Direct 2-D convolution against the separable product kernel with
    symmetric-border indexing, rounded half away from zero."""
    radius = math.ceil(3.0 * sigma)
    xs = np.arange(-radius, radius + 1, dtype=np.float64)
    taps = np.exp(-(xs ** 2) / (2.0 * sigma * sigma))
    taps /= taps.sum()
    h, w = arr.shape
    out = np.zeros((h, w), dtype=np.float64)
    for y in range(h):
        for x in range(w):
            acc = 0.0
            for dy in range(-radius, radius + 1):
                for dx in range(-radius, radius + 1):
                    sy = _reflect_index(y + dy, h)
                    sx = _reflect_index(x + dx, w)
                    acc += taps[dy + radius] * taps[dx + radius] * arr[sy, sx]
            out[y, x] = acc
    return np.floor(out + 0.5).clip(0, 255).astype(np.uint8)


def test_smooth_matches_direct_convolution_oracle():
    rng = np.random.default_rng(3)
    arr = rng.integers(0, 256, (9, 7), dtype=np.uint8)
    got = gaussian_smooth(gray(arr), 0.8).array()
    want = _smooth_oracle(arr.astype(np.float64), 0.8)
    assert np.array_equal(got, want)


def test_smooth_kernel_wider_than_image():
    # radius far exceeds the image; symmetric wrap keeps this well defined
    arr = np.array([[0, 255], [255, 0]], dtype=np.uint8)
    out = gaussian_smooth(gray(arr), 5.0)
    got = out.array()
    want = _smooth_oracle(arr.astype(np.float64), 5.0)
    assert np.array_equal(got, want)
    # heavy smoothing pulls everything to the mean
    assert np.all(np.abs(got.astype(int) - 127) <= 2)


def test_canny_constant_image_has_no_edges():
    out = canny_edges(gray(np.full((10, 10), 200)), 0.1, 0.3)
    assert not any(out.samples)


def test_canny_vertical_step_single_column():
    arr = np.zeros((16, 16), dtype=np.uint8)
    arr[:, 8:] = 255
    out = canny_edges(gray(arr), 0.1, 0.3).array()
    cols = sorted(set(np.nonzero(out)[1]))
    assert len(cols) == 1
    assert abs(cols[0] - 8) <= 1
    rows = set(np.nonzero(out)[0])
    # every non-border row carries the edge
    assert rows == set(range(1, 15))


def test_canny_horizontal_step_single_row():
    arr = np.zeros((16, 16), dtype=np.uint8)
    arr[8:, :] = 255
    out = canny_edges(gray(arr), 0.1, 0.3).array()
    rows = sorted(set(np.nonzero(out)[0]))
    assert len(rows) == 1
    assert abs(rows[0] - 8) <= 1


def test_canny_square_outline_is_closed():
    arr = np.zeros((24, 24), dtype=np.uint8)
    arr[8:16, 8:16] = 255
    out = canny_edges(gray(arr), 0.08, 0.2, sigma=1.0).array()
    ys, xs = np.nonzero(out)
    assert ys.size > 0
    # the outline spans the square and closes around it: every row of the
    # ring has pixels on both sides of center, and likewise every column
    assert xs.min() <= 8 and xs.max() >= 15
    assert ys.min() <= 8 and ys.max() >= 15
    cx, cy = (xs.min() + xs.max()) / 2, (ys.min() + ys.max()) / 2
    for y in range(ys.min(), ys.max() + 1):
        row = xs[ys == y]
        assert row.size and row.min() <= cx <= row.max()
    for x in range(xs.min(), xs.max() + 1):
        col = ys[xs == x]
        assert col.size and col.min() <= cy <= col.max()


def test_canny_output_is_binary_with_clear_border():
    rng = np.random.default_rng(11)
    arr = rng.integers(0, 256, (12, 12), dtype=np.uint8)
    out = canny_edges(gray(arr), 0.2, 0.5).array()
    assert set(np.unique(out)) <= {0, 255}
    assert not out[0, :].any() and not out[-1, :].any()
    assert not out[:, 0].any() and not out[:, -1].any()


def test_canny_threshold_validation():
    img = gray(np.zeros((4, 4)))
    for low, high in [(0.0, 0.5), (0.5, 0.2), (0.2, 1.5), (-0.1, 0.3)]:
        with pytest.raises(DomainError):
            canny_edges(img, low, high)


def test_canny_hysteresis_promotes_connected_weak_pixels():
    # a bright step fading to a dimmer one: the dim section survives only
    # because it touches the strong section
    arr = np.zeros((20, 16), dtype=np.uint8)
    arr[:10, 8:] = 255
    arr[10:, 8:] = 120
    strict = canny_edges(gray(arr), 0.55, 0.6, sigma=1.0).array()
    lenient = canny_edges(gray(arr), 0.2, 0.6, sigma=1.0).array()
    assert lenient.sum() > strict.sum()
    # the promoted pixels connect to the strong ones
    rows_lenient = set(np.nonzero(lenient)[0])
    assert max(rows_lenient) > 10


def test_bounding_rect_simple():
    arr = np.zeros((8, 9), dtype=np.uint8)
    arr[2, 3] = 255
    arr[5, 6] = 255
    assert bounding_rect(gray(arr)) == Rect(3, 2, 7, 6)


def test_bounding_rect_empty():
    with pytest.raises(DomainError):
        bounding_rect(gray(np.zeros((4, 4))))


def test_bounding_rect_matches_brute_force_sprinkles():
    rng = np.random.default_rng(23)
    for _ in range(50):
        h, w = int(rng.integers(2, 20)), int(rng.integers(2, 20))
        arr = np.zeros((h, w), dtype=np.uint8)
        count = int(rng.integers(1, 6))
        pts = [(int(rng.integers(0, h)), int(rng.integers(0, w))) for _ in range(count)]
        for y, x in pts:
            arr[y, x] = 255
        r = bounding_rect(gray(arr))
        xs = [x for _, x in pts]
        ys = [y for y, _ in pts]
        assert (r.x0, r.y0, r.x1, r.y1) == (min(xs), min(ys), max(xs) + 1, max(ys) + 1)


def test_crop_hand_picked():
    arr = np.arange(16, dtype=np.uint8).reshape(4, 4)
    out = crop(gray(arr), Rect(1, 1, 3, 3))
    assert np.array_equal(out.array(), np.array([[5, 6], [9, 10]], dtype=np.uint8))


def test_crop_full_image_is_identity():
    img = gray(np.arange(12).reshape(3, 4))
    assert crop(img, Rect(0, 0, 4, 3)) == img


def test_crop_out_of_bounds():
    img = gray(np.zeros((3, 4)))
    with pytest.raises(RasterShapeError):
        crop(img, Rect(0, 0, 5, 3))


def test_crop_color():
    rgb = np.arange(36, dtype=np.uint8).reshape(3, 4, 3)
    out = crop(RasterImage.from_array(rgb), Rect(1, 0, 3, 2))
    assert np.array_equal(out.array(), rgb[0:2, 1:3])


def test_rect_validation_and_csv():
    with pytest.raises(RasterShapeError):
        Rect(2, 0, 2, 5)
    r = Rect(1, 2, 4, 7)
    assert (r.width, r.height) == (3, 5)
    assert r.csv() == "1,2,4,7"


def test_pad_to_square_wide():
    img = gray(np.ones((3, 5)))
    out, (left, top) = pad_to_square(img, fill=9)
    assert (out.width, out.height) == (5, 5)
    assert (left, top) == (0, 1)
    arr = out.array()
    assert np.all(arr[0] == 9) and np.all(arr[4] == 9)
    assert np.array_equal(arr[1:4], np.ones((3, 5), dtype=np.uint8))


def test_pad_to_square_tall_odd_split():
    img = gray(np.zeros((5, 2)))
    out, (left, top) = pad_to_square(img, fill=1)
    assert out.is_square and out.width == 5
    # 3 columns of padding: 1 left, 2 right
    assert (left, top) == (1, 0)
    arr = out.array()
    assert np.all(arr[:, 0] == 1) and np.all(arr[:, 3:] == 1)
    assert np.all(arr[:, 1:3] == 0)


def test_pad_to_square_noop():
    img = gray(np.zeros((4, 4)))
    out, offset = pad_to_square(img)
    assert out is img and offset == (0, 0)


def test_pad_to_square_bad_fill():
    with pytest.raises(DomainError):
        pad_to_square(gray(np.zeros((2, 3))), fill=256)
