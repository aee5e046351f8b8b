"""Mask and image codec tests: types, luminance, PNG/PGM round trips."""

import io
import struct
import zlib

import numpy as np
import pytest
from PIL import Image

from strayeval import (
    BinaryMask,
    ChannelCountError,
    GrayImage,
    MaskDecodeError,
    ShapeMismatchError,
    decode_gray,
    decode_mask,
    encode_gray,
    encode_gray16,
    encode_mask,
    luminance,
)


def test_binary_mask_basics():
    m = BinaryMask(np.array([[1, 0], [0, 1]], dtype=bool))
    assert m.shape == (2, 2)
    assert m.height == 2 and m.width == 2
    assert m.count() == 2
    assert m == BinaryMask(np.eye(2, dtype=bool))
    assert m != BinaryMask(np.zeros((2, 2), dtype=bool))


def test_mask_is_immutable():
    m = BinaryMask(np.zeros((3, 3), dtype=bool))
    with pytest.raises(ValueError):
        m.bits[0, 0] = True


def test_mask_rejects_bad_shapes():
    with pytest.raises(ValueError):
        BinaryMask(np.zeros(4, dtype=bool))
    with pytest.raises(ValueError):
        GrayImage(np.zeros((2, 2, 3), dtype=np.uint8))


def test_shape_mismatch_message_uses_width_x_height():
    err = ShapeMismatchError((3, 5), (4, 7))
    assert "5x3" in str(err) and "7x4" in str(err)


def test_luminance_primaries():
    def one_pixel(r, g, b):
        return luminance(np.array([[[r, g, b]]], dtype=np.uint8)).values[0, 0]

    # floor(x + 0.5) on 0.299 R + 0.587 G + 0.114 B
    assert one_pixel(255, 0, 0) == 76
    assert one_pixel(0, 255, 0) == 150
    assert one_pixel(0, 0, 255) == 29
    assert one_pixel(255, 255, 255) == 255
    assert one_pixel(200, 200, 200) == 200


def test_luminance_passthrough_and_rejects():
    gray = np.arange(12, dtype=np.uint8).reshape(3, 4)
    assert np.array_equal(luminance(gray).values, gray)
    assert np.array_equal(luminance(gray[:, :, None]).values, gray)
    with pytest.raises(ValueError):
        luminance(np.zeros((2, 2, 2), dtype=np.uint8))
    with pytest.raises(ValueError):
        luminance(np.zeros((2, 2, 4), dtype=np.uint8))


def test_mask_png_round_trip():
    rng = np.random.default_rng(11)
    for _ in range(20):
        h, w = rng.integers(1, 40, size=2)
        bits = rng.random((h, w)) < rng.random()
        m = BinaryMask(bits)
        again = decode_mask(encode_mask(m))
        assert again == m


def test_gray_png_round_trip():
    rng = np.random.default_rng(12)
    img = GrayImage(rng.integers(0, 256, size=(23, 17), dtype=np.uint8))
    assert decode_gray(encode_gray(img)) == img


def test_encoded_mask_uses_0_and_255():
    m = BinaryMask(np.array([[True, False]]))
    arr = np.asarray(Image.open(io.BytesIO(encode_mask(m))))
    assert arr.tolist() == [[255, 0]]


def test_decode_mask_any_nonzero_is_true():
    img = GrayImage(np.array([[0, 1, 7, 255]], dtype=np.uint8))
    m = decode_mask(encode_gray(img))
    assert m.bits.tolist() == [[False, True, True, True]]


def test_encode_gray16_round_trips_via_pillow():
    values = np.array([[0, 1], [300, 65535]], dtype=np.int32)
    data = encode_gray16(values)
    arr = np.asarray(Image.open(io.BytesIO(data)))
    assert np.array_equal(arr, values)


def test_encoding_is_byte_deterministic():
    rng = np.random.default_rng(13)
    m = BinaryMask(rng.random((64, 64)) < 0.3)
    assert encode_mask(m) == encode_mask(m)


def test_decode_rejects_rgb_png():
    buf = io.BytesIO()
    Image.new("RGB", (4, 4), (10, 20, 30)).save(buf, "PNG")
    with pytest.raises(ChannelCountError) as exc_info:
        decode_mask(buf.getvalue())
    assert exc_info.value.channels == 3


def test_decode_rejects_16bit_png():
    data = encode_gray16(np.zeros((4, 4), dtype=np.int32))
    with pytest.raises(MaskDecodeError):
        decode_mask(data)


def test_decode_rejects_garbage_and_truncation():
    with pytest.raises(MaskDecodeError) as exc_info:
        decode_mask(b"not an image at all")
    assert exc_info.value.offset == 0
    valid = encode_mask(BinaryMask(np.ones((8, 8), dtype=bool)))
    with pytest.raises(MaskDecodeError):
        decode_mask(valid[: len(valid) // 2])


def test_decode_rejects_bad_crc():
    data = bytearray(encode_mask(BinaryMask(np.ones((8, 8), dtype=bool))))
    idat = data.find(b"IDAT")
    data[idat + 6] ^= 0xFF  # corrupt IDAT payload, CRC now wrong
    with pytest.raises(MaskDecodeError) as exc_info:
        decode_mask(bytes(data))
    assert "CRC" in str(exc_info.value)


def test_pgm_round_trip():
    pixels = bytes(range(12))
    data = b"P5\n4 3\n255\n" + pixels
    img = decode_gray(data)
    assert img.shape == (3, 4)
    assert img.values.ravel().tolist() == list(pixels)
    # masks read the same bytes, nonzero means set
    m = decode_mask(data)
    assert m.count() == 11


def test_pgm_with_comments_and_odd_whitespace():
    data = b"P5 # magic\n# full comment line\n  4\t3 # dims\n255\n" + bytes(12)
    img = decode_gray(data)
    assert img.shape == (3, 4)


def test_pgm_rejects_p6():
    with pytest.raises(ChannelCountError) as exc_info:
        decode_mask(b"P6\n2 2\n255\n" + bytes(12))
    assert exc_info.value.channels == 3


def test_pgm_rejects_wide_maxval_and_short_data():
    with pytest.raises(MaskDecodeError):
        decode_mask(b"P5\n2 2\n65535\n" + bytes(8))
    with pytest.raises(MaskDecodeError):
        decode_mask(b"P5\n4 4\n255\n" + bytes(3))
