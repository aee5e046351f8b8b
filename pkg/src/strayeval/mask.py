"""Binary fault masks, 8-bit grayscale images, and lossless PNG/PGM I/O.

Masks are stored row-major with (row, col) pixel coordinates and the origin
at the top-left corner. A true bit marks a fault (straylight) pixel, false
marks a nominal pixel. All container types are immutable after construction
and safe to share across threads.
"""

from __future__ import annotations

import io
import struct
import zlib
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "BinaryMask",
    "GrayImage",
    "FloatField",
    "MaskDecodeError",
    "ChannelCountError",
    "ShapeMismatchError",
    "decode_mask",
    "encode_mask",
    "decode_gray",
    "encode_gray",
    "encode_gray16",
    "luminance",
]

_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"

# Channel count per PNG color type; palette images carry RGB entries.
_PNG_CHANNELS = {0: 1, 2: 3, 3: 3, 4: 2, 6: 4}

_LUMA_WEIGHTS = (0.299, 0.587, 0.114)


class MaskDecodeError(ValueError):
    """Malformed mask file. ``offset`` is the byte position of the defect."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class ChannelCountError(MaskDecodeError):
    """Input image has more than one channel."""

    def __init__(self, channels: int, offset: int):
        super().__init__(
            f"expected a single-channel image, got {channels} channels", offset
        )
        self.channels = channels


class ShapeMismatchError(ValueError):
    """Two frames that must share dimensions do not."""

    def __init__(self, shape_a: tuple[int, int], shape_b: tuple[int, int]):
        super().__init__(
            f"dimension mismatch: {shape_a[1]}x{shape_a[0]} vs {shape_b[1]}x{shape_b[0]}"
        )
        self.shape_a = shape_a
        self.shape_b = shape_b


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class BinaryMask:
    """Per-pixel fault/nominal classification for one frame.

    ``bits`` is a (height, width) boolean array; true = fault pixel.
    """

    bits: np.ndarray

    def __post_init__(self):
        bits = np.asarray(self.bits)
        if bits.ndim != 2:
            raise ValueError(f"mask must be 2-D, got shape {bits.shape}")
        if bits.shape[0] < 1 or bits.shape[1] < 1:
            raise ValueError(f"mask dimensions must be >= 1, got {bits.shape}")
        object.__setattr__(self, "bits", _freeze(bits.astype(bool, copy=True)))

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.bits.shape

    def count(self) -> int:
        """Number of fault pixels."""
        return int(self.bits.sum())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinaryMask):
            return NotImplemented
        return self.bits.shape == other.bits.shape and bool(
            np.array_equal(self.bits, other.bits)
        )

    def __repr__(self) -> str:
        return f"BinaryMask({self.width}x{self.height}, {self.count()} set)"


@dataclass(frozen=True, eq=False)
class GrayImage:
    """8-bit single-channel intensity image, (height, width) uint8 values."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.ndim != 2:
            raise ValueError(f"image must be 2-D, got shape {values.shape}")
        if values.shape[0] < 1 or values.shape[1] < 1:
            raise ValueError(f"image dimensions must be >= 1, got {values.shape}")
        if values.dtype != np.uint8:
            if values.min() < 0 or values.max() > 255:
                raise ValueError("intensity values must lie in [0, 255]")
            values = values.astype(np.uint8)
        object.__setattr__(self, "values", _freeze(values.copy()))

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GrayImage):
            return NotImplemented
        return self.values.shape == other.values.shape and bool(
            np.array_equal(self.values, other.values)
        )

    def __repr__(self) -> str:
        return f"GrayImage({self.width}x{self.height})"


@dataclass(frozen=True, eq=False)
class FloatField:
    """Real-valued per-pixel field; intermediate for smoothing and rendering."""

    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError(f"field must be 2-D, got shape {values.shape}")
        if not np.isfinite(values).all():
            raise ValueError("field values must be finite")
        object.__setattr__(self, "values", _freeze(values.copy()))

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    def __repr__(self) -> str:
        return f"FloatField({self.values.shape[1]}x{self.values.shape[0]})"


def luminance(img: np.ndarray) -> GrayImage:
    """Collapse a 1- or 3-channel 8-bit image to single-channel luminance.

    Three-channel input is combined with fixed weights 0.299/0.587/0.114
    (R/G/B) and rounded to the nearest integer, ties upward. Single-channel
    input passes through unchanged.
    """
    arr = np.asarray(img)
    if arr.ndim == 2:
        return GrayImage(arr)
    if arr.ndim == 3 and arr.shape[2] == 1:
        return GrayImage(arr[:, :, 0])
    if arr.ndim == 3 and arr.shape[2] == 3:
        w = np.asarray(_LUMA_WEIGHTS, dtype=np.float64)
        mixed = arr.astype(np.float64) @ w
        return GrayImage(np.floor(mixed + 0.5).astype(np.uint8))
    channels = arr.shape[2] if arr.ndim == 3 else arr.ndim
    raise ValueError(f"expected 1 or 3 channels, got {channels}")


# ---------------------------------------------------------------------------
# PNG writing.
#
# The encoder emits a fixed chunk layout (IHDR, IDAT, IEND) with filter type
# 0 on every scanline and a fixed zlib level, so identical pixel content
# always produces identical bytes within one environment.
# ---------------------------------------------------------------------------


def _png_chunk(tag: bytes, payload: bytes) -> bytes:
    return (
        struct.pack(">I", len(payload))
        + tag
        + payload
        + struct.pack(">I", zlib.crc32(tag + payload) & 0xFFFFFFFF)
    )


def _encode_png(rows: bytes, width: int, height: int, bit_depth: int) -> bytes:
    ihdr = struct.pack(">IIBBBBB", width, height, bit_depth, 0, 0, 0, 0)
    idat = zlib.compress(rows, 6)
    return (
        _PNG_MAGIC
        + _png_chunk(b"IHDR", ihdr)
        + _png_chunk(b"IDAT", idat)
        + _png_chunk(b"IEND", b"")
    )


def encode_gray(img: GrayImage) -> bytes:
    """Encode an 8-bit grayscale image as a deterministic PNG."""
    h, w = img.shape
    data = img.values
    rows = b"".join(b"\x00" + data[r].tobytes() for r in range(h))
    return _encode_png(rows, w, h, 8)


def encode_gray16(values: np.ndarray) -> bytes:
    """Encode a (height, width) uint16 array as a 16-bit grayscale PNG."""
    arr = np.asarray(values)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D array, got shape {arr.shape}")
    if arr.min() < 0 or arr.max() > 0xFFFF:
        raise ValueError("values exceed the 16-bit range")
    arr = arr.astype(">u2")
    rows = b"".join(b"\x00" + arr[r].tobytes() for r in range(arr.shape[0]))
    return _encode_png(rows, arr.shape[1], arr.shape[0], 16)


def encode_mask(m: BinaryMask) -> bytes:
    """Encode a mask as an 8-bit grayscale PNG; true -> 255, false -> 0."""
    return encode_gray(GrayImage(m.bits.astype(np.uint8) * 255))


# ---------------------------------------------------------------------------
# PNG / PGM reading.
#
# The chunk structure, CRCs, and header fields are validated here so decode
# errors carry a byte offset; pixel decompression of valid files is handed
# to Pillow, which covers all filter types and interlacing.
# ---------------------------------------------------------------------------


def _walk_png(data: bytes) -> tuple[int, int, int, int]:
    """Validate PNG structure; return (width, height, bit_depth, color_type)."""
    if len(data) < 8 or data[:8] != _PNG_MAGIC:
        raise MaskDecodeError("not a PNG file (bad signature)", 0)
    pos = 8
    header: tuple[int, int, int, int] | None = None
    saw_idat = False
    saw_iend = False
    while pos < len(data):
        if pos + 8 > len(data):
            raise MaskDecodeError("truncated chunk header", pos)
        (length,) = struct.unpack(">I", data[pos : pos + 4])
        tag = data[pos + 4 : pos + 8]
        body_start = pos + 8
        crc_start = body_start + length
        if crc_start + 4 > len(data):
            raise MaskDecodeError(f"truncated {tag!r} chunk", pos)
        body = data[body_start:crc_start]
        (crc,) = struct.unpack(">I", data[crc_start : crc_start + 4])
        if zlib.crc32(tag + body) & 0xFFFFFFFF != crc:
            raise MaskDecodeError(f"CRC mismatch in {tag!r} chunk", crc_start)
        if header is None:
            if tag != b"IHDR" or length != 13:
                raise MaskDecodeError("first chunk is not a valid IHDR", pos)
            w, h, depth, color = struct.unpack(">IIBB", body[:10])
            if w < 1 or h < 1:
                raise MaskDecodeError("zero image dimension", body_start)
            channels = _PNG_CHANNELS.get(color)
            if channels is None:
                raise MaskDecodeError(f"unknown color type {color}", body_start)
            if channels != 1:
                raise ChannelCountError(channels, body_start)
            if depth != 8:
                raise MaskDecodeError(
                    f"unsupported bit depth {depth} (only 8-bit supported)", body_start
                )
            header = (w, h, depth, color)
        elif tag == b"IDAT":
            saw_idat = True
        elif tag == b"IEND":
            saw_iend = True
            break
        pos = crc_start + 4
    if header is None:
        raise MaskDecodeError("missing IHDR chunk", len(data))
    if not saw_idat:
        raise MaskDecodeError("missing IDAT chunk", len(data))
    if not saw_iend:
        raise MaskDecodeError("missing IEND chunk", len(data))
    return header


def _decode_png_gray(data: bytes) -> np.ndarray:
    from PIL import Image

    w, h, _, _ = _walk_png(data)
    try:
        img = Image.open(io.BytesIO(data))
        img.load()
    except Exception as exc:  # structural checks passed; pixel stream is bad
        raise MaskDecodeError(f"corrupt pixel data: {exc}", 8) from exc
    if img.mode != "L":
        img = img.convert("L")
    arr = np.asarray(img, dtype=np.uint8)
    if arr.shape != (h, w):
        raise MaskDecodeError("decoded size disagrees with IHDR", 8)
    return arr


def _pgm_token(data: bytes, pos: int) -> tuple[bytes, int]:
    while pos < len(data):
        c = data[pos : pos + 1]
        if c == b"#":
            while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
        elif c.isspace():
            pos += 1
        else:
            break
    if pos >= len(data):
        raise MaskDecodeError("unexpected end of PGM header", len(data))
    start = pos
    while pos < len(data) and not data[pos : pos + 1].isspace():
        pos += 1
    return data[start:pos], pos


def _decode_pgm(data: bytes) -> np.ndarray:
    if data[:2] == b"P6":
        raise ChannelCountError(3, 0)
    if data[:2] != b"P5":
        raise MaskDecodeError("not a binary PGM file (expected P5)", 0)
    pos = 2
    fields = []
    for name in ("width", "height", "maxval"):
        tok, pos = _pgm_token(data, pos)
        try:
            value = int(tok)
        except ValueError:
            raise MaskDecodeError(
                f"invalid PGM {name} {tok!r}", pos - len(tok)
            ) from None
        fields.append((value, pos - len(tok)))
    (w, w_off), (h, h_off), (maxval, m_off) = fields
    if w < 1:
        raise MaskDecodeError(f"invalid PGM width {w}", w_off)
    if h < 1:
        raise MaskDecodeError(f"invalid PGM height {h}", h_off)
    if not 0 < maxval <= 255:
        raise MaskDecodeError(f"unsupported PGM maxval {maxval}", m_off)
    pos += 1  # single whitespace byte after maxval
    end = pos + w * h
    if end > len(data):
        raise MaskDecodeError("truncated PGM pixel data", len(data))
    return np.frombuffer(data[pos:end], dtype=np.uint8).reshape(h, w)


def decode_mask(data: bytes) -> BinaryMask:
    """Decode an 8-bit single-channel PNG or binary PGM into a mask.

    Pixel value 0 maps to false; any nonzero value maps to true, so masks
    written by third-party tools with anti-aliased edges still round-trip
    into clean binary form.
    """
    return BinaryMask(_decode_any_gray(data) != 0)


def decode_gray(data: bytes) -> GrayImage:
    """Decode an 8-bit single-channel PNG or binary PGM into a GrayImage."""
    return GrayImage(_decode_any_gray(data))


def _decode_any_gray(data: bytes) -> np.ndarray:
    if data[:8] == _PNG_MAGIC:
        return _decode_png_gray(data)
    if data[:2] in (b"P5", b"P6"):
        return _decode_pgm(data)
    raise MaskDecodeError("unrecognized file format (expected PNG or PGM)", 0)
