"""Pixel buffers, grayscale conversion, and PGM/PPM file I/O."""

import os
import tempfile
from dataclasses import dataclass

import numpy as np

__all__ = [
    "EdgeMap",
    "FormatError",
    "GrayImage",
    "RgbImage",
    "TruncationError",
    "read_image",
    "rgb_to_gray",
    "write_image",
]


class FormatError(ValueError):
    """A PGM/PPM header or sample stream is malformed."""


class TruncationError(ValueError):
    """A PGM/PPM file ends before all pixel data has arrived."""


# Luminance weights. The widely quoted BT.601 triple (0.2989, 0.5870, 0.1140)
# sums to 0.9999, which would pull pure white below 1.0, so the red and green
# weights are normalised by that sum and blue is the exact complement. White
# then maps to exactly 1.0 while the channel ratios stay as documented.
_RAW_SUM = 0.2989 + 0.5870 + 0.1140
LUMA_RED = 0.2989 / _RAW_SUM
LUMA_GREEN = 0.5870 / _RAW_SUM
LUMA_BLUE = 1.0 - (LUMA_RED + LUMA_GREEN)

_HEADER_WHITESPACE = b" \t\n\r\x0b\x0c"


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Rectangular grid of real intensities, row-major.

    File loaders produce values in [0, 1]; intermediate filter outputs may
    leave that range and are never clamped.
    """

    pixels: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.pixels, dtype=np.float64, copy=True)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError(f"gray pixels must form a non-empty 2-D grid, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "pixels", arr)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def __repr__(self) -> str:
        return f"GrayImage({self.width}x{self.height})"


@dataclass(frozen=True, eq=False)
class RgbImage:
    """Rectangular grid of (r, g, b) triples with channels in [0, 1]."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.pixels, dtype=np.float64, copy=True)
        if arr.ndim != 3 or arr.shape[2] != 3 or arr.shape[0] == 0 or arr.shape[1] == 0:
            raise ValueError(f"rgb pixels must form a non-empty (h, w, 3) grid, got shape {arr.shape}")
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise ValueError("rgb channels must lie in [0, 1]")
        arr.setflags(write=False)
        object.__setattr__(self, "pixels", arr)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def __repr__(self) -> str:
        return f"RgbImage({self.width}x{self.height})"


@dataclass(frozen=True, eq=False)
class EdgeMap:
    """Boolean mask of detected edge pixels."""

    mask: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.mask, copy=True)
        if arr.dtype != np.bool_:
            raise ValueError(f"edge mask must be boolean, got dtype {arr.dtype}")
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError(f"edge mask must form a non-empty 2-D grid, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "mask", arr)

    @property
    def width(self) -> int:
        return self.mask.shape[1]

    @property
    def height(self) -> int:
        return self.mask.shape[0]

    @property
    def count(self) -> int:
        """Number of marked pixels."""
        return int(self.mask.sum())

    def __repr__(self) -> str:
        return f"EdgeMap({self.width}x{self.height}, {self.count} marked)"


def rgb_to_gray(img: RgbImage) -> GrayImage:
    """Collapse RGB to luminance with the BT.601 weights.

    The weighted sum is a convex combination, so output intensities stay
    in [0, 1].
    """
    px = img.pixels
    gray = px[..., 0] * LUMA_RED + px[..., 1] * LUMA_GREEN + px[..., 2] * LUMA_BLUE
    return GrayImage(gray)


def _skip_header_filler(data: bytes, pos: int) -> int:
    # netpbm allows whitespace and '#' comments (to end of line) between tokens
    n = len(data)
    while pos < n:
        c = data[pos]
        if c in _HEADER_WHITESPACE:
            pos += 1
        elif c == 0x23:  # '#'
            while pos < n and data[pos] not in b"\r\n":
                pos += 1
        else:
            break
    return pos


def _next_header_token(data: bytes, pos: int) -> tuple[bytes, int]:
    pos = _skip_header_filler(data, pos)
    if pos >= len(data):
        raise FormatError("unexpected end of file inside header")
    start = pos
    n = len(data)
    while pos < n and data[pos] not in _HEADER_WHITESPACE and data[pos] != 0x23:
        pos += 1
    return data[start:pos], pos


def _header_int(data: bytes, pos: int, what: str, lo: int, hi: int) -> tuple[int, int]:
    token, pos = _next_header_token(data, pos)
    try:
        value = int(token)
    except ValueError:
        raise FormatError(f"malformed {what} token {token!r}") from None
    if not lo <= value <= hi:
        raise FormatError(f"{what} token {token!r} out of range [{lo}, {hi}]")
    return value, pos


def _ascii_samples(data: bytes, pos: int, count: int) -> np.ndarray:
    tokens = data[pos:].split()
    kept = []
    for tok in tokens:
        if tok.startswith(b"#"):
            # crude but adequate: a comment token swallows the rest of its line
            continue
        kept.append(tok)
        if len(kept) == count:
            break
    if len(kept) < count:
        raise TruncationError(f"pixel data truncated: expected {count} samples, got {len(kept)}")
    out = np.empty(count, dtype=np.float64)
    for i, tok in enumerate(kept):
        try:
            out[i] = int(tok)
        except ValueError:
            raise FormatError(f"malformed sample token {tok!r}") from None
    return out


def read_image(path) -> "GrayImage | RgbImage":
    """Read a PGM (P2/P5) or PPM (P3/P6) file.

    Returns a GrayImage for PGM input and an RgbImage for PPM input.
    Sample values are normalised by 255 (one byte per sample) or 65535
    (two bytes, big-endian).

    Raises FormatError for a malformed header, TruncationError for missing
    pixel data, and OSError for filesystem failures.
    """
    with open(path, "rb") as fh:
        data = fh.read()

    magic, pos = _next_header_token(data, 0)
    if magic not in (b"P2", b"P3", b"P5", b"P6"):
        raise FormatError(f"unsupported magic token {magic!r}")
    width, pos = _header_int(data, pos, "width", 1, 2**31 - 1)
    height, pos = _header_int(data, pos, "height", 1, 2**31 - 1)
    maxval, pos = _header_int(data, pos, "maxval", 1, 65535)

    channels = 3 if magic in (b"P3", b"P6") else 1
    count = width * height * channels

    if magic in (b"P5", b"P6"):
        if pos >= len(data) or data[pos] not in _HEADER_WHITESPACE:
            raise FormatError("missing whitespace between maxval and pixel data")
        raster = data[pos + 1:]
        bytes_per_sample = 1 if maxval <= 255 else 2
        needed = count * bytes_per_sample
        if len(raster) < needed:
            raise TruncationError(f"pixel data truncated: expected {needed} bytes, got {len(raster)}")
        dtype = np.uint8 if bytes_per_sample == 1 else np.dtype(">u2")
        samples = np.frombuffer(raster[:needed], dtype=dtype).astype(np.float64)
    else:
        samples = _ascii_samples(data, pos, count)

    if samples.max(initial=0.0) > maxval:
        raise FormatError(f"sample value {int(samples.max())} exceeds maxval {maxval}")

    scale = 255.0 if maxval <= 255 else 65535.0
    samples /= scale
    if channels == 1:
        return GrayImage(samples.reshape(height, width))
    return RgbImage(samples.reshape(height, width, 3))


def atomic_write_bytes(path, payload: bytes) -> None:
    """Write payload to path via a temporary file in the same directory.

    The target either keeps its old content or receives the complete new
    content; a partial file is never left behind.
    """
    target = os.fspath(path)
    directory = os.path.dirname(target) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".edgebench-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, target)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def write_image(img, path) -> None:
    """Write a GrayImage or EdgeMap as a binary 8-bit PGM (P5, maxval 255).

    Gray intensities are clamped to [0, 1] and quantised with round-half-up;
    edge maps come out as 255 (edge) and 0 (background). The file is written
    atomically.
    """
    if isinstance(img, EdgeMap):
        body = np.where(img.mask, 255, 0).astype(np.uint8)
    elif isinstance(img, GrayImage):
        clamped = np.clip(img.pixels, 0.0, 1.0)
        body = np.floor(clamped * 255.0 + 0.5).astype(np.uint8)
    else:
        raise TypeError(f"write_image expects a GrayImage or EdgeMap, got {type(img).__name__}")
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    atomic_write_bytes(path, header + body.tobytes())
