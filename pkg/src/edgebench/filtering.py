"""Gaussian kernels and image convolution with edge-replicated borders.

Kernels are applied as correlation; every kernel built here is symmetric,
so the distinction from convolution never shows.
"""

import math
from dataclasses import dataclass

import numpy as np

from .image_core import GrayImage

__all__ = [
    "Kernel1D",
    "Kernel2D",
    "convolve_2d",
    "convolve_separable",
    "gaussian_kernel_1d",
    "gaussian_radius",
    "laplacian_kernel_2d",
    "outer_kernel",
]


@dataclass(frozen=True, eq=False)
class Kernel1D:
    """Odd-length symmetric tap vector centred on offset zero."""

    taps: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.taps, dtype=np.float64, copy=True)
        if arr.ndim != 1 or arr.size % 2 == 0:
            raise ValueError(f"1-D kernel needs an odd number of taps, got shape {arr.shape}")
        if not np.array_equal(arr, arr[::-1]):
            raise ValueError("1-D kernel taps must be symmetric about the centre")
        arr.setflags(write=False)
        object.__setattr__(self, "taps", arr)

    @property
    def radius(self) -> int:
        return self.taps.size // 2


@dataclass(frozen=True, eq=False)
class Kernel2D:
    """Square odd-sided tap grid centred on offset (0, 0)."""

    taps: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.taps, dtype=np.float64, copy=True)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] % 2 == 0:
            raise ValueError(f"2-D kernel must be square with odd side, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "taps", arr)

    @property
    def radius(self) -> int:
        return self.taps.shape[0] // 2


def gaussian_radius(sigma: float) -> int:
    """Default truncation radius for a Gaussian of width sigma: ceil(3*sigma)."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    return math.ceil(3.0 * sigma)


def gaussian_kernel_1d(sigma: float, radius: int) -> Kernel1D:
    """Sampled Gaussian taps exp(-k^2 / (2 sigma^2)) for k in [-radius, radius].

    The truncated taps are re-normalised to sum to one, so smoothing
    preserves the mean intensity.
    """
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if radius < 1:
        raise ValueError(f"radius must be at least 1, got {radius}")
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    taps = np.exp(-(offsets**2) / (2.0 * sigma * sigma))
    return Kernel1D(taps / taps.sum())


def laplacian_kernel_2d() -> Kernel2D:
    """Four-neighbour Laplacian stencil. Zero-sum, so constants map to zero."""
    return Kernel2D(np.array([
        [0.0, 1.0, 0.0],
        [1.0, -4.0, 1.0],
        [0.0, 1.0, 0.0],
    ]))


def outer_kernel(ky: Kernel1D, kx: Kernel1D) -> Kernel2D:
    """Outer-product kernel: taps[i, j] = ky[i] * kx[j]."""
    return Kernel2D(np.outer(ky.taps, kx.taps))


def convolve_separable(img: GrayImage, kx: Kernel1D, ky: Kernel1D) -> GrayImage:
    """Correlate with kx along rows, then ky along columns.

    Out-of-range samples replicate the nearest border pixel, which keeps
    the two 1-D passes exactly equivalent to the 2-D outer-product pass.
    """
    px = img.pixels
    h, w = px.shape

    rx = kx.radius
    padded = np.pad(px, ((0, 0), (rx, rx)), mode="edge")
    tmp = np.zeros_like(px)
    for i, tap in enumerate(kx.taps):
        tmp += tap * padded[:, i:i + w]

    ry = ky.radius
    padded = np.pad(tmp, ((ry, ry), (0, 0)), mode="edge")
    out = np.zeros_like(px)
    for i, tap in enumerate(ky.taps):
        out += tap * padded[i:i + h, :]
    return GrayImage(out)


def convolve_2d(img: GrayImage, kernel: Kernel2D) -> GrayImage:
    """Dense 2-D correlation with edge-replicated borders.

    Every output pixel accumulates the full tap grid directly; this is the
    reference path the separable route is checked against.
    """
    px = img.pixels
    h, w = px.shape
    r = kernel.radius
    padded = np.pad(px, r, mode="edge")
    out = np.zeros_like(px)
    side = 2 * r + 1
    for i in range(side):
        for j in range(side):
            tap = kernel.taps[i, j]
            if tap == 0.0:
                continue
            out += tap * padded[i:i + h, j:j + w]
    return GrayImage(out)
