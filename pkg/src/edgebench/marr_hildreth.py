"""Marr-Hildreth edge detection: Laplacian of a smoothed image, then
zero-crossing localisation with a slope threshold."""

from dataclasses import dataclass

import numpy as np

from .canny import hysteresis
from .filtering import (
    convolve_2d,
    convolve_separable,
    gaussian_kernel_1d,
    gaussian_radius,
    laplacian_kernel_2d,
)
from .image_core import EdgeMap, GrayImage

__all__ = [
    "LaplacianResponse",
    "MHParams",
    "crossing_slope_map",
    "laplacian_of_smoothed",
    "mh_detect",
    "zero_crossings",
]


@dataclass(frozen=True, eq=False)
class LaplacianResponse:
    """Signed second-derivative plane, same shape as the source image."""

    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=np.float64, copy=True)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError(f"response must be a non-empty 2-D grid, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class MHParams:
    """Smoothing width plus either a single slope threshold or, with
    use_hysteresis, a (low, high) pair applied to crossing slopes."""

    sigma: float = 1.0
    slope_threshold: float = 0.0
    use_hysteresis: bool = False
    low: float = 0.0
    high: float = 0.0
    radius: "int | None" = None

    def __post_init__(self) -> None:
        if self.sigma <= 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.slope_threshold < 0:
            raise ValueError(f"slope_threshold must be non-negative, got {self.slope_threshold}")
        if self.low < 0 or self.high < 0:
            raise ValueError("hysteresis thresholds must be non-negative")
        if self.use_hysteresis and self.low > self.high:
            raise ValueError(f"hysteresis requires low <= high, got low={self.low}, high={self.high}")
        if self.radius is not None and self.radius < 1:
            raise ValueError(f"radius must be at least 1, got {self.radius}")


def laplacian_of_smoothed(img: GrayImage, sigma: float, radius: "int | None" = None) -> LaplacianResponse:
    """Gaussian smoothing followed by the four-neighbour Laplacian stencil."""
    r = gaussian_radius(sigma) if radius is None else radius
    k = gaussian_kernel_1d(sigma, r)
    smoothed = convolve_separable(img, k, k)
    return LaplacianResponse(convolve_2d(smoothed, laplacian_kernel_2d()).pixels)


def crossing_slope_map(resp: LaplacianResponse) -> GrayImage:
    """Per-pixel slope magnitude at sign changes of the response, 0 elsewhere.

    A sign change between axis-aligned neighbours (a, b) with strictly
    opposite signs lands on the member with the smaller absolute value
    (scan-order earlier on a tie) and carries slope |a - b|. A pixel whose
    value is exactly 0 between opposite-signed axis neighbours carries the
    slope of that straddling pair. A pixel hit by several crossings keeps
    the largest slope.
    """
    v = resp.values
    slopes = np.zeros_like(v)

    def accumulate(ay, ax, by, bx):
        # a is the scan-order earlier member, so <= sends ties its way
        a, b = v[ay, ax], v[by, bx]
        diff = np.abs(a - b)
        pick_a = np.abs(a) <= np.abs(b)
        np.maximum.at(slopes, (np.where(pick_a, ay, by), np.where(pick_a, ax, bx)), diff)

    # horizontal neighbour pairs
    a, b = v[:, :-1], v[:, 1:]
    ys, xs = np.nonzero(((a > 0) & (b < 0)) | ((a < 0) & (b > 0)))
    if ys.size:
        accumulate(ys, xs, ys, xs + 1)

    # vertical neighbour pairs
    a, b = v[:-1, :], v[1:, :]
    ys, xs = np.nonzero(((a > 0) & (b < 0)) | ((a < 0) & (b > 0)))
    if ys.size:
        accumulate(ys, xs, ys + 1, xs)

    # exact zeros straddled by opposite signs
    if v.shape[1] >= 3:
        c, l, r = v[:, 1:-1], v[:, :-2], v[:, 2:]
        ys, xs = np.nonzero((c == 0) & (((l > 0) & (r < 0)) | ((l < 0) & (r > 0))))
        if ys.size:
            np.maximum.at(slopes, (ys, xs + 1), np.abs(v[ys, xs] - v[ys, xs + 2]))
    if v.shape[0] >= 3:
        c, up, dn = v[1:-1, :], v[:-2, :], v[2:, :]
        ys, xs = np.nonzero((c == 0) & (((up > 0) & (dn < 0)) | ((up < 0) & (dn > 0))))
        if ys.size:
            np.maximum.at(slopes, (ys + 1, xs), np.abs(v[ys, xs] - v[ys + 2, xs]))

    return GrayImage(slopes)


def zero_crossings(resp: LaplacianResponse, slope_threshold: float) -> EdgeMap:
    """Mark sign changes whose slope magnitude strictly exceeds the threshold."""
    if slope_threshold < 0:
        raise ValueError(f"slope_threshold must be non-negative, got {slope_threshold}")
    return EdgeMap(crossing_slope_map(resp).pixels > slope_threshold)


def mh_detect(img: GrayImage, params: MHParams) -> EdgeMap:
    """Full detector. With use_hysteresis the crossing-slope plane goes
    through the same two-threshold linking the Canny detector uses;
    otherwise a single slope threshold decides."""
    resp = laplacian_of_smoothed(img, params.sigma, params.radius)
    slopes = crossing_slope_map(resp)
    if params.use_hysteresis:
        return hysteresis(slopes, params.low, params.high)
    return EdgeMap(slopes.pixels > params.slope_threshold)
