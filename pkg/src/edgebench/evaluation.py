"""Synthetic scenes with exact ground truth, detector scoring, and
comparison reports."""

import csv
import io
import json
from collections import deque
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .canny import CannyParams, canny_detect, hysteresis, thinned_magnitude
from .image_core import EdgeMap, GrayImage
from .marr_hildreth import MHParams, crossing_slope_map, laplacian_of_smoothed, mh_detect

__all__ = [
    "CSV_COLUMNS",
    "EvalReport",
    "Scene",
    "THRESHOLD_GRID",
    "add_gaussian_noise",
    "circle_scene",
    "comparison_record",
    "count_components",
    "f_score",
    "noisy_step_suite",
    "records_to_csv",
    "records_to_json",
    "rectangle_scene",
    "run_comparison",
    "score",
    "synth_circle",
    "synth_rectangle",
    "synth_step",
    "tune_canny",
    "tune_mh",
]

# Shared operating-point grid for threshold tuning. Logarithmic so one grid
# serves both the gradient-magnitude and crossing-slope scales.
THRESHOLD_GRID: tuple = tuple(float(t) for t in np.geomspace(1e-3, 1.0, 22))


@dataclass(frozen=True, eq=False)
class Scene:
    """An input image paired with its exact ground-truth edge mask."""

    image: GrayImage
    truth: EdgeMap
    name: str

    def __post_init__(self) -> None:
        if (self.image.height, self.image.width) != (self.truth.height, self.truth.width):
            raise ValueError("scene image and truth must share dimensions")


@dataclass(frozen=True)
class EvalReport:
    """Distance-tolerance scoring of one detection against one truth mask."""

    false_positive_rate: float
    false_negative_rate: float
    mean_sq_distance: float
    detected_count: int
    truth_count: int
    matched_count: int
    match_tolerance: float


def synth_step(width: int, height: int, column: int, contrast: float) -> Scene:
    """Vertical step scene: intensity 0.5 -+ contrast/2 left/right of column.

    Truth marks every pixel of the first bright column.
    """
    if width < 2 or height < 1:
        raise ValueError(f"step scene needs width >= 2 and height >= 1, got {width}x{height}")
    if not 0 < column < width:
        raise ValueError(f"step column must satisfy 0 < column < width, got column={column}, width={width}")
    if not 0.0 < contrast <= 1.0:
        raise ValueError(f"contrast must lie in (0, 1], got {contrast}")
    px = np.full((height, width), 0.5 - contrast / 2.0)
    px[:, column:] = 0.5 + contrast / 2.0
    truth = np.zeros((height, width), dtype=bool)
    truth[:, column] = True
    return Scene(GrayImage(px), EdgeMap(truth), f"step-{width}x{height}-col{column}")


def synth_circle(size: int, center: tuple, radius: float) -> Scene:
    """Filled bright disc on a dark ground, truth on the inside boundary ring.

    center is (cx, cy) in pixel coordinates. A pixel is inside when its
    centre lies within radius of the centre point; truth marks inside pixels
    with at least one outside 4-neighbour. The disc must keep 2 pixels of
    clearance from every image border.
    """
    cx, cy = center
    if size < 1:
        raise ValueError(f"size must be positive, got {size}")
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    clearance = min(cx, cy, size - 1 - cx, size - 1 - cy)
    if radius + 2 > clearance:
        raise ValueError(
            f"circle must stay 2 pixels clear of the border: radius {radius} + 2 exceeds clearance {clearance}"
        )
    ys, xs = np.mgrid[0:size, 0:size]
    inside = (xs - cx) ** 2 + (ys - cy) ** 2 <= radius * radius
    outside = ~inside
    touches_outside = np.zeros_like(inside)
    touches_outside[1:, :] |= outside[:-1, :]
    touches_outside[:-1, :] |= outside[1:, :]
    touches_outside[:, 1:] |= outside[:, :-1]
    touches_outside[:, :-1] |= outside[:, 1:]
    truth = inside & touches_outside
    return Scene(GrayImage(inside.astype(np.float64)), EdgeMap(truth), f"circle-{size}-r{radius:g}")


def synth_rectangle(size: int, x0: int, y0: int, x1: int, y1: int) -> Scene:
    """Filled bright axis-aligned rectangle (corners inclusive) on dark ground.

    Truth marks the rectangle's boundary pixels. The rectangle must not
    touch the image border; inverted corners are rejected.
    """
    if not (0 < x0 <= x1 < size - 1 and 0 < y0 <= y1 < size - 1):
        raise ValueError(
            "rectangle must satisfy 0 < x0 <= x1 < size-1 and 0 < y0 <= y1 < size-1, "
            f"got x0={x0}, x1={x1}, y0={y0}, y1={y1}, size={size}"
        )
    px = np.zeros((size, size))
    px[y0:y1 + 1, x0:x1 + 1] = 1.0
    truth = np.zeros((size, size), dtype=bool)
    truth[y0, x0:x1 + 1] = True
    truth[y1, x0:x1 + 1] = True
    truth[y0:y1 + 1, x0] = True
    truth[y0:y1 + 1, x1] = True
    return Scene(GrayImage(px), EdgeMap(truth), f"rect-{size}-{x0},{y0}-{x1},{y1}")


def add_gaussian_noise(img: GrayImage, stddev: float, seed: int) -> GrayImage:
    """Add seeded zero-mean Gaussian noise and clamp to [0, 1].

    The generator is numpy's PCG64 (numpy.random.default_rng), so a given
    (stddev, seed) pair reproduces the same image everywhere. stddev 0
    returns the input unchanged.
    """
    if stddev < 0:
        raise ValueError(f"stddev must be non-negative, got {stddev}")
    if stddev == 0:
        return img
    rng = np.random.default_rng(seed)
    noisy = img.pixels + rng.normal(0.0, stddev, img.pixels.shape)
    return GrayImage(np.clip(noisy, 0.0, 1.0))


def score(detected: EdgeMap, truth: EdgeMap, match_tolerance: float = 1.5) -> EvalReport:
    """Score a detection against ground truth with a distance tolerance.

    A detected pixel is matched when some truth pixel lies within Euclidean
    distance match_tolerance; the false-positive rate is the unmatched
    fraction of detections. A truth pixel is covered when some detected
    pixel lies within the tolerance; the false-negative rate is the
    uncovered fraction of truth. mean_sq_distance averages the squared
    nearest-truth distance over matched detections (0.0 when nothing
    matched). Rates over an empty set are 0.0, except that an empty
    detection against non-empty truth gives a false-negative rate of 1.0.
    """
    if match_tolerance < 0:
        raise ValueError(f"match_tolerance must be non-negative, got {match_tolerance}")
    if (detected.height, detected.width) != (truth.height, truth.width):
        raise ValueError("detected and truth masks must share dimensions")
    det = np.argwhere(detected.mask)
    tru = np.argwhere(truth.mask)

    if det.shape[0] == 0:
        fp = 0.0
        matched = 0
        msd = 0.0
    elif tru.shape[0] == 0:
        fp = 1.0
        matched = 0
        msd = 0.0
    else:
        dist, _ = cKDTree(tru).query(det)
        matched_mask = dist <= match_tolerance
        matched = int(matched_mask.sum())
        fp = float((det.shape[0] - matched) / det.shape[0])
        msd = float(np.mean(dist[matched_mask] ** 2)) if matched else 0.0

    if tru.shape[0] == 0:
        fn = 0.0
    elif det.shape[0] == 0:
        fn = 1.0
    else:
        dist, _ = cKDTree(det).query(tru)
        fn = float((dist > match_tolerance).sum() / tru.shape[0])

    return EvalReport(
        false_positive_rate=fp,
        false_negative_rate=fn,
        mean_sq_distance=msd,
        detected_count=int(det.shape[0]),
        truth_count=int(tru.shape[0]),
        matched_count=matched,
        match_tolerance=float(match_tolerance),
    )


def f_score(report: EvalReport) -> float:
    """Harmonic mean of (1 - FP) and (1 - FN); 0.0 when both are zero."""
    p = 1.0 - report.false_positive_rate
    r = 1.0 - report.false_negative_rate
    if p + r == 0.0:
        return 0.0
    return 2.0 * p * r / (p + r)


def count_components(edges, connectivity: int = 8) -> int:
    """Number of connected components of true pixels (4- or 8-connectivity)."""
    if connectivity not in (4, 8):
        raise ValueError(f"connectivity must be 4 or 8, got {connectivity}")
    mask = edges.mask if isinstance(edges, EdgeMap) else np.asarray(edges, dtype=bool)
    if connectivity == 8:
        offsets = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)]
    else:
        offsets = [(-1, 0), (0, -1), (0, 1), (1, 0)]
    h, w = mask.shape
    seen = np.zeros_like(mask)
    components = 0
    for sy, sx in zip(*np.nonzero(mask)):
        if seen[sy, sx]:
            continue
        components += 1
        seen[sy, sx] = True
        queue = deque([(sy, sx)])
        while queue:
            y, x = queue.popleft()
            for dy, dx in offsets:
                ny, nx = y + dy, x + dx
                if 0 <= ny < h and 0 <= nx < w and mask[ny, nx] and not seen[ny, nx]:
                    seen[ny, nx] = True
                    queue.append((ny, nx))
    return components


def run_comparison(scenes, mh: MHParams, canny: CannyParams, tolerance: float = 1.5) -> list:
    """Run both detectors on every scene.

    Returns one (scene name, detector name, EvalReport) row per pair, scenes
    in the given order and detectors alphabetical within a scene.
    """
    scenes = list(scenes)
    if not scenes:
        raise ValueError("run_comparison needs at least one scene")
    rows = []
    for scene in scenes:
        rows.append((scene.name, "canny", score(canny_detect(scene.image, canny), scene.truth, tolerance)))
        rows.append((scene.name, "marr-hildreth", score(mh_detect(scene.image, mh), scene.truth, tolerance)))
    return rows


def tune_mh(scene: Scene, sigma: float = 1.0, tolerance: float = 1.5,
            use_hysteresis: bool = False, grid=THRESHOLD_GRID):
    """Grid-search the slope threshold(s) maximising the scene's f_score.

    Returns (MHParams, EvalReport) for the best operating point; ties keep
    the earliest grid point, so the result is deterministic.
    """
    slopes = crossing_slope_map(laplacian_of_smoothed(scene.image, sigma))
    best = None
    if use_hysteresis:
        for i, low in enumerate(grid):
            for high in grid[i:]:
                report = score(hysteresis(slopes, low, high), scene.truth, tolerance)
                params = MHParams(sigma=sigma, use_hysteresis=True, low=low, high=high)
                if best is None or f_score(report) > f_score(best[1]):
                    best = (params, report)
    else:
        for threshold in grid:
            report = score(EdgeMap(slopes.pixels > threshold), scene.truth, tolerance)
            params = MHParams(sigma=sigma, slope_threshold=threshold)
            if best is None or f_score(report) > f_score(best[1]):
                best = (params, report)
    return best


def tune_canny(scene: Scene, sigma: float = 1.0, tolerance: float = 1.5, grid=THRESHOLD_GRID):
    """Grid-search the (low, high) pair maximising the scene's f_score.

    Returns (CannyParams, EvalReport); deterministic like tune_mh.
    """
    thinned = thinned_magnitude(scene.image, sigma)
    best = None
    for i, low in enumerate(grid):
        for high in grid[i:]:
            report = score(hysteresis(thinned, low, high), scene.truth, tolerance)
            params = CannyParams(sigma=sigma, low=low, high=high)
            if best is None or f_score(report) > f_score(best[1]):
                best = (params, report)
    return best


def noisy_step_suite(seeds, size: int = 64, contrast: float = 0.5, noise_stddev: float = 0.1) -> list:
    """One noisy vertical-step scene per seed, named noisy-step-seed<N>."""
    base = synth_step(size, size, size // 2, contrast)
    scenes = []
    for seed in seeds:
        image = add_gaussian_noise(base.image, noise_stddev, seed)
        scenes.append(Scene(image, base.truth, f"noisy-step-seed{seed}"))
    return scenes


def circle_scene(size: int = 64) -> Scene:
    """Clean disc scene used by the built-in circle suite."""
    mid = (size - 1) / 2.0
    scene = synth_circle(size, (mid, mid), size * 0.3)
    return Scene(scene.image, scene.truth, "circle")


def rectangle_scene(size: int = 64) -> Scene:
    """Clean half-size centred square, the corner-behaviour suite scene."""
    x0 = size // 4
    x1 = x0 + size // 2 - 1
    scene = synth_rectangle(size, x0, x0, x1, x1)
    return Scene(scene.image, scene.truth, "rectangle-corners")


CSV_COLUMNS = (
    "scene", "detector", "sigma", "low", "high", "slope_threshold",
    "fp_rate", "fn_rate", "mean_sq_distance", "detected", "truth",
    "matched", "tolerance", "seed",
)


def comparison_record(scene: str, detector: str, report: EvalReport, sigma: float,
                      low=None, high=None, slope_threshold=None, seed=None) -> dict:
    """One serialisable report row; inapplicable parameters stay None."""
    return {
        "scene": scene,
        "detector": detector,
        "sigma": sigma,
        "low": low,
        "high": high,
        "slope_threshold": slope_threshold,
        "fp_rate": report.false_positive_rate,
        "fn_rate": report.false_negative_rate,
        "mean_sq_distance": report.mean_sq_distance,
        "detected": report.detected_count,
        "truth": report.truth_count,
        "matched": report.matched_count,
        "tolerance": report.match_tolerance,
        "seed": seed,
    }


def records_to_csv(records) -> str:
    """Render report records as CSV with the fixed column order; None is empty."""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for record in records:
        writer.writerow({k: ("" if record[k] is None else record[k]) for k in CSV_COLUMNS})
    return buf.getvalue()


def records_to_json(records) -> str:
    """Render report records as a JSON array with the same fields as the CSV."""
    return json.dumps([{k: record[k] for k in CSV_COLUMNS} for record in records], indent=2) + "\n"
