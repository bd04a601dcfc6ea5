"""Minimal deterministic SVG density panels.

Each panel is an 800x400 SVG 1.1 document with one polyline per density
curve: the exact per-class joint densities of the mixture and, when
samples are given, a kernel-density estimate of the generated samples per
class (dashed).  Output bytes depend only on the inputs.
"""

from __future__ import annotations

import numpy as np

from adclab import metrics, synthdata

WIDTH, HEIGHT = 800, 400
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 50, 20, 30, 40

CLASS_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                "#8c564b", "#e377c2", "#7f7f7f")


def _coords(grid, values, x_range, y_max):
    x0, x1 = x_range
    xs = MARGIN_L + (np.asarray(grid) - x0) / (x1 - x0) * (WIDTH - MARGIN_L - MARGIN_R)
    ys = HEIGHT - MARGIN_B - np.asarray(values) / y_max * (HEIGHT - MARGIN_T - MARGIN_B)
    return " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs, ys))


def density_panel(path: str, grid: np.ndarray, truth_curves: list[np.ndarray],
                  kde_curves: list[np.ndarray | None] | None = None,
                  title: str = ""):
    """Write one SVG panel; kde_curves may be None or hold None per class."""
    grid = np.asarray(grid, dtype=np.float64)
    kde_curves = kde_curves if kde_curves is not None else [None] * len(truth_curves)
    peak = max([float(np.max(c)) for c in truth_curves] +
               [float(np.max(c)) for c in kde_curves if c is not None] + [1e-12])
    y_max = 1.1 * peak
    x_range = (float(grid[0]), float(grid[-1]))

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<line x1="{MARGIN_L}" y1="{HEIGHT - MARGIN_B}" x2="{WIDTH - MARGIN_R}" '
        f'y2="{HEIGHT - MARGIN_B}" stroke="black" stroke-width="1"/>',
        f'<line x1="{MARGIN_L}" y1="{MARGIN_T}" x2="{MARGIN_L}" '
        f'y2="{HEIGHT - MARGIN_B}" stroke="black" stroke-width="1"/>',
    ]
    if title:
        parts.append(f'<text x="{WIDTH // 2}" y="20" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="14">{title}</text>')
    for c, curve in enumerate(truth_curves):
        color = CLASS_COLORS[c % len(CLASS_COLORS)]
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                     f'points="{_coords(grid, curve, x_range, y_max)}"/>')
    for c, curve in enumerate(kde_curves):
        if curve is None:
            continue
        color = CLASS_COLORS[c % len(CLASS_COLORS)]
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                     f'stroke-dasharray="6,4" '
                     f'points="{_coords(grid, curve, x_range, y_max)}"/>')
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")
    return path


def mixture_grid(spec: synthdata.GaussianMixtureSpec, points: int = 512) -> np.ndarray:
    """Plotting grid spanning all components with a 4-sigma margin."""
    lo = float(np.min(spec.means - 4.0 * spec.stds))
    hi = float(np.max(spec.means + 4.0 * spec.stds))
    return np.linspace(lo, hi, points)


def sample_panel(path: str, spec: synthdata.GaussianMixtureSpec,
                 fake_x: np.ndarray | None, fake_y: np.ndarray | None,
                 title: str = "") -> str:
    """Panel comparing per-class truth against a generated sample set.

    Per-class KDE curves are weighted by the empirical class share so they
    overlay the prior-weighted truth curves; classes with fewer than two
    samples are drawn truth-only.  ``fake_x=None`` gives a truth-only panel.
    """
    grid = mixture_grid(spec)
    joint = synthdata.true_joint_density(spec, grid[:, None])
    truth_curves = [joint[:, c] for c in range(spec.num_classes)]
    kde_curves: list[np.ndarray | None] | None = None
    if fake_x is not None and np.size(fake_x) > 0:
        flat = np.asarray(fake_x, dtype=np.float64).ravel()
        groups = metrics.group_by_class(flat, fake_y, spec.num_classes)
        kde_curves = []
        for values in groups:
            if values.size < 2:
                kde_curves.append(None)
                continue
            bw = metrics.silverman_bandwidth(values)
            est = metrics.kde(values, bw, grid)
            kde_curves.append(est.values * (values.size / flat.size))
    return density_panel(path, grid, truth_curves, kde_curves, title)
