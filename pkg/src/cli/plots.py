"""Minimal SVG line charts for experiment artifacts.

Output depends only on the data, so identical runs give identical files.
"""

import math
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from ..core.models import DecayFit, OrderParameter, SmoothedFrequencies, Trajectory

WIDTH = 640
HEIGHT = 400
MARGIN = 56
MAX_POINTS = 1500
PALETTE = (
    "#1f77b4",
    "#ff7f0e",
    "#2ca02c",
    "#d62728",
    "#9467bd",
    "#8c564b",
    "#e377c2",
    "#7f7f7f",
    "#bcbd22",
    "#17becf",
)

Series = Tuple[str, np.ndarray, np.ndarray]


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _thin(x: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    if x.size <= MAX_POINTS:
        return x, y
    stride = int(math.ceil(x.size / MAX_POINTS))
    idx = np.arange(0, x.size, stride)
    if idx[-1] != x.size - 1:
        idx = np.append(idx, x.size - 1)
    return x[idx], y[idx]


def _range(values: List[np.ndarray]) -> Tuple[float, float]:
    finite = [v[np.isfinite(v)] for v in values]
    finite = [v for v in finite if v.size]
    if not finite:
        return 0.0, 1.0
    lo = min(float(v.min()) for v in finite)
    hi = max(float(v.max()) for v in finite)
    if hi - lo < 1e-12 * max(1.0, abs(hi)):
        lo, hi = lo - 0.5, hi + 0.5
    return lo, hi


def _panel(series: Sequence[Series], title: str, xlabel: str, ylabel: str, x0: float, width: float) -> List[str]:
    """SVG elements of one chart occupying [x0, x0 + width] horizontally."""
    xs = [np.asarray(s[1], dtype=np.float64) for s in series]
    ys = [np.asarray(s[2], dtype=np.float64) for s in series]
    xlo, xhi = _range(xs)
    ylo, yhi = _range(ys)
    left, right = x0 + MARGIN, x0 + width - MARGIN / 2
    top, bottom = MARGIN / 2, HEIGHT - MARGIN

    def px(x: np.ndarray) -> np.ndarray:
        return left + (x - xlo) / (xhi - xlo) * (right - left)

    def py(y: np.ndarray) -> np.ndarray:
        return bottom - (y - ylo) / (yhi - ylo) * (bottom - top)

    out = [
        f'<rect x="{_fmt(left)}" y="{_fmt(top)}" width="{_fmt(right - left)}" height="{_fmt(bottom - top)}" '
        'fill="none" stroke="#333"/>',
        f'<text x="{_fmt((left + right) / 2)}" y="{_fmt(top - 8)}" text-anchor="middle" font-size="14">{title}</text>',
        f'<text x="{_fmt((left + right) / 2)}" y="{_fmt(HEIGHT - 12)}" text-anchor="middle" font-size="12">{xlabel}</text>',
        f'<text x="{_fmt(x0 + 14)}" y="{_fmt((top + bottom) / 2)}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 {_fmt(x0 + 14)} {_fmt((top + bottom) / 2)})">{ylabel}</text>',
        f'<text x="{_fmt(left)}" y="{_fmt(bottom + 16)}" font-size="10">{_fmt(xlo)}</text>',
        f'<text x="{_fmt(right)}" y="{_fmt(bottom + 16)}" text-anchor="end" font-size="10">{_fmt(xhi)}</text>',
        f'<text x="{_fmt(left - 4)}" y="{_fmt(bottom)}" text-anchor="end" font-size="10">{_fmt(ylo)}</text>',
        f'<text x="{_fmt(left - 4)}" y="{_fmt(top + 10)}" text-anchor="end" font-size="10">{_fmt(yhi)}</text>',
    ]
    for i, ((label, _, _), x, y) in enumerate(zip(series, xs, ys)):
        color = PALETTE[i % len(PALETTE)]
        keep = np.isfinite(x) & np.isfinite(y)
        tx, ty = _thin(x[keep], y[keep])
        if tx.size:
            points = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(px(tx), py(ty)))
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1" points="{points}"/>')
        if label:
            ly = top + 14 + 14 * i
            out.append(f'<text x="{_fmt(right - 6)}" y="{_fmt(ly)}" text-anchor="end" font-size="10" fill="{color}">{label}</text>')
    return out


def line_chart(series: Sequence[Series], title: str, xlabel: str = "t", ylabel: str = "") -> str:
    body = _panel(series, title, xlabel, ylabel, 0.0, WIDTH)
    return _document(body, WIDTH)


def side_by_side(panels: Sequence[Tuple[Sequence[Series], str, str, str]]) -> str:
    """Several charts in one row; each entry is (series, title, xlabel, ylabel)."""
    body: List[str] = []
    for k, (series, title, xlabel, ylabel) in enumerate(panels):
        body.extend(_panel(series, title, xlabel, ylabel, k * WIDTH, WIDTH))
    return _document(body, WIDTH * len(panels))


def _document(body: List[str], width: float) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" height="{HEIGHT}" '
        f'viewBox="0 0 {_fmt(width)} {HEIGHT}">'
    )
    return "\n".join([head, '<rect width="100%" height="100%" fill="white"/>', *body, "</svg>"]) + "\n"


def write_svg(svg: str, path: Union[str, Path]) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(svg, encoding="utf-8")
    return p


# ---------------------------------------------------------------------------
# experiment figures
# ---------------------------------------------------------------------------


def phase_traces(traj: Trajectory) -> str:
    series = [("" if traj.n > len(PALETTE) else f"theta_{i}", traj.times, traj.theta[:, i]) for i in range(traj.n)]
    series.append(("mean", traj.times, traj.mean_phase))
    return line_chart(series, "phases", ylabel="theta")


def order_parameter_chart(times: np.ndarray, op: OrderParameter) -> str:
    return line_chart([("r", times, op.r)], "order parameter", ylabel="r")


def decay_chart(traj: Trajectory, fit: Optional[DecayFit]) -> str:
    """log ||theta_hat|| with the fitted line over its window."""
    norms = np.linalg.norm(traj.theta_hat, axis=1)
    with np.errstate(divide="ignore"):
        logs = np.log(norms)
    series: List[Series] = [("log |theta_hat|", traj.times, logs)]
    if fit is not None and fit.rate is not None and fit.intercept is not None:
        t = np.array(fit.window)
        series.append((f"fit rate {_fmt(fit.rate)}", t, fit.intercept - fit.rate * t))
    return line_chart(series, "decay of the phase spread", ylabel="log norm")


def frequency_panels(freqs: SmoothedFrequencies, traj: Trajectory) -> str:
    """Smoothed finite difference frequencies per window and the frequency system."""
    panels = []
    for w, values in freqs.smoothed.items():
        series = [("", freqs.times, values[:, i]) for i in range(values.shape[1])]
        series.append(("mean", freqs.times, freqs.mean_smoothed[w]))
        panels.append((series, f"smoothing {_fmt(w)}", "t", "frequency"))
    if traj.varpi is not None:
        series = [("", traj.times, traj.varpi[:, i]) for i in range(traj.n)]
        panels.append((series, "frequency system", "t", "varpi"))
    return side_by_side(panels)


def hyperplane_projections(traj: Trajectory) -> str:
    """Phase curve projected on (theta_0, theta_1) and (theta_1, theta_2)."""
    th = traj.theta
    first = th[:, min(1, traj.n - 1)]
    second = th[:, min(2, traj.n - 1)]
    return side_by_side(
        [
            ([("", th[:, 0], first)], "projection (theta_0, theta_1)", "theta_0", "theta_1"),
            ([("", first, second)], "projection (theta_1, theta_2)", "theta_1", "theta_2"),
        ]
    )
