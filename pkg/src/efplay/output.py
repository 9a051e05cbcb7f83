"""Result files: CSV traces, final clouds and plain SVG plots."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .types import RunTrace, as_positions

TRACE_HEADER = ("epoch", "t", "objective", "validation_error", "entropy_rel_g", "free_energy",
                "aux_w1", "aux_tv", "wall_s")


def fmt(value) -> str:
    """Locale-free scientific notation with 9 significant digits; empty for NaN/None."""
    if value is None:
        return ""
    value = float(value)
    if math.isnan(value):
        return ""
    return f"{value:.8e}"


def trace_rows(trace: RunTrace, record_wall_clock: bool = False):
    yield ",".join(TRACE_HEADER)
    for r in trace.records:
        yield ",".join([
            str(r.epoch), fmt(r.t), fmt(r.objective_value), fmt(r.validation_error),
            fmt(r.entropy_rel_g), fmt(r.free_energy), fmt(r.aux.get("w1")), fmt(r.aux.get("tv")),
            fmt(r.wall_s) if record_wall_clock else "",
        ])


def write_trace(trace: RunTrace, path, record_wall_clock: bool = False):
    """Write ``trace.csv``. Wall-clock times are left out unless requested,
    so that repeated runs produce identical files."""
    _write_lines(path, trace_rows(trace, record_wall_clock))


def cloud_header(dim: int, nn: bool) -> list[str]:
    if nn:
        return ["beta"] + [f"alpha_{i}" for i in range(1, dim - 1)] + ["gamma"]
    return [f"x_{i}" for i in range(1, dim + 1)]


def write_cloud(cloud, path, nn: bool = False):
    pos = as_positions(cloud)
    lines = [",".join(cloud_header(pos.shape[1], nn))]
    lines += [",".join(fmt(v) for v in row) for row in pos]
    _write_lines(path, lines)


def read_cloud(path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


def _write_lines(path, lines):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in lines:
            fh.write(line + "\n")


# --- SVG -------------------------------------------------------------------

_W, _H, _PAD = 640, 420, 56


def _scale(values, lo, hi, a, b):
    span = hi - lo if hi > lo else 1.0
    return a + (np.asarray(values) - lo) / span * (b - a)


def line_plot_svg(series, *, title="", xlabel="", ylabel="", logy=False) -> str:
    """Minimal SVG document with one polyline per ``(label, x, y, colour)``."""
    prepared = []
    for label, x, y, colour in series:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        ok = np.isfinite(x) & np.isfinite(y)
        if logy:
            ok &= y > 0
        x, y = x[ok], y[ok]
        if logy:
            y = np.log10(y)
        if x.size:
            prepared.append((label, x, y, colour))
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
             f'viewBox="0 0 {_W} {_H}">',
             f'<rect width="{_W}" height="{_H}" fill="white"/>',
             f'<text x="{_W / 2}" y="22" text-anchor="middle" font-size="15">{title}</text>']
    if prepared:
        xs = np.concatenate([p[1] for p in prepared])
        ys = np.concatenate([p[2] for p in prepared])
        x0, x1, y0, y1 = xs.min(), xs.max(), ys.min(), ys.max()
        left, right, top, bottom = _PAD, _W - 20, 36, _H - _PAD
        parts.append(f'<rect x="{left}" y="{top}" width="{right - left}" height="{bottom - top}" '
                     'fill="none" stroke="black"/>')
        for frac in (0.0, 0.5, 1.0):
            yv = y0 + frac * (y1 - y0)
            yp = _scale(yv, y0, y1, bottom, top)
            tick = f"1e{yv:.1f}" if logy else f"{yv:.3g}"
            parts.append(f'<text x="{left - 4}" y="{yp:.1f}" text-anchor="end" font-size="11">{tick}</text>')
            xv = x0 + frac * (x1 - x0)
            xp = _scale(xv, x0, x1, left, right)
            parts.append(f'<text x="{xp:.1f}" y="{bottom + 16}" text-anchor="middle" font-size="11">{xv:.3g}</text>')
        for i, (label, x, y, colour) in enumerate(prepared):
            px = _scale(x, x0, x1, left, right)
            py = _scale(y, y0, y1, bottom, top)
            pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))
            parts.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{pts}"/>')
            parts.append(f'<text x="{right - 6}" y="{top + 16 + 14 * i}" text-anchor="end" '
                         f'font-size="11" fill="{colour}">{label}</text>')
    parts.append(f'<text x="{_W / 2}" y="{_H - 14}" text-anchor="middle" font-size="12">{xlabel}</text>')
    parts.append(f'<text x="14" y="{_H / 2}" font-size="12" transform="rotate(-90 14 {_H / 2})" '
                 f'text-anchor="middle">{ylabel}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _blues(n):
    # light to dark
    return [f"rgb({int(200 - 170 * i / max(n - 1, 1))},{int(220 - 170 * i / max(n - 1, 1))},255)"
            for i in range(n)]


def write_error_svg(traces, path):
    series = []
    colours = ("#1f4e9c", "#c0392b")
    for trace, colour in zip(traces, colours):
        y = trace.column("validation_error")
        name = "validation error"
        if not np.any(np.isfinite(y)):
            y, name = trace.column("free_energy"), "free energy"
        series.append((trace.label, trace.column("epoch"), y, colour))
    Path(path).write_text(line_plot_svg(series, title=f"{name} per epoch", xlabel="epoch",
                                        ylabel=name, logy=True), encoding="utf-8")


def write_fit_svg(trace: RunTrace, objective, dataset, path):
    z = dataset.validation_features
    epochs = sorted(trace.checkpoints)
    series = [(f"epoch {e}", z[:, 0], objective.network_output(trace.checkpoints[e], z), c)
              for e, c in zip(epochs, _blues(len(epochs)))]
    series.append(("target", z[:, 0], dataset.validation_labels, "#222222"))
    Path(path).write_text(line_plot_svg(series, title="learned function", xlabel="z", ylabel="output"),
                          encoding="utf-8")
