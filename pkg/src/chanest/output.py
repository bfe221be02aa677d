"""CSV and self-contained SVG emission for sweep results."""
from __future__ import annotations

import math

from .sweep import SweepRow, summarize

CSV_HEADER = "method,variable,value,trial,nmse_linear,nmse_db,iterations,converged,wall_ms"

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _fmt(x: float) -> str:
    # repr of a float is the shortest string that round-trips exactly.
    return repr(float(x))


def write_csv(rows: list[SweepRow], path) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(CSV_HEADER + "\n")
            for r in rows:
                fh.write(",".join([
                    r.method, r.variable, _fmt(r.value), str(r.trial),
                    _fmt(r.nmse_linear), _fmt(r.nmse_db), str(r.iterations),
                    "true" if r.converged else "false", _fmt(r.wall_ms),
                ]) + "\n")
    except OSError as exc:
        raise OSError(f"failed writing CSV to {path}: {exc}") from exc


def read_csv(path) -> list[SweepRow]:
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ValueError(f"{path}: unexpected CSV header")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            rows.append(SweepRow(
                method=parts[0], variable=parts[1], value=float(parts[2]),
                trial=int(parts[3]), nmse_linear=float(parts[4]),
                nmse_db=float(parts[5]), iterations=int(parts[6]),
                converged=parts[7] == "true", wall_ms=float(parts[8])))
    return rows


def write_svg_plot(rows: list[SweepRow], path) -> None:
    """Mean NMSE-dB per method over sweep values, with +/- one-std error bars.

    One polyline per method; entirely self-contained markup.
    """
    width, height = 640, 420
    left, right, top, bottom = 70, 170, 30, 50
    plot_w = width - left - right
    plot_h = height - top - bottom

    values: list[float] = []
    for r in rows:
        if r.value not in values:
            values.append(r.value)
    methods: list[str] = []
    for r in rows:
        if r.method not in methods:
            methods.append(r.method)
    stats = summarize(rows)

    ys = []
    for key, (mean, std, _n) in stats.items():
        ys.extend([mean - std, mean + std])
    finite = [y for y in ys if math.isfinite(y)]
    if finite:
        y_min, y_max = min(finite), max(finite)
    else:
        y_min, y_max = -1.0, 1.0
    if y_max - y_min < 1e-9:
        y_min -= 1.0
        y_max += 1.0
    pad = 0.05 * (y_max - y_min)
    y_min -= pad
    y_max += pad

    def x_pos(value: float) -> float:
        if len(values) == 1:
            return left + plot_w / 2
        return left + plot_w * values.index(value) / (len(values) - 1)

    def y_pos(y: float) -> float:
        return top + plot_h * (y_max - y) / (y_max - y_min)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{left}" y1="{top + plot_h}" x2="{left + plot_w}" '
        f'y2="{top + plot_h}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + plot_h}" '
        f'stroke="black"/>',
    ]
    for value in values:
        x = x_pos(value)
        parts.append(f'<text x="{x:.1f}" y="{top + plot_h + 18}" '
                     f'font-size="11" text-anchor="middle">{value:g}</text>')
    for frac in (0.0, 0.5, 1.0):
        y = y_min + frac * (y_max - y_min)
        parts.append(f'<text x="{left - 8}" y="{y_pos(y):.1f}" font-size="11" '
                     f'text-anchor="end">{y:.1f}</text>')
    parts.append(f'<text x="{left + plot_w / 2:.1f}" y="{height - 12}" '
                 f'font-size="12" text-anchor="middle">sweep value</text>')
    parts.append(f'<text x="18" y="{top + plot_h / 2:.1f}" font-size="12" '
                 f'text-anchor="middle" transform="rotate(-90 18 '
                 f'{top + plot_h / 2:.1f})">NMSE (dB)</text>')

    for idx, method in enumerate(methods):
        color = _PALETTE[idx % len(_PALETTE)]
        points = []
        for value in values:
            if (method, value) not in stats:
                continue
            mean, std, _n = stats[(method, value)]
            if not math.isfinite(mean):
                continue
            x, y = x_pos(value), y_pos(mean)
            points.append(f"{x:.2f},{y:.2f}")
            y_lo, y_hi = y_pos(mean - std), y_pos(mean + std)
            parts.append(f'<line x1="{x:.2f}" y1="{y_lo:.2f}" x2="{x:.2f}" '
                         f'y2="{y_hi:.2f}" stroke="{color}"/>')
            parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3" '
                         f'fill="{color}"/>')
        parts.append(f'<polyline points="{" ".join(points)}" fill="none" '
                     f'stroke="{color}" stroke-width="1.5"/>')
        legend_y = top + 16 * idx + 10
        parts.append(f'<line x1="{left + plot_w + 12}" y1="{legend_y}" '
                     f'x2="{left + plot_w + 36}" y2="{legend_y}" '
                     f'stroke="{color}" stroke-width="1.5"/>')
        parts.append(f'<text x="{left + plot_w + 42}" y="{legend_y + 4}" '
                     f'font-size="12">{method}</text>')
    parts.append("</svg>")
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(parts) + "\n")
    except OSError as exc:
        raise OSError(f"failed writing SVG to {path}: {exc}") from exc
