"""Minimal deterministic SVG line charts.

Hand-rolled rather than delegated to a plotting library so that output
bytes are a pure function of the input data: no timestamps, no hashed
ids, no library-version drift.  Good enough for rate-vs-power sweep
figures.
"""

import csv

_WIDTH, _HEIGHT = 720, 480
_ML, _MR, _MT, _MB = 78, 20, 24, 56
_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"]


def _nice_step(span: float, target: int = 5) -> float:
    if span <= 0:
        return 1.0
    raw = span / target
    mag = 10.0 ** int(f"{raw:e}".split("e")[1])
    for m in (1.0, 2.0, 5.0, 10.0):
        if m * mag >= raw:
            return m * mag
    return 10.0 * mag


def _ticks(lo: float, hi: float):
    step = _nice_step(hi - lo)
    t = []
    v = step * int(lo / step)
    if v < lo - 1e-12:
        v += step
    while v <= hi + 1e-9 * max(1.0, abs(hi)):
        t.append(v)
        v += step
    return t or [lo, hi]


def _fmt(v: float) -> str:
    return f"{v:.10g}"


def render_lines(series: dict, x_label: str, y_label: str) -> str:
    """Render named (x, y) series to an SVG document string."""
    xs = [x for pts in series.values() for x, _ in pts]
    ys = [y for pts in series.values() for _, y in pts]
    if not xs:
        raise ValueError("nothing to plot: all series are empty")
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad
    pw = _WIDTH - _ML - _MR
    ph = _HEIGHT - _MT - _MB

    def sx(x):
        return _ML + (x - x_lo) / (x_hi - x_lo) * pw

    def sy(y):
        return _MT + ph - (y - y_lo) / (y_hi - y_lo) * ph

    out = []
    out.append(f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" '
               f'height="{_HEIGHT}" viewBox="0 0 {_WIDTH} {_HEIGHT}">')
    out.append(f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>')
    out.append(f'<rect x="{_ML}" y="{_MT}" width="{pw}" height="{ph}" '
               f'fill="none" stroke="#333333" stroke-width="1"/>')
    for tx in _ticks(x_lo, x_hi):
        px = sx(tx)
        out.append(f'<line x1="{px:.2f}" y1="{_MT + ph}" x2="{px:.2f}" '
                   f'y2="{_MT + ph + 5}" stroke="#333333"/>')
        out.append(f'<text x="{px:.2f}" y="{_MT + ph + 20}" font-size="12" '
                   f'text-anchor="middle" font-family="sans-serif">{_fmt(tx)}</text>')
    for ty in _ticks(y_lo, y_hi):
        py = sy(ty)
        out.append(f'<line x1="{_ML - 5}" y1="{py:.2f}" x2="{_ML}" '
                   f'y2="{py:.2f}" stroke="#333333"/>')
        out.append(f'<text x="{_ML - 9}" y="{py:.2f}" font-size="12" '
                   f'text-anchor="end" dominant-baseline="middle" '
                   f'font-family="sans-serif">{_fmt(ty)}</text>')
    out.append(f'<text x="{_ML + pw / 2:.2f}" y="{_HEIGHT - 14}" font-size="13" '
               f'text-anchor="middle" font-family="sans-serif">{x_label}</text>')
    out.append(f'<text x="18" y="{_MT + ph / 2:.2f}" font-size="13" '
               f'text-anchor="middle" font-family="sans-serif" '
               f'transform="rotate(-90 18 {_MT + ph / 2:.2f})">{y_label}</text>')
    for i, (name, pts) in enumerate(series.items()):
        color = _PALETTE[i % len(_PALETTE)]
        if pts:
            path = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
            out.append(f'<polyline points="{path}" fill="none" '
                       f'stroke="{color}" stroke-width="1.8"/>')
        ly = _MT + 16 + 16 * i
        out.append(f'<line x1="{_ML + 10}" y1="{ly}" x2="{_ML + 34}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="1.8"/>')
        out.append(f'<text x="{_ML + 40}" y="{ly + 4}" font-size="12" '
                   f'font-family="sans-serif">{name}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_plot(csv_path, columns, out_svg) -> None:
    """Plot the named CSV columns against total_power_dbm, one line per
    (mode, column); rows whose cells are not numeric (e.g. infeasible
    markers) are skipped."""
    with open(csv_path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        rows = list(reader)
        header = reader.fieldnames or []
    missing = [c for c in list(columns) + ["total_power_dbm", "mode"]
               if c not in header]
    if missing:
        raise ValueError(f"CSV {csv_path} is missing columns: {missing}")
    series = {}
    for row in rows:
        try:
            x = float(row["total_power_dbm"])
        except ValueError:
            continue
        for col in columns:
            try:
                y = float(row[col])
            except ValueError:
                continue
            series.setdefault(f"{row['mode']} {col}", []).append((x, y))
    svg = render_lines(series, "total power [dBm]", "rate [bits/s/Hz]")
    with open(out_svg, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(svg)
