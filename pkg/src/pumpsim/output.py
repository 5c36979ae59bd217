"""Deterministic CSV and SVG emission.

Every output file embeds a provenance block (tool version, command,
config hash) as leading '#' comment lines. Floats are written with 9
significant digits so identical configs yield byte-identical files.
No timestamps, no random ids.
"""

import math
from dataclasses import dataclass

from ._validation import require
from .errors import ValidationError


def fmt(value):
    """Fixed float formatting for all emitted numbers."""
    return f"{float(value):.9g}"


@dataclass(frozen=True)
class SweepResult:
    """Tabular sweep output plus its provenance.

    ``axes`` holds the swept grids (in row-major nesting order); the row
    count must equal the product of the grid sizes. Constant columns
    are repeated per row so every file carries the full operating
    point.
    """

    columns: tuple
    rows: tuple
    axes: dict
    provenance: dict

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(tuple(r) for r in self.rows))
        expected = 1
        for axis in self.axes.values():
            expected *= len(axis)
        require(
            len(self.rows) == expected,
            f"row count {len(self.rows)} != product of grid sizes {expected}",
        )
        for row in self.rows:
            require(len(row) == len(self.columns), "row width mismatch")
        for key in ("tool", "version", "config_hash"):
            require(key in self.provenance, f"provenance needs {key!r}")


def provenance_lines(provenance):
    return [f"# {k}: {v}" for k, v in provenance.items()]


def write_rows(fh, columns, rows, provenance, trailer=()):
    for line in provenance_lines(provenance):
        fh.write(line + "\n")
    fh.write(",".join(columns) + "\n")
    for row in rows:
        fh.write(",".join(fmt(v) for v in row) + "\n")
    for line in trailer:
        fh.write(f"# {line}\n")


def write_sweep_csv(fh, sweep, trailer=()):
    write_rows(fh, sweep.columns, sweep.rows, sweep.provenance, trailer=trailer)


# --- minimal SVG line charts (no display server, no plotting deps) ---

_WIDTH, _HEIGHT = 640, 480
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 72, 24, 40, 56
_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _escape(text):
    return (str(text).replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;"))


def _bounds(values):
    lo = min(values)
    hi = max(values)
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValidationError("chart values must be finite")
    if lo == hi:
        pad = 1.0 if lo == 0.0 else abs(lo) * 0.1
        lo, hi = lo - pad, hi + pad
    return lo, hi


def render_line_chart(fh, series, x_label, y_label, title, provenance=None):
    """Write an SVG line chart of ``series`` = [(label, xs, ys), ...]."""
    require(len(series) > 0, "at least one series is required")
    all_x = [x for _, xs, _ in series for x in xs]
    all_y = [y for _, _, ys in series for y in ys]
    require(len(all_x) > 0, "series must contain data points")
    x_lo, x_hi = _bounds(all_x)
    y_lo, y_hi = _bounds(all_y)

    plot_w = _WIDTH - _MARGIN_L - _MARGIN_R
    plot_h = _HEIGHT - _MARGIN_T - _MARGIN_B

    def px(x):
        return _MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y):
        return _MARGIN_T + (1.0 - (y - y_lo) / (y_hi - y_lo)) * plot_h

    out = []
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" '
        f'height="{_HEIGHT}" viewBox="0 0 {_WIDTH} {_HEIGHT}">'
    )
    for key, value in (provenance or {}).items():
        out.append(f'<!-- {_escape(key)}: {_escape(value)} -->')
    out.append(f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>')
    out.append(
        f'<text x="{_WIDTH / 2:.1f}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="16">{_escape(title)}</text>'
    )
    # axes frame
    out.append(
        f'<rect x="{_MARGIN_L}" y="{_MARGIN_T}" width="{plot_w}" '
        f'height="{plot_h}" fill="none" stroke="#333" stroke-width="1"/>'
    )
    n_ticks = 5
    for i in range(n_ticks):
        fx = x_lo + (x_hi - x_lo) * i / (n_ticks - 1)
        gx = px(fx)
        out.append(
            f'<line x1="{gx:.1f}" y1="{_MARGIN_T + plot_h}" x2="{gx:.1f}" '
            f'y2="{_MARGIN_T + plot_h + 5}" stroke="#333"/>'
        )
        out.append(
            f'<text x="{gx:.1f}" y="{_MARGIN_T + plot_h + 20}" '
            f'text-anchor="middle" font-family="sans-serif" font-size="11">'
            f'{fx:.4g}</text>'
        )
        fy = y_lo + (y_hi - y_lo) * i / (n_ticks - 1)
        gy = py(fy)
        out.append(
            f'<line x1="{_MARGIN_L - 5}" y1="{gy:.1f}" x2="{_MARGIN_L}" '
            f'y2="{gy:.1f}" stroke="#333"/>'
        )
        out.append(
            f'<text x="{_MARGIN_L - 8}" y="{gy + 4:.1f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{fy:.4g}</text>'
        )
    out.append(
        f'<text x="{_MARGIN_L + plot_w / 2:.1f}" y="{_HEIGHT - 14}" '
        f'text-anchor="middle" font-family="sans-serif" font-size="13">'
        f'{_escape(x_label)}</text>'
    )
    out.append(
        f'<text x="18" y="{_MARGIN_T + plot_h / 2:.1f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13" '
        f'transform="rotate(-90 18 {_MARGIN_T + plot_h / 2:.1f})">'
        f'{_escape(y_label)}</text>'
    )
    for idx, (label, xs, ys) in enumerate(series):
        color = _PALETTE[idx % len(_PALETTE)]
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys))
        out.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" '
            f'stroke-width="1.5"/>'
        )
        if len(series) > 1:
            ly = _MARGIN_T + 16 + 16 * idx
            out.append(
                f'<line x1="{_MARGIN_L + plot_w - 120}" y1="{ly}" '
                f'x2="{_MARGIN_L + plot_w - 96}" y2="{ly}" stroke="{color}" '
                f'stroke-width="1.5"/>'
            )
            out.append(
                f'<text x="{_MARGIN_L + plot_w - 90}" y="{ly + 4}" '
                f'font-family="sans-serif" font-size="11">{_escape(label)}</text>'
            )
    out.append("</svg>")
    fh.write("\n".join(out) + "\n")
