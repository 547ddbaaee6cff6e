"""Minimal deterministic SVG charts rendered straight from experiment CSVs.

Every renderer maps one CSV schema to one standalone figure.  Output bytes
are a pure function of the input file: coordinates are formatted at fixed
precision and no timestamps or random ids are embedded.  Data curves are the
only ``<path>`` elements; axes, ticks, and reference lines use ``<line>`` and
``<circle>`` so that structural checks can count curves.
"""

from __future__ import annotations

import csv
import math
import os
from pathlib import Path

__all__ = ["render_svg", "SVG_KINDS"]

_SCHEMAS = {
    "fig1": ["k", "residual", "prediction", "bound_pseudo", "bound_nr"],
    "fig2": ["trial", "abs_z", "x", "resolvent_norm"],
    "fig2_overlay": ["x", "abs_z", "e_sqrt"],
    "fig3": ["theta", "support_value", "vertex_re", "vertex_im"],
    "fig3_eigs": ["re", "im"],
    "fig4": ["trial", "alpha", "norm"],
    "annulus": ["re_z", "im_z", "abs_z", "resolvent_norm"],
}
SVG_KINDS = tuple(_SCHEMAS)

_W, _H = 640.0, 460.0
_ML, _MR, _MT, _MB = 64.0, 18.0, 20.0, 44.0
_CURVE_COLORS = ("#1b6ca8", "#c0392b", "#7d3c98", "#1e8449", "#b7950b", "#2e4053")
_LOG_FLOOR = 1e-18


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _read_rows(path, kind: str) -> list[dict[str, float]]:
    expected = _SCHEMAS[kind]
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file, expected columns {expected}") from None
        # fig4 also accepts the single-sweep schema without a trial column.
        if kind == "fig4" and header == ["alpha", "norm"]:
            expected = ["alpha", "norm"]
        if header != expected:
            raise ValueError(
                f"{path}: column mismatch for kind {kind!r}: "
                f"got {header}, expected {expected}"
            )
        rows = []
        for raw in reader:
            if len(raw) != len(expected):
                raise ValueError(f"{path}: ragged row {raw!r}")
            row = {name: float(val) for name, val in zip(expected, raw)}
            if kind == "fig4" and "trial" not in row:
                row["trial"] = 0.0
            rows.append(row)
    if not rows:
        raise ValueError(f"{path}: no data rows, refusing to render")
    return rows


class _Axis:
    """Affine or log map from data values to pixel coordinates."""

    def __init__(self, lo: float, hi: float, p0: float, p1: float, log: bool):
        if log:
            lo = max(lo, _LOG_FLOOR)
            hi = max(hi, lo * 10.0)
            self.lo, self.hi = math.log10(lo), math.log10(hi)
        else:
            if hi <= lo:
                hi = lo + 1.0
            self.lo, self.hi = lo, hi
        pad = 0.04 * (self.hi - self.lo)
        self.lo -= pad
        self.hi += pad
        self.p0, self.p1 = p0, p1
        self.log = log

    def __call__(self, v: float) -> float:
        t = math.log10(max(v, _LOG_FLOOR)) if self.log else v
        return self.p0 + (t - self.lo) / (self.hi - self.lo) * (self.p1 - self.p0)

    def ticks(self) -> list[tuple[float, str]]:
        if self.log:
            out = []
            for d in range(math.ceil(self.lo), math.floor(self.hi) + 1):
                out.append((self(10.0**d), f"1e{d}"))
            if not out:
                mid = 0.5 * (self.lo + self.hi)
                out.append((self(10.0**mid), f"{10.0 ** mid:.3g}"))
            return out
        out = []
        for j in range(5):
            v = self.lo + j * (self.hi - self.lo) / 4.0
            out.append((self(v), f"{v:.3g}"))
        return out


def _axes_svg(xa: _Axis, ya: _Axis, x_label: str, y_label: str) -> list[str]:
    x0, x1 = _ML, _W - _MR
    y0, y1 = _H - _MB, _MT
    parts = [
        f'<line x1="{_fmt(x0)}" y1="{_fmt(y0)}" x2="{_fmt(x1)}" y2="{_fmt(y0)}" '
        'stroke="#333" stroke-width="1"/>',
        f'<line x1="{_fmt(x0)}" y1="{_fmt(y0)}" x2="{_fmt(x0)}" y2="{_fmt(y1)}" '
        'stroke="#333" stroke-width="1"/>',
    ]
    for px, label in xa.ticks():
        parts.append(
            f'<line x1="{_fmt(px)}" y1="{_fmt(y0)}" x2="{_fmt(px)}" y2="{_fmt(y0 + 4)}" '
            'stroke="#333" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(px)}" y="{_fmt(y0 + 16)}" font-size="10" '
            f'text-anchor="middle" fill="#333">{label}</text>'
        )
    for py, label in ya.ticks():
        parts.append(
            f'<line x1="{_fmt(x0 - 4)}" y1="{_fmt(py)}" x2="{_fmt(x0)}" y2="{_fmt(py)}" '
            'stroke="#333" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(x0 - 6)}" y="{_fmt(py + 3)}" font-size="10" '
            f'text-anchor="end" fill="#333">{label}</text>'
        )
    parts.append(
        f'<text x="{_fmt((x0 + x1) / 2)}" y="{_fmt(_H - 8)}" font-size="11" '
        f'text-anchor="middle" fill="#333">{x_label}</text>'
    )
    parts.append(
        f'<text x="14" y="{_fmt((y0 + y1) / 2)}" font-size="11" text-anchor="middle" '
        f'fill="#333" transform="rotate(-90 14 {_fmt((y0 + y1) / 2)})">{y_label}</text>'
    )
    return parts


def _path(points: list[tuple[float, float]], color: str, dashed: bool = False) -> str:
    segs = []
    pen_up = True
    for x, y in points:
        if x is None:
            pen_up = True
            continue
        cmd = "M" if pen_up else "L"
        segs.append(f"{cmd}{_fmt(x)},{_fmt(y)}")
        pen_up = False
    dash = ' stroke-dasharray="5,3"' if dashed else ""
    return (
        f'<path d="{" ".join(segs)}" fill="none" stroke="{color}" '
        f'stroke-width="1.5"{dash}/>'
    )


def _document(body: list[str]) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(_W)}" '
        f'height="{_fmt(_H)}" viewBox="0 0 {_fmt(_W)} {_fmt(_H)}">'
    )
    bg = f'<rect width="{_fmt(_W)}" height="{_fmt(_H)}" fill="#ffffff"/>'
    return "\n".join([head, bg, *body, "</svg>"]) + "\n"


def _line_chart(
    rows: list[dict[str, float]],
    x_col: str,
    y_cols: list[str],
    x_label: str,
    y_label: str,
    log_y: bool,
    group_col: str | None = None,
) -> str:
    xs = [r[x_col] for r in rows]
    ys = [r[c] for r in rows for c in y_cols if math.isfinite(r[c])]
    pos = [v for v in ys if v > 0.0] if log_y else ys
    if not pos:
        raise ValueError("no plottable values")
    xa = _Axis(min(xs), max(xs), _ML, _W - _MR, log=False)
    ya = _Axis(min(pos), max(pos), _H - _MB, _MT, log=log_y)
    body = _axes_svg(xa, ya, x_label, y_label)
    groups: list[list[dict[str, float]]]
    if group_col is None:
        groups = [rows]
    else:
        keys = sorted({r[group_col] for r in rows})
        groups = [[r for r in rows if r[group_col] == k] for k in keys]
    color_idx = 0
    for col in y_cols:
        for grp in groups:
            pts = []
            for r in grp:
                v = r[col]
                if not math.isfinite(v) or (log_y and v <= 0.0):
                    pts.append((None, None))
                else:
                    pts.append((xa(r[x_col]), ya(v)))
            body.append(_path(pts, _CURVE_COLORS[color_idx % len(_CURVE_COLORS)]))
        color_idx += 1
    return _document(body)


def _render_fig1(rows: list[dict[str, float]]) -> str:
    return _line_chart(
        rows,
        "k",
        ["residual", "prediction", "bound_pseudo", "bound_nr"],
        "iteration k",
        "relative residual",
        log_y=True,
    )


def _render_fig4(rows: list[dict[str, float]]) -> str:
    keys = sorted({r["trial"] for r in rows})
    norms = [r["norm"] for r in rows]
    alphas = [r["alpha"] for r in rows]
    xa = _Axis(min(alphas), max(alphas), _ML, _W - _MR, log=False)
    ya = _Axis(min(norms + [1.0]), max(norms + [math.sqrt(2.0)]), _H - _MB, _MT, log=False)
    body = _axes_svg(xa, ya, "alpha", "norm")
    ref = ya(math.sqrt(2.0))
    body.append(
        f'<line x1="{_fmt(_ML)}" y1="{_fmt(ref)}" x2="{_fmt(_W - _MR)}" '
        f'y2="{_fmt(ref)}" stroke="#555" stroke-width="1" stroke-dasharray="2,3"/>'
    )
    for i, k in enumerate(keys):
        pts = [(xa(r["alpha"]), ya(r["norm"])) for r in rows if r["trial"] == k]
        body.append(_path(pts, _CURVE_COLORS[i % len(_CURVE_COLORS)]))
    return _document(body)


def _square_frame(extent: float) -> tuple[_Axis, _Axis]:
    side = min(_W - _ML - _MR, _H - _MT - _MB)
    cx, cy = _ML + (_W - _ML - _MR) / 2.0, _MT + (_H - _MT - _MB) / 2.0
    xa = _Axis(-extent, extent, cx - side / 2.0, cx + side / 2.0, log=False)
    ya = _Axis(-extent, extent, cy + side / 2.0, cy - side / 2.0, log=False)
    return xa, ya


def _render_fig3(rows: list[dict[str, float]]) -> str:
    ref = math.sqrt(2.0)
    vx = [r["vertex_re"] for r in rows]
    vy = [r["vertex_im"] for r in rows]
    extent = 1.1 * max(max(map(abs, vx + vy)), ref)
    xa, ya = _square_frame(extent)
    body = _axes_svg(xa, ya, "Re z", "Im z")
    r_px = abs(xa(ref) - xa(0.0))
    body.append(
        f'<circle cx="{_fmt(xa(0.0))}" cy="{_fmt(ya(0.0))}" r="{_fmt(r_px)}" '
        'fill="none" stroke="#555" stroke-width="1" stroke-dasharray="2,3"/>'
    )
    pts = [(xa(x), ya(y)) for x, y in zip(vx, vy)]
    pts.append(pts[0])
    body.append(_path(pts, _CURVE_COLORS[0]))
    return _document(body)


def _render_fig3_eigs(rows: list[dict[str, float]]) -> str:
    xs = [r["re"] for r in rows]
    ys = [r["im"] for r in rows]
    extent = 1.1 * max(max(map(abs, xs + ys)), math.sqrt(2.0))
    xa, ya = _square_frame(extent)
    body = _axes_svg(xa, ya, "Re lambda", "Im lambda")
    r_px = abs(xa(math.sqrt(2.0)) - xa(0.0))
    body.append(
        f'<circle cx="{_fmt(xa(0.0))}" cy="{_fmt(ya(0.0))}" r="{_fmt(r_px)}" '
        'fill="none" stroke="#555" stroke-width="1" stroke-dasharray="2,3"/>'
    )
    for x, y in zip(xs, ys):
        body.append(
            f'<circle cx="{_fmt(xa(x))}" cy="{_fmt(ya(y))}" r="1.6" fill="#1b6ca8"/>'
        )
    return _document(body)


def _render_scatter(
    rows: list[dict[str, float]], x_col: str, y_col: str, x_label: str, y_label: str
) -> str:
    xs = [r[x_col] for r in rows]
    ys = [r[y_col] for r in rows if r[y_col] > 0.0 and math.isfinite(r[y_col])]
    if not ys:
        raise ValueError("no plottable values")
    xa = _Axis(min(xs), max(xs), _ML, _W - _MR, log=False)
    ya = _Axis(min(ys), max(ys), _H - _MB, _MT, log=True)
    body = _axes_svg(xa, ya, x_label, y_label)
    for r in rows:
        v = r[y_col]
        if v > 0.0 and math.isfinite(v):
            body.append(
                f'<circle cx="{_fmt(xa(r[x_col]))}" cy="{_fmt(ya(v))}" r="2.2" '
                'fill="#1b6ca8" fill-opacity="0.65"/>'
            )
    return _document(body)


def render_svg(csv_path, kind: str):
    """Render one experiment CSV to a sibling ``.svg`` file.

    The CSV header must match the schema for ``kind`` exactly, and the file
    must contain at least one data row; otherwise nothing is written.
    Returns the output path.
    """
    if kind not in _SCHEMAS:
        raise ValueError(f"unknown figure kind {kind!r}, expected one of {SVG_KINDS}")
    path = Path(os.fspath(csv_path))
    rows = _read_rows(path, kind)
    if kind == "fig1":
        doc = _render_fig1(rows)
    elif kind == "fig2":
        doc = _render_scatter(rows, "x", "resolvent_norm", "|z|^2 - 1", "resolvent norm")
    elif kind == "fig2_overlay":
        for r in rows:
            # The stored column is e^{1/2}; the resolvent norm tends to its
            # reciprocal, which is what belongs on the shared y axis.
            r["pred"] = 1.0 / r["e_sqrt"] if r["e_sqrt"] > 0.0 else math.inf
        doc = _line_chart(
            rows, "x", ["pred"], "|z|^2 - 1", "limiting resolvent norm", log_y=True
        )
    elif kind == "fig3":
        doc = _render_fig3(rows)
    elif kind == "fig3_eigs":
        doc = _render_fig3_eigs(rows)
    elif kind == "fig4":
        doc = _render_fig4(rows)
    else:
        doc = _render_scatter(
            rows, "abs_z", "resolvent_norm", "|z|", "resolvent norm"
        )
    out = path.with_suffix(".svg")
    with open(out, "w", newline="\n") as fh:
        fh.write(doc)
    return out
