"""Deterministic SVG drawings of point configurations.

Each configuration gets a 512 x 512 panel: the centroid sits at the panel
centre and the farthest point at 40% of the panel width from it. Points
are circles joined by a closed path in label order; points that coincide
share one circle with a multiplicity badge.
"""

from __future__ import annotations

from html import escape
from pathlib import Path

import numpy as np

from .shape_core import PointConfig

CANVAS = 512
FILL = 0.8
RADIUS = 6
COINCIDE_TOL = 1e-9


def _num(x: float) -> str:
    s = f"{x:.3f}"
    return "0.000" if s == "-0.000" else s


def group_coincident(points: np.ndarray, tol: float = COINCIDE_TOL) -> list:
    """Cluster points closer than `tol` times the diameter.

    Returns (representative position, label list) in order of first label.
    """
    diam = float(np.max(np.abs(points[:, None] - points[None, :])))
    eps = tol * diam
    groups = []
    for j, z in enumerate(points):
        for g in groups:
            if abs(z - g[0]) <= eps:
                g[1].append(j)
                break
        else:
            groups.append((z, [j]))
    return groups


def _panel(config: PointConfig, caption: str, x0: float, options: dict) -> list:
    z = config.points - config.points.mean()
    reach = float(np.max(np.abs(z)))
    scale = FILL * CANVAS / 2 / reach
    cx, cy = x0 + CANVAS / 2, CANVAS / 2
    pos = [(cx + scale * p.real, cy - scale * p.imag) for p in z]
    stroke = options.get("stroke", "#1f4e79")
    out = ['<g class="shape">']
    d = "M " + " L ".join(f"{_num(x)} {_num(y)}" for x, y in pos) + " Z"
    out.append(f'<path d="{d}" fill="none" stroke="{stroke}" stroke-width="1.5"/>')
    for rep, labels in group_coincident(z):
        x, y = cx + scale * rep.real, cy - scale * rep.imag
        out.append(f'<circle cx="{_num(x)}" cy="{_num(y)}" r="{RADIUS}" fill="{stroke}"/>')
        if options.get("labels", True):
            text = ",".join(str(j + 1) for j in labels)
            out.append(f'<text x="{_num(x - 10)}" y="{_num(y - 10)}" font-size="11" '
                       f'text-anchor="end" class="label">{text}</text>')
        if len(labels) > 1:
            out.append(f'<text x="{_num(x + 9)}" y="{_num(y + 4)}" font-size="12" '
                       f'class="badge">{len(labels)}</text>')
    if caption:
        out.append(f'<text x="{_num(cx)}" y="{_num(CANVAS - 12)}" font-size="14" '
                   f'text-anchor="middle" class="caption">{escape(caption)}</text>')
    out.append("</g>")
    return out


def render_svg(configs, options: dict | None = None) -> str:
    """Render ``[(PointConfig, caption), ...]`` side by side as SVG 1.1 text."""
    options = options or {}
    items = [(c if isinstance(c, PointConfig) else PointConfig(c), cap) for c, cap in configs]
    width = CANVAS * max(1, len(items))
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" '
        f'height="{CANVAS}" viewBox="0 0 {width} {CANVAS}">',
        f'<rect width="{width}" height="{CANVAS}" fill="white"/>',
    ]
    for i, (config, caption) in enumerate(items):
        lines.extend(_panel(config, caption, i * CANVAS, options))
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def write_svg(path, configs, options=None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_svg(configs, options), encoding="utf-8")
    return path
