"""
Output helpers: JSON reports, CSV grids and SVG heatmaps.

The heatmap emitter writes one <rect> per lattice cell with colors from a
256-entry ramp interpolated between fixed perceptually uniform anchors.
"""

import json
import logging
import os
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from models.lattice import BoxDomain

logger = logging.getLogger(__name__)

RAMP_ANCHORS = ['#440154', '#472c7a', '#3b518b', '#2c718e', '#21908d',
                '#27ad81', '#5cc863', '#aadc32', '#fde725']


def _build_ramp(anchors: List[str], size: int = 256) -> List[str]:
    rgb = np.array([[int(h[i:i + 2], 16) for i in (1, 3, 5)] for h in anchors], dtype=float)
    pos = np.linspace(0.0, 1.0, len(anchors))
    t = np.linspace(0.0, 1.0, size)
    channels = [np.interp(t, pos, rgb[:, c]) for c in range(3)]
    return ['#%02x%02x%02x' % tuple(int(round(ch[i])) for ch in channels) for i in range(size)]


COLOR_RAMP = _build_ramp(RAMP_ANCHORS)


def ensure_dir(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path


def write_json(path: str, data: Dict) -> str:
    with open(path, 'w') as f:
        json.dump(data, f, indent=4)
    return path


def write_frame(df: pd.DataFrame, path: str) -> str:
    df.to_csv(path, index=False)
    return path


def svg_heatmap(values: np.ndarray, box: BoxDomain, path: str, title: str = '',
                cell: int = 4, vmax: Optional[float] = None) -> Optional[str]:
    """Linear heatmap of a real 2-D grid over `box`; x1 runs right, x2 runs up."""
    if box.dim != 2:
        logger.warning("SVG heatmaps are only drawn for d = 2 (got d = %d); skipping %s", box.dim, path)
        return None
    grid = np.asarray(values, dtype=float).reshape(box.shape)
    top = float(vmax if vmax is not None else grid.max())
    scaled = np.zeros_like(grid) if top <= 0 else np.clip(grid / top, 0.0, 1.0)
    idx = np.rint(scaled * (len(COLOR_RAMP) - 1)).astype(int)

    nx, ny = box.shape
    margin = 24
    width, height = nx * cell, ny * cell
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width + 2 * margin}" height="{height + 2 * margin}" '
        f'shape-rendering="crispEdges">',
        f'<text x="{margin}" y="{margin - 8}" font-family="monospace" font-size="12">{title}</text>',
    ]
    for i in range(nx):
        for j in range(ny):
            x = margin + i * cell
            y = margin + (ny - 1 - j) * cell
            parts.append(f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" fill="{COLOR_RAMP[idx[i, j]]}"/>')
    parts.append(
        f'<text x="{margin}" y="{height + 2 * margin - 6}" font-family="monospace" font-size="11">'
        f'window x1 {box.lo[0]}:{box.hi[0]}, x2 {box.lo[1]}:{box.hi[1]}, max {top:.4g}</text>')
    parts.append('</svg>')
    with open(path, 'w') as f:
        f.write('\n'.join(parts))
    return path
