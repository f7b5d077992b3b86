"""File output: atomic writes, versioned JSON, CSV and deterministic SVG."""

from __future__ import annotations

import json
import os
import tempfile

import numpy as np

SCHEMA_VERSION = 1


def atomic_write(path, text):
    """Write text to a temporary file next to path, then rename over it."""
    path = os.fspath(path)
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def to_json(obj):
    d = _plain(obj)
    if isinstance(d, dict):
        d.setdefault("schema_version", SCHEMA_VERSION)
    return json.dumps(d, indent=2, sort_keys=True) + "\n"


def write_json(path, obj):
    atomic_write(path, to_json(obj))


def write_csv(path, header, rows):
    lines = [",".join(header)]
    for r in rows:
        lines.append(",".join(f"{v:.17g}" if isinstance(v, float) else str(v) for v in r))
    atomic_write(path, "\n".join(lines) + "\n")


# -- SVG --------------------------------------------------------------------------------

_SIZE = 480


class _Frame:
    def __init__(self, points, pad=0.05):
        z = np.asarray(points, complex).ravel()
        x0, x1, y0, y1 = z.real.min(), z.real.max(), z.imag.min(), z.imag.max()
        span = max(x1 - x0, y1 - y0, 1e-300)
        self.x0 = x0 - pad * span
        self.y1 = y1 + pad * span
        self.scale = _SIZE / (span * (1 + 2 * pad))

    def xy(self, z):
        return (z.real - self.x0) * self.scale, (self.y1 - z.imag) * self.scale


def _fmt(v):
    return f"{v:.3f}"


def _path(frame, z, closed=True):
    x, y = frame.xy(np.asarray(z, complex))
    pts = [f"{_fmt(a)},{_fmt(b)}" for a, b in zip(x, y)]
    # points that coincide at drawing resolution are dropped
    pts = [q for i, q in enumerate(pts) if i == 0 or q != pts[i - 1]]
    d = "M" + " L".join(pts)
    return d + (" Z" if closed else "")


def _svg(body):
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SIZE}" height="{_SIZE}" '
            f'viewBox="0 0 {_SIZE} {_SIZE}">\n')
    return head + "".join(line + "\n" for line in body) + "</svg>\n"


def curve_svg(curve):
    """One closed path through the curve's vertices."""
    v = curve.vertices[:-1]
    fr = _Frame(v)
    return _svg([f'<path d="{_path(fr, v)}" fill="none" stroke="black" stroke-width="1"/>'])


def field_svg(field, image=True):
    """Triangulation of the mesh (or of its image under the field), with
    elements colored by the sign of the Jacobian."""
    pts = field.values if image else field.mesh.nodes
    fr = _Frame(pts)
    body = []
    for tri, J in zip(field.mesh.triangles, field.jacobian):
        color = "#9ecae1" if J > 0 else ("#fc9272" if J < 0 else "#bdbdbd")
        body.append(f'<path d="{_path(fr, pts[tri])}" fill="{color}" stroke="black" stroke-width="0.2"/>')
    return _svg(body)


def report_svg(history, label=""):
    """Polyline of report values against level index."""
    vals = np.array([float(v) for _, v in history])
    n = len(vals)
    xs = np.arange(n) / max(n - 1, 1)
    lo, hi = vals.min(), vals.max()
    ys = (vals - lo) / (hi - lo) if hi > lo else np.full(n, 0.5)
    fr = _Frame(np.r_[0, 1 + 1j])
    z = xs + 1j * ys
    body = [f'<path d="{_path(fr, z, closed=False)}" fill="none" stroke="black" stroke-width="1.5"/>']
    for a, b in zip(*fr.xy(z)):
        body.append(f'<circle cx="{_fmt(a)}" cy="{_fmt(b)}" r="3"/>')
    if label:
        body.append(f'<text x="10" y="20" font-size="14">{label}</text>')
    return _svg(body)
