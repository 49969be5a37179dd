"""Deterministic JSON, CSV and gnuplot data output."""

from __future__ import annotations

import json
import os
import platform
import tempfile

import numpy as np
import scipy

from .. import __version__


class OutputError(OSError):
    pass


def ensure_writable(directory):
    """Create `directory` and prove a file can be written there, before any computation."""
    try:
        os.makedirs(directory, exist_ok=True)
        with tempfile.NamedTemporaryFile(dir=directory):
            pass
    except OSError as exc:
        raise OutputError(f"output directory {directory!r} is not writable: {exc}") from None


def write_json(path, obj):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


def write_csv(path, header, columns):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    np.savetxt(path, np.column_stack(columns), delimiter=",", header=",".join(header),
               comments="", fmt="%.15e")


def write_dat(path, x, y, title):
    """Two-column ascii curve; gnuplot reads it with `plot 'file' using 1:2`."""
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    np.savetxt(path, np.column_stack([x, y]), fmt="%.12e", header=title)


def versions():
    return {"blowup1d": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "python": platform.python_version()}


def clean(v):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to None."""
    if isinstance(v, dict):
        return {str(k): clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [clean(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if np.isfinite(v) else None
    return v


def manifest(config, checks, files, status, extra=None):
    out = {"config": config.resolved(), "versions": versions(), "status": status,
           "checks": [c.to_dict() for c in checks], "files": sorted(files)}
    if extra:
        out.update(clean(extra))
    return out


def list_files(root):
    out = []
    for d, _, names in os.walk(root):
        for n in names:
            if n in ("manifest.json", "timing.txt"):
                continue
            out.append(os.path.relpath(os.path.join(d, n), root))
    return sorted(out)
