"""Matplotlib renderings of scan curves and reconstructed density matrices."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .experiments import ScanCurve  # noqa: E402
from .tomography import BASIS, DensityMatrix  # noqa: E402

STYLE = {
    "font.size": 10,
    "axes.labelsize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "savefig.dpi": 150,
}

_MARKERS = {"baseline": "s", "projected": "o", "hom_dip": "^"}


def plot_scans(curves: Sequence[ScanCurve], path: Union[str, Path], title: str = "") -> Path:
    """Counts against prism position, one series per curve.

    Simulated counts are drawn as markers on top of the expected curve
    when present.
    """
    path = Path(path)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5.0, 3.4))
        for curve in curves:
            marker = _MARKERS.get(curve.kind, "o")
            line, = ax.plot(curve.positions, curve.expected_counts, "-", lw=1.0, label=f"{curve.kind} (expected)")
            sim = curve.simulated_counts
            if sim is not None:
                ax.plot(curve.positions, sim, marker, ms=3, color=line.get_color(), label=f"{curve.kind} (simulated)")
        ax.set_xlabel(r"path difference ($\mu$m)")
        ax.set_ylabel("coincidence counts")
        if title:
            ax.set_title(title)
        ax.legend(frameon=False)
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
    return path


def plot_density_matrix(rho: DensityMatrix, path: Union[str, Path], title: str = "") -> Path:
    """Real and imaginary parts as side-by-side 3D bar charts."""
    path = Path(path)
    m = np.asarray(rho.entries)
    xs, ys = np.meshgrid(np.arange(4), np.arange(4), indexing="ij")
    xs, ys = xs.ravel(), ys.ravel()
    with plt.rc_context(STYLE):
        fig = plt.figure(figsize=(8.0, 3.6))
        for k, (part, label) in enumerate(((m.real, "Re"), (m.imag, "Im"))):
            ax = fig.add_subplot(1, 2, k + 1, projection="3d")
            heights = part.ravel()
            ax.bar3d(xs - 0.3, ys - 0.3, np.zeros_like(heights), 0.6, 0.6, heights, shade=True)
            ax.set_xticks(range(4), BASIS)
            ax.set_yticks(range(4), BASIS)
            ax.set_zlim(min(0.0, heights.min()), max(1.0, heights.max()))
            ax.set_title(rf"{label}($\rho$)")
        if title:
            fig.suptitle(title)
        fig.savefig(path)
        plt.close(fig)
    return path
