"""Figure kinds over the harness CSV schema.

Every kind validates the column schema first, renders with a fixed style,
and never mutates its inputs; a given CSV and style version produce
byte-identical image files.
"""

from __future__ import annotations

from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from . import STYLE_VERSION  # noqa: E402
from .reader import SchemaMismatch, Table, read_csv  # noqa: E402

_RC = {
    "figure.figsize": (6.0, 4.0),
    "figure.dpi": 110,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 9,
    "svg.hashsalt": "sipplots",
}

KINDS = ("variance-vs-t", "error-vs-N", "kernel-profile", "path-trace")


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    input_path: str
    output_path: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaMismatch(f"unknown figure kind {self.kind!r}; "
                                 f"have {KINDS}")


def fit_loglog_slope(n, err):
    """Least-squares slope of log(err) against log(n)."""
    n = np.asarray(n, dtype=float)
    err = np.asarray(err, dtype=float)
    keep = err > 0
    if np.count_nonzero(keep) < 2:
        return float("nan")
    return float(np.polyfit(np.log(n[keep]), np.log(err[keep]), 1)[0])


def _render_variance_vs_t(table: Table, ax):
    table.require(["N", "t", "value"])
    labels = []
    for key in dict.fromkeys(table.column("N")):
        sub = table.subset("N", key)
        t = np.array(sub.column("t"), dtype=float)
        v = np.array(sub.column("value"), dtype=float)
        order = np.argsort(t)
        if key == "limit":
            ax.plot(t[order], v[order], "k--", lw=1.8, label="analytic limit")
        else:
            ax.plot(t[order], v[order], "o-", ms=3.5, lw=1.0, label=f"N = {key}")
        labels.append(key)
    ax.set_xlabel("t")
    ax.set_ylabel("field variance")
    ax.set_title("density-field variance: finite N against the limit")
    ax.legend()


def _render_error_vs_n(table: Table, ax):
    table.require(["experiment", "N", "error"])
    for key in dict.fromkeys(table.column("experiment")):
        sub = table.subset("experiment", key)
        n = np.array(sub.column("N"), dtype=float)
        err = np.array(sub.column("error"), dtype=float)
        order = np.argsort(n)
        slope = fit_loglog_slope(n, err)
        ax.loglog(n[order], err[order], "o-", ms=4,
                  label=f"{key} (slope {slope:+.2f})")
    ax.set_xlabel("N")
    ax.set_ylabel("error")
    ax.set_title("convergence against N")
    ax.legend()


def _render_kernel_profile(table: Table, ax):
    table.require(["t", "v", "density", "atom"])
    for t in dict.fromkeys(table.column("t")):
        sub = table.subset("t", t)
        v = np.array(sub.column("v"), dtype=float)
        dens = np.array(sub.column("density"), dtype=float)
        atom = sub.column("atom")[0]
        order = np.argsort(v)
        line, = ax.plot(v[order], dens[order], lw=1.2,
                        label=f"t = {t} (atom {atom:.3f})")
        ax.plot([0.0], [atom], marker="x", ms=7, color=line.get_color())
    ax.set_xlabel("v")
    ax.set_ylabel("density (x marks the atom mass)")
    ax.set_title("sticky kernel: continuous part and origin atom")
    ax.legend()


def _render_path_trace(table: Table, ax):
    table.require(["t", "value"])
    t = np.array(table.column("t"), dtype=float)
    x = np.array(table.column("value"), dtype=float)
    ax.plot(t, x, lw=0.8)
    ax.axhline(0.0, color="k", lw=0.6, alpha=0.6)
    ax.set_xlabel("t")
    ax.set_ylabel("position")
    ax.set_title("sticky path (time-changed Brownian motion)")


_RENDERERS = {
    "variance-vs-t": _render_variance_vs_t,
    "error-vs-N": _render_error_vs_n,
    "kernel-profile": _render_kernel_profile,
    "path-trace": _render_path_trace,
}


def render(spec: FigureSpec) -> str:
    """Read the CSV, draw the figure, write the image; returns the path."""
    table = read_csv(spec.input_path)
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        try:
            _RENDERERS[spec.kind](table, ax)
            fig.text(0.997, 0.003, f"style v{STYLE_VERSION}",
                     ha="right", va="bottom", fontsize=6, alpha=0.6)
            fig.tight_layout()
            fig.savefig(spec.output_path, metadata=_image_metadata(spec))
        finally:
            plt.close(fig)
    return spec.output_path


def _image_metadata(spec: FigureSpec):
    # keep image bytes reproducible: no dates, fixed producer string
    if spec.output_path.endswith(".png"):
        return {"Software": f"sipplots/{STYLE_VERSION}"}
    if spec.output_path.endswith(".svg"):
        return {"Date": None}
    return None
