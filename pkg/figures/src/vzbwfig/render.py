"""The four figure kinds.

Each kind is a function from loaded tables to a matplotlib Figure.  The
functions only rearrange values that are already present in CSV columns:
reference curves are taken from prediction columns, envelopes use the fitted
numbers verbatim, and the only arithmetic applied is display anchoring
(ratios against a row that is itself plotted).  Rendering is deterministic:
fixed figure geometry, fixed fonts, a pinned svg hash salt, and no
timestamps in the saved files.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from vzbwfig.io import FigureInputError, Table, expect_header, load_table

_RC = {
    "figure.figsize": (6.4, 4.0),
    "figure.dpi": 110,
    "savefig.dpi": 110,
    "font.family": "DejaVu Sans",
    "font.size": 9.0,
    "axes.titlesize": 10.0,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.3,
    "path.simplify": False,
    "svg.hashsalt": "vzbwfig-0.1.0",
}

_TIMESERIES_SCHEMAS = (
    ("t", "vx", "vy", "vz"),
    ("t", "x", "y", "z"),
    ("t", "displacement"),
)
_FIT_SCHEMA = (
    "amplitude",
    "angular_frequency",
    "phase",
    "envelope_decay_time",
    "rms_residual",
)
_SWEEP_SCHEMA = (
    "ell",
    "amplitude",
    "ratio_to_ell0",
    "predicted_sqrt_ell",
    "gamma_ratio_prediction",
)
_REPORT_SCHEMA = (
    "claim",
    "case",
    "description",
    "reference",
    "computed",
    "rel_deviation",
    "verdict",
    "note",
)
_RADIAL_SCHEMA = ("r", "density", "marginal")
_AXIAL_SCHEMA = ("z", "density")


@dataclass(frozen=True)
class FigureSpec:
    """What to draw: input CSV paths, output image path, and the kind."""

    kind: str
    inputs: tuple[str, ...]
    output: str


def _require_inputs(tables: list[Table], kind: str, low: int, high: int) -> None:
    if not (low <= len(tables) <= high):
        wanted = str(low) if low == high else f"{low} to {high}"
        raise FigureInputError(
            f"{kind} takes {wanted} input file(s), got {len(tables)}"
        )


def _timeseries(tables: list[Table]):
    _require_inputs(tables, "timeseries", 1, 2)
    series = tables[0]
    if series.header not in _TIMESERIES_SCHEMAS:
        raise FigureInputError(
            f"{series.path}: header {list(series.header)} does not match any "
            f"timeseries schema {[list(s) for s in _TIMESERIES_SCHEMAS]}"
        )
    fit = None
    if len(tables) == 2:
        expect_header(tables[1], _FIT_SCHEMA, "timeseries fit overlay")
        if len(tables[1].rows) != 1:
            raise FigureInputError(
                f"{tables[1].path}: fit overlay needs exactly one row, "
                f"got {len(tables[1].rows)}"
            )
        fit = tables[1]

    t = np.asarray(series.floats("t"))
    fig, ax = plt.subplots()
    for name in series.header[1:]:
        ax.plot(t, series.floats(name), label=name)

    if fit is not None:
        # Envelope around the midline of the last plotted column.  The
        # midline is display anchoring only; amplitude and decay time come
        # from the fit table verbatim.
        y = np.asarray(series.floats(series.header[-1]))
        mid = 0.5 * (float(y.max()) + float(y.min()))
        amp = fit.floats("amplitude")[0]
        tau = fit.floats("envelope_decay_time")[0]
        env = amp * np.exp(-t / tau)
        ax.plot(t, mid + env, color="0.4", linestyle="--", label="fit envelope")
        ax.plot(t, mid - env, color="0.4", linestyle="--", label="_nolegend_")
        note = (
            f"fit: amplitude={fit.column('amplitude')[0]}  "
            f"angular_frequency={fit.column('angular_frequency')[0]}  "
            f"envelope_decay_time={fit.column('envelope_decay_time')[0]}"
        )
        ax.text(
            0.02,
            0.02,
            note,
            transform=ax.transAxes,
            fontsize=6.5,
            color="0.25",
        )

    ax.set_xlabel("t")
    ax.set_ylabel(", ".join(series.header[1:]))
    ax.set_title("time series")
    ax.legend(loc="upper right", fontsize=7)
    fig.tight_layout()
    return fig


def _scaling(tables: list[Table]):
    _require_inputs(tables, "scaling", 1, 1)
    sweep = tables[0]
    expect_header(sweep, _SWEEP_SCHEMA, "scaling")

    ell = np.asarray(sweep.floats("ell"))
    amp = np.asarray(sweep.floats("amplitude"))
    pred = np.asarray(sweep.floats("predicted_sqrt_ell"))
    gamma = np.asarray(sweep.floats("gamma_ratio_prediction"))
    positive = ell > 0
    if not positive.any():
        raise FigureInputError(
            f"{sweep.path}: scaling needs at least one row with ell > 0"
        )
    ell = ell[positive]
    amp = amp[positive]
    pred = pred[positive]
    gamma = gamma[positive]

    fig, ax = plt.subplots()
    ax.loglog(ell, amp, "o", color="C0", label="amplitude")
    # Reference curves are the prediction columns rescaled to pass through
    # the first plotted point; nothing is recomputed from ell here.
    ax.loglog(
        ell,
        amp[0] * pred / pred[0],
        linestyle="--",
        color="C1",
        label="predicted_sqrt_ell (anchored)",
    )
    ax.loglog(
        ell,
        amp[0] * gamma / gamma[0],
        linestyle=":",
        color="C2",
        label="gamma_ratio_prediction (anchored)",
    )
    ax.set_xlabel("ell")
    ax.set_ylabel("amplitude")
    ax.set_title("amplitude scaling")
    ax.legend(loc="upper left", fontsize=7)
    fig.tight_layout()
    return fig


def _density(tables: list[Table]):
    _require_inputs(tables, "density", 1, 2)
    radial = tables[0]
    expect_header(radial, _RADIAL_SCHEMA, "density")
    axial = None
    if len(tables) == 2:
        expect_header(tables[1], _AXIAL_SCHEMA, "density axial panel")
        axial = tables[1]

    if axial is None:
        fig, ax_r = plt.subplots()
        axes = [ax_r]
    else:
        fig, axes = plt.subplots(1, 2, figsize=(9.0, 4.0))
        ax_r = axes[0]

    r = radial.floats("r")
    ax_r.plot(r, radial.floats("density"), label="density")
    ax_r.plot(r, radial.floats("marginal"), label="marginal")
    ax_r.set_xlabel("r")
    ax_r.set_ylabel("density")
    ax_r.set_title("radial density")
    ax_r.legend(loc="upper right", fontsize=7)

    if axial is not None:
        ax_z = axes[1]
        ax_z.plot(axial.floats("z"), axial.floats("density"), color="C3")
        ax_z.set_xlabel("z")
        ax_z.set_ylabel("density")
        ax_z.set_title("axial density")

    fig.tight_layout()
    return fig


def _short(value: str) -> str:
    """Compact display form of one CSV value."""
    try:
        return f"{float(value):.3g}"
    except ValueError:
        return value


_VERDICT_COLORS = {
    "confirmed": "#d8efd8",
    "deviates": "#f7e3c3",
}


def _report(tables: list[Table]):
    _require_inputs(tables, "report", 1, 1)
    report = tables[0]
    expect_header(report, _REPORT_SCHEMA, "report")
    if not report.rows:
        raise FigureInputError(f"{report.path}: report has no rows")

    claim = report.column("claim")
    case = report.column("case")
    verdict = report.column("verdict")
    rel = report.column("rel_deviation")

    cell_text = [
        [claim[i], case[i], verdict[i], _short(rel[i])]
        for i in range(len(claim))
    ]
    cell_colors = [
        [_VERDICT_COLORS.get(verdict[i], "#e6e6e6")] * 4
        for i in range(len(claim))
    ]

    height = max(2.0, 0.5 + 0.23 * (len(cell_text) + 1))
    fig = plt.figure(figsize=(9.0, height))
    ax = fig.add_subplot(111)
    ax.axis("off")
    table = ax.table(
        cellText=cell_text,
        cellColours=cell_colors,
        colLabels=["claim", "case", "verdict", "rel_deviation"],
        colWidths=[0.34, 0.3, 0.2, 0.16],
        cellLoc="left",
        loc="center",
    )
    table.auto_set_font_size(False)
    table.set_fontsize(7)
    ax.set_title("consistency report")
    return fig


KINDS = {
    "timeseries": _timeseries,
    "scaling": _scaling,
    "density": _density,
    "report": _report,
}


def render(spec: FigureSpec):
    """Load the inputs for ``spec`` and build the figure."""
    if spec.kind not in KINDS:
        raise FigureInputError(
            f"unknown figure kind {spec.kind!r}; "
            f"expected one of {sorted(KINDS)}"
        )
    tables = [load_table(path) for path in spec.inputs]
    with matplotlib.rc_context(_RC):
        return KINDS[spec.kind](tables)


def save(fig, output: str) -> None:
    """Write ``fig`` to a png or svg file without embedding timestamps."""
    ext = os.path.splitext(output)[1].lower()
    if ext not in (".png", ".svg"):
        raise FigureInputError(
            f"unsupported output format {ext or '(none)'!r}; use .png or .svg"
        )
    parent = os.path.dirname(output)
    if parent:
        os.makedirs(parent, exist_ok=True)
    if ext == ".png":
        metadata = {"Software": "vzbwfig"}
    else:
        metadata = {"Date": None}
    with matplotlib.rc_context(_RC):
        fig.savefig(output, format=ext[1:], metadata=metadata)


def render_to_file(spec: FigureSpec) -> None:
    """Render ``spec`` and save it to ``spec.output``."""
    fig = render(spec)
    try:
        save(fig, spec.output)
    finally:
        plt.close(fig)
