"""Render normalized consensus-time figures from experiment CSV files.

Input is the CSV emitted by the `twochoices` CLI — either the `simulate`
schema (Monte Carlo sweeps, with confidence-interval columns) or the `exact`
schema (chain solutions, with a log10 column for values past float range).
The coupling is the file format alone; this package never imports the
simulator.

Each CSV becomes one series of mean consensus time per node, T/n versus n.
Simulate series carry error bars from ci_low/ci_high; a single reference
growth curve (c*ln n, c*exp(b*n), or c*n) is least-squares fitted on the
largest n values and drawn dashed, with the fitted constants echoed to
stdout.  Rendering is deterministic: fixed styles, salted SVG ids, no
embedded timestamps.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import matplotlib
import numpy as np

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

SIMULATE_COLUMNS = (
    "graph_kind",
    "n",
    "degree_or_pedge",
    "alpha",
    "p",
    "trials",
    "mean_T",
    "ci_low",
    "ci_high",
    "capped",
    "master_seed",
    "normalized_T",
)
EXACT_COLUMNS = ("n", "alpha", "p", "T_exact", "log10_T", "lower_bound")

OVERLAY_KINDS = ("log", "exp", "linear")

_SVG_HASHSALT = "twochoices-plots"


class CsvSchemaError(ValueError):
    """Input CSV header does not match either supported schema."""


class EmptyCsvError(ValueError):
    """Input CSV has no plottable data rows."""


@dataclass(frozen=True)
class Series:
    """One plottable curve: T/n against n, optionally with error bars."""

    label: str
    path: Path
    n: np.ndarray
    per_node: np.ndarray
    err_low: Optional[np.ndarray] = None
    err_high: Optional[np.ndarray] = None

    @property
    def has_error_bars(self) -> bool:
        return self.err_low is not None


@dataclass(frozen=True)
class OverlayFit:
    """Fitted reference curve y ~ scale * shape(n)."""

    kind: str
    scale: float
    rate: Optional[float]  # only for kind == "exp"
    fit_n_min: int
    points: int

    def curve(self, n: np.ndarray) -> np.ndarray:
        n = np.asarray(n, dtype=float)
        if self.kind == "log":
            return self.scale * np.log(n)
        if self.kind == "exp":
            return self.scale * np.exp(self.rate * n)
        return self.scale * n

    def legend_label(self) -> str:
        if self.kind == "log":
            return f"{self.scale:.3g}" + r" $\ln n$"
        if self.kind == "exp":
            return f"{self.scale:.3g}" + r" $e^{" + f"{self.rate:.3g}" + r" n}$"
        return f"{self.scale:.3g}" + r" $n$"


@dataclass(frozen=True)
class FigureSpec:
    """Everything needed to produce one figure file."""

    csv_paths: Sequence[Union[str, Path]]
    out_path: Union[str, Path]
    overlay: str = "log"
    fit_window: float = 0.5
    title: str = ""
    xlabel: str = "network size n"
    ylabel: str = "mean consensus time per node T/n"

    def __post_init__(self) -> None:
        if not self.csv_paths:
            raise ValueError("need at least one input CSV")
        if self.overlay not in OVERLAY_KINDS:
            raise ValueError(
                f"overlay must be one of {OVERLAY_KINDS}, got {self.overlay!r}"
            )
        if not 0.0 < self.fit_window <= 1.0:
            raise ValueError(
                f"fit_window must be in (0, 1], got {self.fit_window!r}"
            )


def _float(text: str) -> float:
    """CSV cell to float; the writers emit 'nan' and 'inf' literally."""
    return float(text)


def _schema_error(path: Path, header: Sequence[str]) -> CsvSchemaError:
    have = set(header)
    # Report against whichever schema the header is closer to.
    sim_missing = [c for c in SIMULATE_COLUMNS if c not in have]
    exact_missing = [c for c in EXACT_COLUMNS if c not in have]
    if len(sim_missing) <= len(exact_missing):
        name, missing = "simulate", sim_missing
    else:
        name, missing = "exact", exact_missing
    return CsvSchemaError(
        f"{path}: header does not match the {name} schema; "
        f"missing column(s): {', '.join(missing)}"
    )


def load_series(path: Union[str, Path]) -> Series:
    """Parse one CSV into a series, sniffing which schema it uses.

    Rows that cannot be plotted (nan mean from an all-capped or failed sweep
    point, values past float range even after the log10 fallback) are
    skipped.  A file with no usable rows raises EmptyCsvError.
    """
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyCsvError(f"{path}: file is empty") from None
        rows = list(reader)

    if tuple(header) == SIMULATE_COLUMNS:
        return _simulate_series(path, rows)
    if tuple(header) == EXACT_COLUMNS:
        return _exact_series(path, rows)
    raise _schema_error(path, header)


def _simulate_series(path: Path, rows: Sequence[Sequence[str]]) -> Series:
    ns, per_node, lows, highs = [], [], [], []
    label = ""
    for row in rows:
        rec = dict(zip(SIMULATE_COLUMNS, row))
        n = int(rec["n"])
        mean_t = _float(rec["mean_T"])
        if not math.isfinite(mean_t):
            continue
        if not label:
            label = (
                f"{rec['graph_kind']} "
                f"$\\alpha$={rec['alpha']} p={rec['p']}"
            )
        ns.append(n)
        per_node.append(_float(rec["normalized_T"]))
        lows.append((mean_t - _float(rec["ci_low"])) / n)
        highs.append((_float(rec["ci_high"]) - mean_t) / n)
    if not ns:
        raise EmptyCsvError(f"{path}: no plottable rows")
    order = np.argsort(ns)
    return Series(
        label=label,
        path=path,
        n=np.asarray(ns, dtype=np.int64)[order],
        per_node=np.asarray(per_node, dtype=float)[order],
        err_low=np.clip(np.asarray(lows, dtype=float)[order], 0.0, None),
        err_high=np.clip(np.asarray(highs, dtype=float)[order], 0.0, None),
    )


def _exact_series(path: Path, rows: Sequence[Sequence[str]]) -> Series:
    ns, per_node = [], []
    label = ""
    for row in rows:
        rec = dict(zip(EXACT_COLUMNS, row))
        n = int(rec["n"])
        value = _float(rec["T_exact"])
        if math.isfinite(value):
            y = value / n
        else:
            # Linear value overflowed; the log10 column is always finite.
            try:
                y = 10.0 ** (_float(rec["log10_T"]) - math.log10(n))
            except OverflowError:
                y = math.inf
        if not math.isfinite(y):
            continue
        if not label:
            label = f"exact $\\alpha$={rec['alpha']} p={rec['p']}"
        ns.append(n)
        per_node.append(y)
    if not ns:
        raise EmptyCsvError(f"{path}: no plottable rows")
    order = np.argsort(ns)
    return Series(
        label=label,
        path=path,
        n=np.asarray(ns, dtype=np.int64)[order],
        per_node=np.asarray(per_node, dtype=float)[order],
    )


def fit_overlay(
    kind: str,
    n: np.ndarray,
    per_node: np.ndarray,
    fit_window: float = 0.5,
) -> OverlayFit:
    """Least-squares fit of the reference curve on the largest n values.

    The window keeps the top `fit_window` fraction of *distinct* sizes, so
    small-n transients never pollute the asymptotic constant.  log and
    linear shapes fit the single scale through the origin; exp fits scale
    and rate by ordinary least squares on (n, ln y).
    """
    if kind not in OVERLAY_KINDS:
        raise ValueError(f"overlay must be one of {OVERLAY_KINDS}, got {kind!r}")
    n = np.asarray(n, dtype=float)
    y = np.asarray(per_node, dtype=float)
    sizes = np.unique(n)
    keep = max(1, math.ceil(fit_window * sizes.size))
    n_min = sizes[-keep]
    mask = n >= n_min
    if kind == "exp":
        mask &= y > 0.0
    nw, yw = n[mask], y[mask]
    if nw.size == 0:
        raise ValueError("fit window selected no points")

    rate: Optional[float] = None
    if kind == "log":
        shape = np.log(nw)
        scale = float(shape @ yw / (shape @ shape))
    elif kind == "linear":
        scale = float(nw @ yw / (nw @ nw))
    else:
        if nw.size < 2:
            raise ValueError("exp fit needs at least two points in the window")
        slope, intercept = np.polyfit(nw, np.log(yw), 1)
        scale, rate = float(math.exp(intercept)), float(slope)
    return OverlayFit(
        kind=kind,
        scale=scale,
        rate=rate,
        fit_n_min=int(n_min),
        points=int(nw.size),
    )


def render(spec: FigureSpec) -> Path:
    """Draw the figure described by `spec` and return the output path.

    All inputs are parsed and the fit computed before the output file is
    touched, so a bad CSV never leaves a partial image behind.  The overlay
    is fitted on the points of every series pooled together.
    """
    series = [load_series(p) for p in spec.csv_paths]
    all_n = np.concatenate([s.n for s in series])
    all_y = np.concatenate([s.per_node for s in series])
    fit = fit_overlay(spec.overlay, all_n, all_y, spec.fit_window)

    tail = f" b={fit.rate:.9g}" if fit.rate is not None else ""
    print(
        f"overlay fit: kind={fit.kind} c={fit.scale:.9g}{tail} "
        f"fit_n_min={fit.fit_n_min} points={fit.points}"
    )

    with plt.rc_context({"svg.hashsalt": _SVG_HASHSALT}):
        fig, ax = plt.subplots(figsize=(6.4, 4.4))
        try:
            for s in series:
                if s.has_error_bars:
                    ax.errorbar(
                        s.n,
                        s.per_node,
                        yerr=np.vstack([s.err_low, s.err_high]),
                        fmt="o-",
                        markersize=4,
                        capsize=3,
                        label=s.label,
                    )
                else:
                    ax.plot(s.n, s.per_node, "o-", markersize=4, label=s.label)
            grid = np.linspace(float(all_n.min()), float(all_n.max()), 256)
            ax.plot(grid, fit.curve(grid), "k--", label=fit.legend_label())
            if spec.overlay == "exp":
                ax.set_yscale("log")
            ax.set_xlabel(spec.xlabel)
            ax.set_ylabel(spec.ylabel)
            if spec.title:
                ax.set_title(spec.title)
            ax.legend()
            fig.tight_layout()

            out = Path(spec.out_path)
            # SVG would otherwise embed a creation date; PNG never does.
            metadata = {"Date": None} if out.suffix == ".svg" else None
            fig.savefig(out, metadata=metadata)
        finally:
            plt.close(fig)
    return out
