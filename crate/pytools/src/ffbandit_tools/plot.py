"""Regret curves from the runner's summary CSV."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

COLUMNS = ("algorithm", "t", "mean_cum_regret", "stderr", "ci95_halfwidth")
NUMERIC = COLUMNS[1:]


class SchemaError(ValueError):
    pass


def read_summary(path: Path) -> pd.DataFrame:
    frame = pd.read_csv(path, dtype={"algorithm": str})
    for col in COLUMNS:
        if col not in frame.columns:
            raise SchemaError(f"{path}: missing column `{col}`")
    for col in NUMERIC:
        values = pd.to_numeric(frame[col], errors="coerce")
        if values.isna().any():
            row = int(values.isna().to_numpy().argmax())
            raise SchemaError(f"{path}: column `{col}` has a non-numeric value at data row {row + 1}")
        frame[col] = values
    if frame.empty:
        raise SchemaError(f"{path}: no rows")
    return frame[list(COLUMNS)]


def plot_regret(summary_csv: Path, out_image: Path, title: str | None = None) -> list[str]:
    """Draws mean cumulative regret against t with a 95% band per algorithm.

    Returns the algorithms in legend order, highest final regret first so the
    legend reads top to bottom like the curves' right ends.
    """
    frame = read_summary(Path(summary_csv))
    curves = {name: g.sort_values("t") for name, g in frame.groupby("algorithm", sort=False)}
    order = sorted(curves, key=lambda name: -curves[name]["mean_cum_regret"].iloc[-1])

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for name in order:
        g = curves[name]
        t, mean, half = g["t"], g["mean_cum_regret"], g["ci95_halfwidth"]
        (line,) = ax.plot(t, mean, label=name)
        ax.fill_between(t, mean - half, mean + half, color=line.get_color(), alpha=0.2, linewidth=0)
    ax.set_xlabel("t")
    ax.set_ylabel("cumulative regret")
    if title:
        ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_image)
    plt.close(fig)
    return order
