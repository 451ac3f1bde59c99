# Copyright 2024 The mess-restoration Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""SVG charts of a rolling run: MESS schedule, generation dispatch, energy transfer"""

from __future__ import annotations

from pathlib import Path
from typing import TYPE_CHECKING, Final

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

if TYPE_CHECKING:
    from .report import TimelineReport

CHART_FILES: Final = (
    "mess_schedule.svg",
    "generation_dispatch.svg",
    "energy_transfer.svg",
)
_SVG_SETTINGS: Final = {"svg.hashsalt": "mess-restoration", "svg.fonttype": "none"}


def _save(figure: plt.Figure, path: Path) -> Path:
    with plt.rc_context(_SVG_SETTINGS):
        figure.savefig(path, format="svg", metadata={"Date": None})
    plt.close(figure)
    return path


def mess_schedule(report: TimelineReport) -> plt.Figure:
    """One row per MESS: holding intervals labelled by site, travel in grey"""
    trace = report.mess_trace
    units = sorted(trace["mess"].astype(str).unique())
    figure, axes = plt.subplots(figsize=(10, 1 + 0.6 * max(len(units), 1)))
    colours: dict[str, str] = {}
    palette = plt.get_cmap("tab10")
    for row, mess in enumerate(units):
        for record in trace[trace["mess"].astype(str) == mess].itertuples():
            move = str(record.move)
            if move.startswith("hold:"):
                site = move.split(":", 1)[1]
                colour = colours.setdefault(site, palette(len(colours) % 10))
                axes.barh(row, 1, left=record.t, color=colour, edgecolor="white")
                axes.text(
                    record.t + 0.5, row, site, ha="center", va="center", fontsize=7
                )
            else:
                axes.barh(row, 1, left=record.t, color="lightgrey", edgecolor="white")
    axes.set_yticks(range(len(units)), units)
    axes.set_xlabel("interval")
    axes.set_title("MESS schedule")
    figure.tight_layout()
    return figure


def generation_dispatch(report: TimelineReport) -> plt.Figure:
    generation = report.generation
    figure, axes = plt.subplots(figsize=(10, 4))
    bottom = None
    for microgrid in sorted(generation["microgrid"].astype(str).unique()):
        rows = generation[generation["microgrid"].astype(str) == microgrid]
        series = rows.set_index("t")["p_dg_kw"].astype(float)
        axes.bar(series.index, series.values, bottom=bottom, label=microgrid)
        bottom = series.values if bottom is None else bottom + series.values
    axes.set_xlabel("interval")
    axes.set_ylabel("DG output (kW)")
    axes.set_title("Generation dispatch")
    if len(generation):
        axes.legend(loc="upper right", fontsize=8)
    figure.tight_layout()
    return figure


def energy_transfer(report: TimelineReport) -> plt.Figure:
    """Net MESS energy delivered to each microgrid over the run"""
    generation = report.generation
    figure, axes = plt.subplots(figsize=(6, 4))
    if len(generation):
        totals = (
            generation.groupby(generation["microgrid"].astype(str))["mess_net_kw"]
            .sum()
            .sort_index()
        )
        axes.bar(totals.index, totals.values, color="tab:blue")
    axes.axhline(0.0, color="black", linewidth=0.8)
    axes.set_ylabel("net discharge (kW·interval)")
    axes.set_title("Energy transfer by MESS")
    figure.tight_layout()
    return figure


def write_charts(report: TimelineReport, directory: Path) -> list[Path]:
    figures = (
        mess_schedule(report),
        generation_dispatch(report),
        energy_transfer(report),
    )
    return [
        _save(figure, directory / name) for figure, name in zip(figures, CHART_FILES)
    ]
