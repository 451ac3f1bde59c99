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

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Final

import pandas as pd

from .charts import write_charts

logger = logging.getLogger(__name__)

TIMELINE_COLUMNS: Final = [
    "t",
    "status",
    "reopt",
    "n_scenarios",
    "objective",
    "mip_gap",
    "interruption_cost",
    "generation_cost",
    "battery_cost",
    "transport_cost",
    "total_cost",
    "demand_kw",
    "restored_kw",
    "closed_branches",
    "radial",
]
LOAD_COLUMNS: Final = [
    "t",
    "bus",
    "kind",
    "critical",
    "demand_kw",
    "restored_kw",
    "cost",
]
GENERATION_COLUMNS: Final = [
    "t",
    "microgrid",
    "site",
    "p_dg_kw",
    "q_dg_kvar",
    "local_demand_kw",
    "local_served_kw",
    "mess_net_kw",
    "energy_kwh",
    "cost",
]
MESS_COLUMNS: Final = [
    "t",
    "mess",
    "location",
    "arc",
    "move",
    "next_location",
    "site",
    "p_ch_kw",
    "p_dch_kw",
    "energy_kwh",
    "soc",
    "battery_cost",
    "transport_cost",
]
TOPOLOGY_COLUMNS: Final = ["t", "branch", "status"]

BUNDLE_FILES: Final = {
    "timeline": "timeline.csv",
    "loads": "loads.csv",
    "generation": "generation.csv",
    "mess_trace": "mess_trace.csv",
    "topology_log": "topology_log.csv",
}
METRICS_FILE: Final = "metrics.csv"
FLOAT_FORMAT: Final = "%.10g"


@dataclass(frozen=True)
class Metrics:
    """Implemented cost terms ($) and restoration percentages over feeder loads"""

    interruption_cost: float
    generation_cost: float
    battery_cost: float
    transport_cost: float
    total_cost: float
    restoration_total: float
    restoration_critical: float
    restoration_noncritical: float

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [(name, value) for name, value in asdict(self).items()],
            columns=["metric", "value"],
        )

    def __str__(self) -> str:
        return "\n".join(
            [
                f"Total cost:          ${self.total_cost:,.2f}",
                f"  interruption:      ${self.interruption_cost:,.2f}",
                f"  generation:        ${self.generation_cost:,.2f}",
                f"  battery:           ${self.battery_cost:,.2f}",
                f"  transportation:    ${self.transport_cost:,.2f}",
                f"Restored (total):    {self.restoration_total:.2f}%",
                f"Restored (critical): {self.restoration_critical:.2f}%",
                f"Restored (other):    {self.restoration_noncritical:.2f}%",
            ]
        )


@dataclass
class TimelineReport:
    """Everything implemented during a rolling run, one frame per bundle file"""

    timeline: pd.DataFrame
    loads: pd.DataFrame
    generation: pd.DataFrame
    mess_trace: pd.DataFrame
    topology_log: pd.DataFrame

    @classmethod
    def from_rows(
        cls,
        timeline: list[dict[str, object]],
        loads: list[dict[str, object]],
        generation: list[dict[str, object]],
        mess_trace: list[dict[str, object]],
        topology_log: list[dict[str, object]],
    ) -> TimelineReport:
        return cls(
            timeline=pd.DataFrame(timeline, columns=TIMELINE_COLUMNS),
            loads=pd.DataFrame(loads, columns=LOAD_COLUMNS),
            generation=pd.DataFrame(generation, columns=GENERATION_COLUMNS),
            mess_trace=pd.DataFrame(mess_trace, columns=MESS_COLUMNS),
            topology_log=pd.DataFrame(topology_log, columns=TOPOLOGY_COLUMNS),
        )

    @property
    def intervals(self) -> int:
        return len(self.timeline)

    def frames(self) -> dict[str, pd.DataFrame]:
        return {
            "timeline": self.timeline,
            "loads": self.loads,
            "generation": self.generation,
            "mess_trace": self.mess_trace,
            "topology_log": self.topology_log,
        }

    def write_bundle(self, directory: Path, charts: bool = True) -> list[Path]:
        """Write the CSV bundle, metrics and SVG charts into ``directory``"""
        directory.mkdir(parents=True, exist_ok=True)
        written = []
        for key, frame in self.frames().items():
            path = directory / BUNDLE_FILES[key]
            frame.to_csv(
                path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n"
            )
            written.append(path)
        path = directory / METRICS_FILE
        compute_metrics(self).to_frame().to_csv(
            path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n"
        )
        written.append(path)
        if charts:
            written.extend(write_charts(self, directory))
        logger.info("wrote %d files to %s", len(written), directory)
        return written

    @classmethod
    def from_bundle(cls, directory: Path) -> TimelineReport:
        frames = {}
        for key, name in BUNDLE_FILES.items():
            path = directory / name
            if not path.is_file():
                raise FileNotFoundError(f"Bundle file {path} does not exist")
            frames[key] = pd.read_csv(path, keep_default_na=False, na_values=[""])
        return cls(**frames)


def _percentage(restored: float, demand: float) -> float:
    if demand <= 0:
        return 100.0
    return min(100.0, max(0.0, 100.0 * restored / demand))


def compute_metrics(report: TimelineReport) -> Metrics:
    """Cost decomposition and restoration percentages of an implemented run

    Percentages use feeder loads only; unserved microgrid local load shows up in
    the interruption cost.
    """
    timeline = report.timeline
    parts = {
        column: math.fsum(timeline[column].astype(float))
        for column in (
            "interruption_cost",
            "generation_cost",
            "battery_cost",
            "transport_cost",
        )
    }
    feeder = report.loads[report.loads["kind"] == "feeder"]
    critical = feeder["critical"].astype(str).str.lower().isin(["true", "1"])

    def restoration(rows: pd.DataFrame) -> float:
        return _percentage(
            math.fsum(rows["restored_kw"].astype(float)),
            math.fsum(rows["demand_kw"].astype(float)),
        )

    return Metrics(
        interruption_cost=parts["interruption_cost"],
        generation_cost=parts["generation_cost"],
        battery_cost=parts["battery_cost"],
        transport_cost=parts["transport_cost"],
        total_cost=math.fsum(parts.values()),
        restoration_total=restoration(feeder),
        restoration_critical=restoration(feeder[critical]),
        restoration_noncritical=restoration(feeder[~critical]),
    )
