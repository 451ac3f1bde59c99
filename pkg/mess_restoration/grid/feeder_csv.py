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

"""Feeder ingestion from branch and bus CSV tables

Branch table columns: ``from, to, r_ohm, x_ohm, capacity_kva, switchable``.
Bus table columns: ``bus, p_kw, q_kvar, class, critical, W_usd_per_kwh``.
Bus and branch ids are prefixed with the feeder name (``f1/14``, ``f1/13-14``).
"""

from __future__ import annotations

from pathlib import Path

import pandas as pd

from ..scenario import LoadClass
from .distribution_system import Branch, Bus, DistributionSystemError

BRANCH_COLUMNS = ["from", "to", "r_ohm", "x_ohm", "capacity_kva", "switchable"]
BUS_COLUMNS = ["bus", "p_kw", "q_kvar", "class", "critical", "W_usd_per_kwh"]


def impedance_base_ohm(v_base_kv: float, base_kva: float = 1000.0) -> float:
    """Z_base = V_base^2 / S_base with V in kV and S in MVA"""
    if v_base_kv <= 0 or base_kva <= 0:
        raise DistributionSystemError(
            f"Bases must be positive, got {v_base_kv} kV and {base_kva} kVA"
        )
    return v_base_kv**2 / (base_kva / 1000.0)


def bus_name(feeder: str, bus: object) -> str:
    return f"{feeder}/{bus}"


def branch_name(feeder: str, from_bus: object, to_bus: object) -> str:
    return f"{feeder}/{from_bus}-{to_bus}"


def read_table(path: Path, columns: list[str]) -> pd.DataFrame:
    if not path.is_file():
        raise DistributionSystemError(f"Feeder table {path} does not exist")
    frame = pd.read_csv(path, skipinitialspace=True, comment="#", dtype={"bus": str})
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise DistributionSystemError(f"{path}: missing columns {missing}")
    return frame


def _flag(value: object) -> bool:
    if value is None or (isinstance(value, float) and pd.isna(value)):
        return False
    if isinstance(value, str):
        return value.strip().lower() in {"1", "true", "yes", "y"}
    return bool(value)


def branches_from_frame(
    frame: pd.DataFrame,
    feeder: str,
    v_base_kv: float,
    base_kva: float = 1000.0,
) -> list[Branch]:
    z_base = impedance_base_ohm(v_base_kv, base_kva)
    branches = []
    for record in frame.to_dict("records"):
        a, b = int(record["from"]), int(record["to"])
        branches.append(
            Branch(
                branch_id=branch_name(feeder, a, b),
                feeder=feeder,
                from_bus=bus_name(feeder, a),
                to_bus=bus_name(feeder, b),
                r_pu=float(record["r_ohm"]) / z_base,
                x_pu=float(record["x_ohm"]) / z_base,
                s_max_pu=float(record["capacity_kva"]) / base_kva,
                switchable=_flag(record["switchable"]),
            )
        )
    return branches


def buses_from_frame(
    frame: pd.DataFrame,
    feeder: str,
    v_min: float = 0.95,
    v_max: float = 1.05,
    critical_cost: float = 10.0,
    noncritical_cost: float = 2.0,
) -> list[Bus]:
    """Buses of one feeder; a blank interruption cost takes the class default"""
    buses = []
    for record in frame.to_dict("records"):
        try:
            load_class = LoadClass(str(record["class"]).strip())
        except ValueError:
            raise DistributionSystemError(
                f"Bus {record['bus']} of {feeder}: unknown load class"
                f" {record['class']!r}"
            ) from None
        critical = _flag(record["critical"])
        cost = record["W_usd_per_kwh"]
        if pd.isna(cost) or str(cost).strip() == "":
            cost = critical_cost if critical else noncritical_cost
        buses.append(
            Bus(
                bus_id=bus_name(feeder, str(record["bus"]).strip()),
                feeder=feeder,
                p_kw=float(record["p_kw"]),
                q_kvar=float(record["q_kvar"]),
                load_class=load_class,
                critical=critical,
                interruption_cost=float(cost),
                v_min=v_min,
                v_max=v_max,
            )
        )
    return buses


def read_feeder(
    branches_csv: Path,
    buses_csv: Path,
    feeder: str,
    v_base_kv: float,
    base_kva: float = 1000.0,
    v_min: float = 0.95,
    v_max: float = 1.05,
    critical_cost: float = 10.0,
    noncritical_cost: float = 2.0,
) -> tuple[list[Bus], list[Branch]]:
    """Read one feeder's tables and convert them to per unit"""
    branches = branches_from_frame(
        read_table(branches_csv, BRANCH_COLUMNS), feeder, v_base_kv, base_kva
    )
    buses = buses_from_frame(
        read_table(buses_csv, BUS_COLUMNS),
        feeder,
        v_min,
        v_max,
        critical_cost,
        noncritical_cost,
    )
    return buses, branches
