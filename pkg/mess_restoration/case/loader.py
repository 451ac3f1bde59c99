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

"""Loading and cross-validating case files

A case is a JSON document (see :mod:`.document`) referencing feeder CSV tables.
Everything electrical is converted to per unit on the distribution system's
power base; reliabilities, forecasts and settings are turned into the types
the solver packages consume.
"""

from __future__ import annotations

import json
import logging
from collections.abc import Sequence
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import TypeVar

import numpy as np
from pydantic import ValidationError

from ..grid import (
    Branch,
    Bus,
    DistributionSystem,
    DistributionSystemError,
    Microgrid,
    bus_name,
    read_feeder,
)
from ..milp import (
    LpEngine,
    MilpModelError,
    ReoptPolicy,
    RestorationSystem,
    SolveOptions,
    TransportCostWeighting,
)
from ..rolling.realization import RealizationEvent
from ..rolling.settings import FleetMode, RollingSettings
from ..scenario import (
    AvailabilityModel,
    LoadClass,
    LoadForecast,
    ScenarioError,
    ScenarioSettings,
    branch_element,
    road_element,
)
from ..transport import (
    AtSite,
    EdgeKey,
    MessLocation,
    MessUnit,
    NodeId,
    Site,
    SiteId,
    TransportNetwork,
    TransportNetworkError,
)
from .document import CaseDocument, MeanTimesDocument, ReliabilityDocument

logger = logging.getLogger(__name__)

BASE_KVA = 1000.0

E = TypeVar("E", bound=Enum)


class CaseValidationError(Exception):
    """Case file problem, located by file and line where possible"""

    def __init__(self, path: Path, message: str, line: int | None = None):
        self.path = path
        self.line = line
        where = f"{path}:{line}" if line is not None else f"{path}"
        super().__init__(f"{where}: {message}")


@dataclass(frozen=True, eq=False)
class CaseConfig:
    """A validated case, ready for scenario generation and solving

    :param forecast: feeder load forecast over the whole run, in bus order
    :param roads: availability process per road, in road order
    :param branches: availability process per branch, in branch order
    :param events: scripted status changes, empty when availability is sampled
    """

    name: str
    system: RestorationSystem
    forecast: LoadForecast
    roads: tuple[tuple[EdgeKey, AvailabilityModel], ...]
    branches: tuple[tuple[str, AvailabilityModel], ...]
    t_h: int
    t_p: int
    scenario_settings: ScenarioSettings
    seed: int
    solve_options: SolveOptions
    rolling: RollingSettings
    events: tuple[RealizationEvent, ...] = ()
    notes: str = ""
    source: Path | None = field(default=None)

    @property
    def dt_h(self) -> float:
        return self.system.dt_h

    @property
    def scripted(self) -> bool:
        return bool(self.events)

    def initial_locations(self) -> dict[str, MessLocation]:
        return {unit.mess_id: AtSite(SiteId(unit.depot)) for unit in self.system.fleet}

    def with_mode(self, mode: FleetMode) -> CaseConfig:
        return replace(self, rolling=replace(self.rolling, mode=mode))

    def __str__(self) -> str:
        lines = [
            f"Case {self.name}",
            f"Intervals: {self.t_h} (prediction {self.t_p}, {self.dt_h} h each)",
            f"Roads: {len(self.roads)}, sites: {len(self.system.net.sites)}",
            f"MESS units: {len(self.system.fleet)}",
            str(self.system.ds),
        ]
        return "\n".join(lines)


def load_case(path: Path | str) -> CaseConfig:
    """Read, validate and convert a case file

    :raises CaseValidationError: the document or a referenced table is invalid
    """
    path = Path(path)
    if not path.is_file():
        raise CaseValidationError(path, "case file does not exist")
    text = path.read_text(encoding="utf-8")
    try:
        document = CaseDocument.model_validate_json(text)
    except ValidationError as error:
        first = error.errors()[0]
        location = ".".join(str(part) for part in first["loc"]) or "document"
        raise CaseValidationError(
            path, f"{location}: {first['msg']}", _line_of(text, first["loc"])
        ) from None
    try:
        return _build_case(document, path, text)
    except CaseValidationError:
        raise
    except (
        DistributionSystemError,
        TransportNetworkError,
        ScenarioError,
        MilpModelError,
        ValidationError,
        ValueError,
    ) as error:
        raise CaseValidationError(path, str(error)) from None


def _line_of(text: str, loc: Sequence[int | str]) -> int | None:
    """Line of the innermost key of ``loc`` found by searching the raw text"""
    position = 0
    found = None
    for part in loc:
        if not isinstance(part, str):
            continue
        at = text.find(json.dumps(part), position)
        if at < 0:
            break
        position = found = at
    if found is None:
        return None
    return text.count("\n", 0, found) + 1


def _build_case(document: CaseDocument, path: Path, text: str) -> CaseConfig:
    root = path.parent
    t_h = document.horizon.t_h
    costs = document.costs

    def profile(load_class: LoadClass, where: str) -> np.ndarray:
        values = document.load_profiles.get(load_class)
        if values is None:
            raise CaseValidationError(
                path,
                f"{where}: no load profile for class {load_class.value}",
                _line_of(text, ["load_profiles"]),
            )
        return np.array([values[t % len(values)] for t in range(t_h)], dtype=float)

    buses: list[Bus] = []
    branches: list[Branch] = []
    for feeder in document.feeders:
        feeder_buses, feeder_branches = read_feeder(
            root / feeder.branches,
            root / feeder.buses,
            feeder.name,
            feeder.v_base_kv,
            base_kva=BASE_KVA,
            v_min=feeder.v_min,
            v_max=feeder.v_max,
            critical_cost=costs.critical,
            noncritical_cost=costs.noncritical,
        )
        buses.extend(feeder_buses)
        branches.extend(feeder_branches)

    microgrids = []
    for mg in document.microgrids:
        local = mg.local_peak_kw * profile(mg.local_class, f"microgrid {mg.id}")
        microgrids.append(
            Microgrid(
                microgrid_id=mg.id,
                site=mg.site,
                feeder=mg.feeder,
                bus=bus_name(mg.feeder, mg.bus),
                p_max_pu=mg.p_max_kw / BASE_KVA,
                q_max_pu=mg.q_max_kvar / BASE_KVA,
                e_max_pu=mg.e_max_kwh / BASE_KVA,
                e_min_pu=mg.e_min_kwh / BASE_KVA,
                e_init_pu=mg.e_init_kwh / BASE_KVA,
                gen_cost=costs.generation if mg.gen_cost is None else mg.gen_cost,
                local_load_pu=[float(p) / BASE_KVA for p in local],
                local_power_factor=mg.local_power_factor,
                local_cost=costs.local if mg.local_cost is None else mg.local_cost,
            )
        )
    ds = DistributionSystem(
        buses=buses, branches=branches, microgrids=microgrids, base_kva=BASE_KVA
    )

    net = TransportNetwork.from_edge_list(
        document.transport.roads,
        [
            Site(site_id=SiteId(s.id), kind=s.kind, node=NodeId(s.node))
            for s in document.transport.sites
        ],
    )
    fleet = tuple(
        MessUnit(
            mess_id=m.id,
            depot=m.depot,
            p_max_pu=m.p_max_kw / BASE_KVA,
            capacity_pu=m.capacity_kwh / BASE_KVA,
            soc_init=m.soc_init,
            soc_min=m.soc_min,
            soc_max=m.soc_max,
            eta_ch=m.eta_ch,
            eta_dch=m.eta_dch,
            v_avg_kmh=m.v_avg_kmh,
            c_bat=costs.battery if m.c_bat is None else m.c_bat,
            c_tran=costs.transportation if m.c_tran is None else m.c_tran,
        )
        for m in document.mess
    )
    system = RestorationSystem(ds=ds, net=net, fleet=fleet, dt_h=document.horizon.dt_h)

    forecast = LoadForecast(
        buses=ds.bus_ids,
        p_kw=np.array(
            [bus.p_kw * profile(bus.load_class, f"bus {bus.bus_id}") for bus in buses]
        ).reshape(len(buses), t_h),
        power_factor=np.array([bus.power_factor for bus in buses], dtype=float),
        load_class=tuple(bus.load_class for bus in buses),
    )
    road_models, branch_models = _availability(
        document.reliability, net, ds, path, text
    )

    scenario_doc = document.scenarios
    scenario_settings = ScenarioSettings(
        n_generated=scenario_doc.n_generated,
        n_reduced=scenario_doc.n_reduced,
        load_error_sd=scenario_doc.load_error_sd,
        availability_weight=(
            1.0
            if scenario_doc.availability_weight is None
            else scenario_doc.availability_weight
        ),
        first_interval_exact=scenario_doc.first_interval_exact,
    )
    solver = document.solver
    solve_options = SolveOptions(
        mip_gap=solver.mip_gap,
        int_tol=solver.int_tol,
        feas_tol=solver.feas_tol,
        time_limit_s=solver.time_limit_s,
        node_limit=solver.node_limit,
        lp_engine=_enum(LpEngine, solver.lp_engine, path, text, "lp_engine"),
        n_workers=solver.n_workers,
    )
    rolling_doc = document.rolling
    rolling = RollingSettings(
        mode=_enum(FleetMode, rolling_doc.mode, path, text, "mode"),
        transport_cost_weighting=_enum(
            TransportCostWeighting,
            rolling_doc.transport_cost_weighting,
            path,
            text,
            "transport_cost_weighting",
        ),
        require_depot_return=rolling_doc.require_depot_return,
        strict_radiality=rolling_doc.strict_radiality,
        pairwise_nonanticipativity=rolling_doc.pairwise_nonanticipativity,
        reopt_policy=_enum(
            ReoptPolicy, rolling_doc.reopt_policy, path, text, "reopt_policy"
        ),
        n_threads=rolling_doc.n_threads,
        debug_level=rolling_doc.debug_level,
    )

    events: tuple[RealizationEvent, ...] = ()
    if document.realization is not None:
        known = {model.element for _, model in (*road_models, *branch_models)}
        for event in document.realization.events:
            if event.element not in known:
                raise CaseValidationError(
                    path,
                    f"realization event refers to unknown element {event.element}",
                    _line_of(text, ["realization", "events"]),
                )
            if event.interval >= t_h:
                raise CaseValidationError(
                    path,
                    f"realization event on {event.element} at interval"
                    f" {event.interval} is past the run of {t_h} intervals",
                    _line_of(text, ["realization", "events"]),
                )
        events = tuple(
            RealizationEvent(e.element, e.interval, e.status == "up")
            for e in document.realization.events
        )

    case = CaseConfig(
        name=document.name,
        notes=document.notes,
        system=system,
        forecast=forecast,
        roads=road_models,
        branches=branch_models,
        t_h=t_h,
        t_p=document.horizon.t_p,
        scenario_settings=scenario_settings,
        seed=document.seeds.base,
        solve_options=solve_options,
        rolling=rolling,
        events=events,
        source=path,
    )
    logger.info(
        "loaded case %s: %d buses, %d branches, %d microgrids, %d MESS",
        case.name,
        len(ds.buses),
        len(ds.branches),
        len(ds.microgrids),
        len(fleet),
    )
    return case


def _availability(
    reliability: ReliabilityDocument,
    net: TransportNetwork,
    ds: DistributionSystem,
    path: Path,
    text: str,
) -> tuple[
    tuple[tuple[EdgeKey, AvailabilityModel], ...],
    tuple[tuple[str, AvailabilityModel], ...],
]:
    down = set(reliability.initially_down)
    known = {road_element(edge) for edge in net.edges} | {
        branch_element(branch) for branch in ds.branch_ids
    }
    unknown = sorted((down | set(reliability.overrides)) - known)
    if unknown:
        raise CaseValidationError(
            path,
            f"reliability refers to unknown elements {unknown}",
            _line_of(text, ["reliability", unknown[0]]),
        )

    def model(element: str, default: MeanTimesDocument) -> AvailabilityModel:
        times = reliability.overrides.get(element, default)
        return AvailabilityModel(
            element=element,
            mean_up_h=times.mean_up_h,
            mean_down_h=times.mean_down_h,
            initially_up=element not in down,
        )

    roads = tuple(
        (edge, model(road_element(edge), reliability.roads)) for edge in net.edges
    )
    branches = tuple(
        (branch, model(branch_element(branch), reliability.branches))
        for branch in ds.branch_ids
    )
    return roads, branches


def _enum(kind: type[E], value: str, path: Path, text: str, key: str) -> E:
    try:
        if kind is LpEngine:
            return kind[value]
        return kind(value)
    except (KeyError, ValueError):
        names = (
            [m.name for m in kind] if kind is LpEngine else [m.value for m in kind]
        )
        raise CaseValidationError(
            path, f"{key}: {value!r} is not one of {names}", _line_of(text, [key])
        ) from None
