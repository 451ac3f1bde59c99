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

"""Two-stage stochastic restoration model over one prediction horizon

Per scenario the model holds MESS routing on the time-space layers, MESS
charging and energy, radial reconfiguration through a fictitious flow,
LinDistFlow with a big-M voltage disjunction and microgrid dispatch. Routing
arcs of the first interval and branch statuses of the first interval are tied
across scenarios. The objective is the probability-weighted sum of
interruption, generation, battery and transportation costs.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from ..grid import PowerFlowState, Topology
from ..scenario import ScenarioSet, tan_phi
from ..tsn import ArcKind, NodeKind, StageKey, TimeSpaceNetwork, TsArc, cut_set
from .model import CostTerm, Marker, MilpModel, MilpModelError, Sense
from .problem import HorizonState, RestorationSystem
from .settings import ModelSettings, TransportCostWeighting

logger = logging.getLogger(__name__)

LayerKey = tuple[str, int]


@dataclass
class ModelIndex:
    """Variable positions keyed by the indices they model

    Time-indexed keys use the interval within the horizon. Energy variables are
    indexed by the end of the interval, 1..H.
    """

    zeta: dict[tuple[str, int, TsArc], int] = field(default_factory=dict)
    i_ch: dict[tuple[str, int, int], int] = field(default_factory=dict)
    i_dch: dict[tuple[str, int, int], int] = field(default_factory=dict)
    p_ch: dict[tuple[str, str, int, int], int] = field(default_factory=dict)
    p_dch: dict[tuple[str, str, int, int], int] = field(default_factory=dict)
    e_mess: dict[tuple[str, int, int], int] = field(default_factory=dict)
    alpha: dict[tuple[str, int, int], int] = field(default_factory=dict)
    f_flow: dict[tuple[str, int, int], int] = field(default_factory=dict)
    f_inj: dict[tuple[str, int, int], int] = field(default_factory=dict)
    p_r: dict[tuple[str, int, int], int] = field(default_factory=dict)
    q_r: dict[tuple[str, int, int], int] = field(default_factory=dict)
    p_flow: dict[tuple[str, int, int], int] = field(default_factory=dict)
    q_flow: dict[tuple[str, int, int], int] = field(default_factory=dict)
    v: dict[tuple[str, int, int], int] = field(default_factory=dict)
    p_dg: dict[tuple[str, int, int], int] = field(default_factory=dict)
    q_dg: dict[tuple[str, int, int], int] = field(default_factory=dict)
    p_g: dict[tuple[str, int, int], int] = field(default_factory=dict)
    q_g: dict[tuple[str, int, int], int] = field(default_factory=dict)
    p_local: dict[tuple[str, int, int], int] = field(default_factory=dict)
    e_dg: dict[tuple[str, int, int], int] = field(default_factory=dict)


@dataclass
class RestorationModel:
    model: MilpModel
    index: ModelIndex
    system: RestorationSystem
    state: HorizonState
    scenarios: ScenarioSet
    layers: Mapping[LayerKey, TimeSpaceNetwork]
    live: dict[tuple[int, int], frozenset[str]] = field(default_factory=dict)

    @property
    def horizon(self) -> int:
        return self.state.horizon

    def first_stage_arcs(self, mess: str, s: int) -> dict[StageKey, int]:
        layer = self.layers[(mess, s)]
        return {
            arc.stage_key: self.index.zeta[(mess, s, arc)] for arc in cut_set(layer, 0)
        }


def build_model(
    system: RestorationSystem,
    state: HorizonState,
    scenarios: ScenarioSet,
    layers: Mapping[LayerKey, TimeSpaceNetwork],
    settings: ModelSettings | None = None,
) -> RestorationModel:
    """Assemble the stochastic model for the horizon starting at ``state.t0``

    :param layers: one time-space layer per (MESS, scenario index)
    """
    settings = settings or ModelSettings.default()
    _check_inputs(system, state, scenarios, layers)
    model = MilpModel(name=f"restoration_t{state.t0:03d}")
    rm = RestorationModel(model, ModelIndex(), system, state, scenarios, layers)
    for s in range(len(scenarios)):
        for unit in system.fleet:
            _add_routing(rm, unit.mess_id, s, settings)
            _add_mess_operation(rm, unit.mess_id, s)
        for t in range(state.horizon):
            damaged = scenarios.damaged_branches(s, t)
            rm.live[(s, t)] = system.ds.energizable_buses(damaged)
            _add_radiality(rm, s, t, damaged, settings)
            _add_power_flow(rm, s, t)
            _add_microgrids(rm, s, t)
        _add_microgrid_energy(rm, s)
    if len(scenarios) > 1:
        _add_nonanticipativity(rm, settings)
    logger.debug("%s", model)
    return rm


def _check_inputs(
    system: RestorationSystem,
    state: HorizonState,
    scenarios: ScenarioSet,
    layers: Mapping[LayerKey, TimeSpaceNetwork],
) -> None:
    if scenarios.horizon < state.horizon:
        raise MilpModelError(
            f"Scenarios cover {scenarios.horizon} intervals, horizon needs"
            f" {state.horizon}"
        )
    if tuple(scenarios.buses) != system.ds.bus_ids:
        raise MilpModelError("Scenario load buses do not match the feeder buses")
    for s in range(len(scenarios)):
        for unit in system.fleet:
            layer = layers.get((unit.mess_id, s))
            if layer is None:
                raise MilpModelError(f"No layer for MESS {unit.mess_id}, scenario {s}")
            if layer.horizon != state.horizon:
                raise MilpModelError(
                    f"Layer {unit.mess_id}/{s} spans {layer.horizon} intervals,"
                    f" horizon is {state.horizon}"
                )
    for unit in system.fleet:
        if unit.mess_id not in state.mess_energy:
            raise MilpModelError(f"No initial energy for MESS {unit.mess_id}")
    for mg in system.ds.microgrids:
        if mg.microgrid_id not in state.mg_energy:
            raise MilpModelError(f"No initial energy for microgrid {mg.microgrid_id}")


def _add_routing(
    rm: RestorationModel, mess: str, s: int, settings: ModelSettings
) -> None:
    model, index = rm.model, rm.index
    layer = rm.layers[(mess, s)]
    unit = rm.system.mess(mess)
    weight = (
        rm.scenarios[s].probability
        if settings.transport_cost_weighting == TransportCostWeighting.expected
        else 1.0
    )
    for arc in layer.arcs:
        var = model.add_binary(f"zeta[{mess},{s},{arc.label}]")
        index.zeta[(mess, s, arc)] = var
        travelling = arc.kind == ArcKind.moving or (
            arc.kind == ArcKind.source and arc.span > 0
        )
        if travelling:
            cost = unit.c_tran * arc.span * rm.system.dt_h * weight
            model.add_cost(var, cost, CostTerm.transportation)

    for t in range(layer.horizon):
        model.add_constraint(
            {index.zeta[(mess, s, arc)]: 1.0 for arc in cut_set(layer, t)},
            Sense.eq,
            1.0,
            Marker.routing_cut,
            name=f"cut[{mess},{s},{t}]",
        )
    for node in layer.nodes:
        coefficients: dict[int, float] = {}
        for arc in layer.in_arcs(node):
            coefficients[index.zeta[(mess, s, arc)]] = 1.0
        for arc in layer.out_arcs(node):
            coefficients[index.zeta[(mess, s, arc)]] = (
                coefficients.get(index.zeta[(mess, s, arc)], 0.0) - 1.0
            )
        match node.kind:
            case NodeKind.source:
                coefficients = {j: -c for j, c in coefficients.items()}
                rhs = 1.0
            case NodeKind.sink:
                rhs = 1.0
            case _:
                rhs = 0.0
        model.add_constraint(
            coefficients,
            Sense.eq,
            rhs,
            Marker.routing_flow,
            name=f"flow[{mess},{s},{node}]",
        )


def _add_mess_operation(rm: RestorationModel, mess: str, s: int) -> None:
    model, index, system = rm.model, rm.index, rm.system
    layer = rm.layers[(mess, s)]
    unit = system.mess(mess)
    probability = rm.scenarios[s].probability
    battery_cost = probability * unit.c_bat * system.power_to_cost
    dt = system.dt_h
    for t in range(layer.horizon):
        i_ch = model.add_binary(f"ich[{mess},{s},{t}]")
        i_dch = model.add_binary(f"idch[{mess},{s},{t}]")
        index.i_ch[(mess, s, t)] = i_ch
        index.i_dch[(mess, s, t)] = i_dch
        charge: dict[int, float] = {}
        discharge: dict[int, float] = {}
        present: dict[int, float] = {}
        for site, arc in sorted(layer.charging_arcs(t).items()):
            zeta = index.zeta[(mess, s, arc)]
            p_ch = model.add_variable(
                f"pch[{mess},{site},{s},{t}]", ub=unit.p_max_pu
            )
            p_dch = model.add_variable(
                f"pdch[{mess},{site},{s},{t}]", ub=unit.p_max_pu
            )
            model.add_cost(p_ch, battery_cost, CostTerm.battery)
            model.add_cost(p_dch, battery_cost, CostTerm.battery)
            index.p_ch[(mess, site, s, t)] = p_ch
            index.p_dch[(mess, site, s, t)] = p_dch
            for var, label in ((p_ch, "ch"), (p_dch, "dch")):
                model.add_constraint(
                    {var: 1.0, zeta: -unit.p_max_pu},
                    Sense.le,
                    0.0,
                    Marker.mess_presence,
                    name=f"at_{label}[{mess},{site},{s},{t}]",
                )
            charge[p_ch] = 1.0
            discharge[p_dch] = 1.0
            present[zeta] = present.get(zeta, 0.0) - 1.0
        model.add_constraint(
            {**charge, i_ch: -unit.p_max_pu},
            Sense.le,
            0.0,
            Marker.mess_mode,
            name=f"mode_ch[{mess},{s},{t}]",
        )
        model.add_constraint(
            {**discharge, i_dch: -unit.p_max_pu},
            Sense.le,
            0.0,
            Marker.mess_mode,
            name=f"mode_dch[{mess},{s},{t}]",
        )
        model.add_constraint(
            {i_ch: 1.0, i_dch: 1.0, **present},
            Sense.le,
            0.0,
            Marker.mess_exclusive,
            name=f"exclusive[{mess},{s},{t}]",
        )
        energy = model.add_variable(
            f"emess[{mess},{s},{t + 1}]", lb=unit.energy_min, ub=unit.energy_max
        )
        index.e_mess[(mess, s, t + 1)] = energy
        row = {energy: 1.0}
        for var in charge:
            row[var] = -dt * unit.eta_ch
        for var in discharge:
            row[var] = dt / unit.eta_dch
        rhs = 0.0
        if t == 0:
            rhs = rm.state.mess_energy[mess]
        else:
            row[index.e_mess[(mess, s, t)]] = -1.0
        model.add_constraint(
            row, Sense.eq, rhs, Marker.mess_energy, name=f"soc[{mess},{s},{t + 1}]"
        )


def _add_radiality(
    rm: RestorationModel,
    s: int,
    t: int,
    damaged: frozenset[str],
    settings: ModelSettings,
) -> None:
    model, index, ds = rm.model, rm.index, rm.system.ds
    live = rm.live[(s, t)]
    big_m = ds.fictitious_big_m
    for branch in ds.branches:
        key = (branch.branch_id, s, t)
        alpha = model.add_binary(f"alpha[{branch.branch_id},{s},{t}]")
        energizable = (
            branch.branch_id not in damaged
            and branch.from_bus in live
            and branch.to_bus in live
        )
        if not energizable:
            model.set_bounds(alpha, 0.0, 0.0)
        elif not branch.switchable:
            model.set_bounds(alpha, 1.0, 1.0)
        flow = model.add_variable(
            f"fflow[{branch.branch_id},{s},{t}]", lb=-big_m, ub=big_m
        )
        index.alpha[key] = alpha
        index.f_flow[key] = flow
        for sign in (1.0, -1.0):
            model.add_constraint(
                {flow: sign, alpha: -big_m},
                Sense.le,
                0.0,
                Marker.radiality_bound,
            )
            if settings.strict_radiality:
                model.add_constraint(
                    {flow: sign, alpha: big_m},
                    Sense.le,
                    2.0 * big_m,
                    Marker.radiality_strict,
                )

    for bus in ds.bus_ids:
        if bus not in live:
            continue
        row: dict[int, float] = {}
        for branch in ds.in_branches[bus]:
            row[index.f_flow[(branch.branch_id, s, t)]] = 1.0
        for branch in ds.out_branches[bus]:
            row[index.f_flow[(branch.branch_id, s, t)]] = -1.0
        if bus in ds.microgrid_buses:
            injection = model.add_variable(f"finj[{bus},{s},{t}]", ub=big_m)
            index.f_inj[(bus, s, t)] = injection
            row[injection] = 1.0
            model.add_constraint(row, Sense.eq, 0.0, Marker.radiality_injection)
        else:
            model.add_constraint(row, Sense.eq, 1.0, Marker.radiality_flow)

    for feeder in ds.feeders:
        branches = [b for b in ds.branches if b.feeder == feeder]
        buses = [b for b in ds.buses if b.feeder == feeder and b.bus_id in live]
        sources = {mg.bus for mg in ds.microgrids if mg.feeder == feeder}
        model.add_constraint(
            {index.alpha[(b.branch_id, s, t)]: 1.0 for b in branches},
            Sense.eq,
            float(len(buses) - len(sources)),
            Marker.radiality_count,
            name=f"count[{feeder},{s},{t}]",
        )


def _add_power_flow(rm: RestorationModel, s: int, t: int) -> None:
    model, index, system = rm.model, rm.index, rm.system
    ds = system.ds
    live = rm.live[(s, t)]
    scenario = rm.scenarios[s]
    probability = scenario.probability
    big_m = ds.voltage_big_m
    for b, bus in enumerate(ds.buses):
        key = (bus.bus_id, s, t)
        demand = float(scenario.load_kw[b, t]) / ds.base_kva
        price = probability * bus.interruption_cost * system.power_to_cost
        model.add_offset(CostTerm.interruption, price * demand)
        restorable = demand if bus.bus_id in live else 0.0
        p_r = model.add_variable(f"pr[{bus.bus_id},{s},{t}]", ub=restorable)
        model.add_cost(p_r, -price, CostTerm.interruption)
        ratio = bus.q_kvar / bus.p_kw if bus.p_kw > 0 else 0.0
        q_max = restorable * ratio
        q_r = model.add_variable(
            f"qr[{bus.bus_id},{s},{t}]", lb=min(0.0, q_max), ub=max(0.0, q_max)
        )
        index.p_r[key] = p_r
        index.q_r[key] = q_r
        model.add_constraint(
            {q_r: 1.0, p_r: -ratio}, Sense.eq, 0.0, Marker.load_power_factor
        )
        if not (ds.in_branches[bus.bus_id] or ds.out_branches[bus.bus_id]):
            continue
        if bus.bus_id in ds.microgrid_buses:
            v = model.add_variable(f"v[{bus.bus_id},{s},{t}]", lb=ds.v0, ub=ds.v0)
        else:
            v = model.add_variable(
                f"v[{bus.bus_id},{s},{t}]", lb=bus.v_min, ub=bus.v_max
            )
        index.v[key] = v

    for branch in ds.branches:
        key = (branch.branch_id, s, t)
        limit = branch.s_max_pu
        p = model.add_variable(f"p[{branch.branch_id},{s},{t}]", lb=-limit, ub=limit)
        q = model.add_variable(f"q[{branch.branch_id},{s},{t}]", lb=-limit, ub=limit)
        index.p_flow[key] = p
        index.q_flow[key] = q
        alpha = index.alpha[key]
        for cp, cq, scale in (
            (1.0, 0.0, 1.0),
            (-1.0, 0.0, 1.0),
            (0.0, 1.0, 1.0),
            (0.0, -1.0, 1.0),
            (1.0, 1.0, math.sqrt(2)),
            (1.0, -1.0, math.sqrt(2)),
            (-1.0, 1.0, math.sqrt(2)),
            (-1.0, -1.0, math.sqrt(2)),
        ):
            row = {alpha: -scale * limit}
            if cp:
                row[p] = cp
            if cq:
                row[q] = cq
            model.add_constraint(row, Sense.le, 0.0, Marker.branch_capacity)
        drop = {
            index.v[(branch.from_bus, s, t)]: 1.0,
            index.v[(branch.to_bus, s, t)]: -1.0,
            p: -branch.r_pu / ds.v0,
            q: -branch.x_pu / ds.v0,
        }
        model.add_constraint(
            {**drop, alpha: big_m}, Sense.le, big_m, Marker.voltage_drop
        )
        model.add_constraint(
            {**drop, alpha: -big_m}, Sense.ge, -big_m, Marker.voltage_drop
        )


def _add_microgrids(rm: RestorationModel, s: int, t: int) -> None:
    model, index, system = rm.model, rm.index, rm.system
    ds = system.ds
    probability = rm.scenarios[s].probability
    for mg in ds.microgrids:
        key = (mg.microgrid_id, s, t)
        p_dg = model.add_variable(f"pdg[{mg.microgrid_id},{s},{t}]", ub=mg.p_max_pu)
        model.add_cost(
            p_dg, probability * mg.gen_cost * system.power_to_cost, CostTerm.generation
        )
        q_dg = model.add_variable(
            f"qdg[{mg.microgrid_id},{s},{t}]", lb=-mg.q_max_pu, ub=mg.q_max_pu
        )
        p_g = model.add_variable(
            f"pg[{mg.microgrid_id},{s},{t}]", lb=-math.inf, ub=math.inf
        )
        q_g = model.add_variable(
            f"qg[{mg.microgrid_id},{s},{t}]", lb=-math.inf, ub=math.inf
        )
        local = mg.local_load(rm.state.t0 + t)
        price = probability * mg.local_cost * system.power_to_cost
        model.add_offset(CostTerm.interruption, price * local)
        p_local = model.add_variable(f"pd[{mg.microgrid_id},{s},{t}]", ub=local)
        model.add_cost(p_local, -price, CostTerm.interruption)
        index.p_dg[key] = p_dg
        index.q_dg[key] = q_dg
        index.p_g[key] = p_g
        index.q_g[key] = q_g
        index.p_local[key] = p_local

        active = {p_g: 1.0, p_dg: -1.0, p_local: 1.0}
        for unit in system.fleet:
            p_dch = index.p_dch.get((unit.mess_id, mg.site, s, t))
            p_ch = index.p_ch.get((unit.mess_id, mg.site, s, t))
            if p_dch is not None and p_ch is not None:
                active[p_dch] = -1.0
                active[p_ch] = 1.0
        model.add_constraint(
            active,
            Sense.eq,
            0.0,
            Marker.microgrid_injection,
            name=f"inj_p[{mg.microgrid_id},{s},{t}]",
        )
        model.add_constraint(
            {q_g: 1.0, q_dg: -1.0, p_local: float(tan_phi(mg.local_power_factor))},
            Sense.eq,
            0.0,
            Marker.microgrid_injection,
            name=f"inj_q[{mg.microgrid_id},{s},{t}]",
        )

    # nodal balance needs the injections of every microgrid at the bus
    for bus in ds.bus_ids:
        p_row: dict[int, float] = {index.p_r[(bus, s, t)]: -1.0}
        q_row: dict[int, float] = {index.q_r[(bus, s, t)]: -1.0}
        for mg in ds.microgrids_at(bus):
            p_row[index.p_g[(mg.microgrid_id, s, t)]] = 1.0
            q_row[index.q_g[(mg.microgrid_id, s, t)]] = 1.0
        for branch in ds.out_branches[bus]:
            p_row[index.p_flow[(branch.branch_id, s, t)]] = -1.0
            q_row[index.q_flow[(branch.branch_id, s, t)]] = -1.0
        for branch in ds.in_branches[bus]:
            p_row[index.p_flow[(branch.branch_id, s, t)]] = 1.0
            q_row[index.q_flow[(branch.branch_id, s, t)]] = 1.0
        model.add_constraint(
            p_row, Sense.eq, 0.0, Marker.power_balance, name=f"bal_p[{bus},{s},{t}]"
        )
        model.add_constraint(
            q_row, Sense.eq, 0.0, Marker.power_balance, name=f"bal_q[{bus},{s},{t}]"
        )


def _add_microgrid_energy(rm: RestorationModel, s: int) -> None:
    model, index, system = rm.model, rm.index, rm.system
    for mg in system.ds.microgrids:
        for t in range(rm.horizon):
            energy = model.add_variable(
                f"edg[{mg.microgrid_id},{s},{t + 1}]", lb=mg.e_min_pu, ub=mg.e_max_pu
            )
            index.e_dg[(mg.microgrid_id, s, t + 1)] = energy
            row = {energy: 1.0, index.p_dg[(mg.microgrid_id, s, t)]: system.dt_h}
            rhs = 0.0
            if t == 0:
                rhs = rm.state.mg_energy[mg.microgrid_id]
            else:
                row[index.e_dg[(mg.microgrid_id, s, t)]] = -1.0
            model.add_constraint(
                row,
                Sense.eq,
                rhs,
                Marker.microgrid_energy,
                name=f"edg[{mg.microgrid_id},{s},{t + 1}]",
            )


def _add_nonanticipativity(rm: RestorationModel, settings: ModelSettings) -> None:
    model = rm.model
    n = len(rm.scenarios)
    probabilities = rm.scenarios.probabilities
    groups: list[tuple[str, list[int | None]]] = []
    for unit in rm.system.fleet:
        per_scenario = [rm.first_stage_arcs(unit.mess_id, s) for s in range(n)]
        keys = sorted(
            set().union(*per_scenario), key=lambda k: (k[0].value, k[1], k[2])
        )
        for kind, tail, head in keys:
            label = f"{unit.mess_id},{kind.value}:{tail or '-'}>{head or '-'}"
            groups.append(
                (label, [arcs.get((kind, tail, head)) for arcs in per_scenario])
            )
    for branch in rm.system.ds.branch_ids:
        groups.append(
            (branch, [rm.index.alpha[(branch, s, 0)] for s in range(n)])
        )

    for label, copies in groups:
        if settings.pairwise_nonanticipativity:
            for s in range(n - 1):
                row: dict[int, float] = {}
                if copies[s] is not None:
                    row[copies[s]] = 1.0
                if copies[s + 1] is not None:
                    row[copies[s + 1]] = row.get(copies[s + 1], 0.0) - 1.0
                if row:
                    model.add_constraint(
                        row,
                        Sense.eq,
                        0.0,
                        Marker.nonanticipativity,
                        name=f"na[{label},{s}]",
                    )
            continue
        for s in range(n):
            row = {}
            if copies[s] is not None:
                row[copies[s]] = 1.0
            for other, var in enumerate(copies):
                if var is not None:
                    row[var] = row.get(var, 0.0) - float(probabilities[other])
            model.add_constraint(
                row, Sense.eq, 0.0, Marker.nonanticipativity, name=f"na[{label},{s}]"
            )


@dataclass(frozen=True)
class FirstStage:
    """Decisions shared by all scenarios for the first interval

    :param arcs: chosen cut-0 arc per MESS, taken from the most likely scenario
    :param closed: branches closed during the first interval
    """

    arcs: Mapping[str, TsArc]
    closed: frozenset[str]

    def stage_keys(self) -> dict[str, StageKey]:
        return {mess: arc.stage_key for mess, arc in self.arcs.items()}


@dataclass(frozen=True)
class IntervalDispatch:
    """Operating point of one scenario during one interval (per unit)

    Energies are the values at the end of the interval.
    """

    arcs: Mapping[str, TsArc]
    closed: frozenset[str]
    p_ch: Mapping[tuple[str, str], float]
    p_dch: Mapping[tuple[str, str], float]
    p_dg: Mapping[str, float]
    q_dg: Mapping[str, float]
    p_g: Mapping[str, float]
    q_g: Mapping[str, float]
    p_local: Mapping[str, float]
    p_r: Mapping[str, float]
    q_r: Mapping[str, float]
    p_flow: Mapping[str, float]
    q_flow: Mapping[str, float]
    v: Mapping[str, float]
    mess_energy: Mapping[str, float]
    mg_energy: Mapping[str, float]

    @classmethod
    def all_shed(
        cls, system: RestorationSystem, state: HorizonState, closed: frozenset[str]
    ) -> IntervalDispatch:
        """Nothing restored, generators idle and MESS batteries untouched"""
        ds = system.ds
        zeros_mg = {mg.microgrid_id: 0.0 for mg in ds.microgrids}
        return cls(
            arcs={},
            closed=closed,
            p_ch={},
            p_dch={},
            p_dg=zeros_mg,
            q_dg=zeros_mg,
            p_g=zeros_mg,
            q_g=zeros_mg,
            p_local=zeros_mg,
            p_r={bus: 0.0 for bus in ds.bus_ids},
            q_r={bus: 0.0 for bus in ds.bus_ids},
            p_flow={branch: 0.0 for branch in ds.branch_ids},
            q_flow={branch: 0.0 for branch in ds.branch_ids},
            v={bus: ds.v0 for bus in ds.bus_ids},
            mess_energy=dict(state.mess_energy),
            mg_energy=dict(state.mg_energy),
        )

    def mess_net_discharge(self, mess: str) -> float:
        discharged = sum(v for (m, _), v in self.p_dch.items() if m == mess)
        charged = sum(v for (m, _), v in self.p_ch.items() if m == mess)
        return discharged - charged

    def topology(self, system: RestorationSystem) -> Topology:
        return Topology.from_closed(system.ds.branch_ids, self.closed)

    def power_flow_state(self, system: RestorationSystem) -> PowerFlowState:
        """Single-interval LinDistFlow state for residual checks"""
        ds = system.ds
        p_injection: dict[str, np.ndarray] = {}
        q_injection: dict[str, np.ndarray] = {}
        for mg in ds.microgrids:
            p_injection[mg.bus] = p_injection.get(mg.bus, np.zeros(1)) + self.p_g[
                mg.microgrid_id
            ]
            q_injection[mg.bus] = q_injection.get(mg.bus, np.zeros(1)) + self.q_g[
                mg.microgrid_id
            ]

        def series(values: Mapping[str, float]) -> dict[str, np.ndarray]:
            return {key: np.array([value]) for key, value in values.items()}

        return PowerFlowState(
            horizon=1,
            p_injection=p_injection,
            q_injection=q_injection,
            p_restored=series(self.p_r),
            q_restored=series(self.q_r),
            p_flow=series(self.p_flow),
            q_flow=series(self.q_flow),
            voltage=series(self.v),
        )


def most_likely_scenario(scenarios: ScenarioSet) -> int:
    """Index of the highest-probability scenario, lowest index on ties"""
    return int(np.argmax(scenarios.probabilities))


def first_stage(rm: RestorationModel, values: np.ndarray) -> FirstStage:
    s = most_likely_scenario(rm.scenarios)
    return FirstStage(
        arcs=_chosen_arcs(rm, values, s, 0), closed=_closed(rm, values, s, 0)
    )


def interval_dispatch(
    rm: RestorationModel, values: np.ndarray, s: int, t: int = 0
) -> IntervalDispatch:
    """Read the operating point of scenario ``s`` during interval ``t``"""
    index, ds = rm.index, rm.system.ds

    def pick(
        keyed: Mapping[tuple[str, int, int], int], ids: tuple[str, ...]
    ) -> dict[str, float]:
        return {i: float(values[keyed[(i, s, t)]]) for i in ids if (i, s, t) in keyed}

    mg_ids = tuple(mg.microgrid_id for mg in ds.microgrids)
    fleet_ids = tuple(unit.mess_id for unit in rm.system.fleet)
    p_ch = {
        (mess, site): float(values[var])
        for (mess, site, s_, t_), var in index.p_ch.items()
        if (s_, t_) == (s, t)
    }
    p_dch = {
        (mess, site): float(values[var])
        for (mess, site, s_, t_), var in index.p_dch.items()
        if (s_, t_) == (s, t)
    }
    return IntervalDispatch(
        arcs=_chosen_arcs(rm, values, s, t),
        closed=_closed(rm, values, s, t),
        p_ch=p_ch,
        p_dch=p_dch,
        p_dg=pick(index.p_dg, mg_ids),
        q_dg=pick(index.q_dg, mg_ids),
        p_g=pick(index.p_g, mg_ids),
        q_g=pick(index.q_g, mg_ids),
        p_local=pick(index.p_local, mg_ids),
        p_r=pick(index.p_r, ds.bus_ids),
        q_r=pick(index.q_r, ds.bus_ids),
        p_flow=pick(index.p_flow, ds.branch_ids),
        q_flow=pick(index.q_flow, ds.branch_ids),
        v={
            bus: (
                float(values[index.v[(bus, s, t)]])
                if (bus, s, t) in index.v
                else ds.v0
            )
            for bus in ds.bus_ids
        },
        mess_energy={
            mess: float(values[index.e_mess[(mess, s, t + 1)]]) for mess in fleet_ids
        },
        mg_energy={
            mg: float(values[index.e_dg[(mg, s, t + 1)]]) for mg in mg_ids
        },
    )


def _chosen_arcs(
    rm: RestorationModel, values: np.ndarray, s: int, t: int
) -> dict[str, TsArc]:
    chosen = {}
    for unit in rm.system.fleet:
        layer = rm.layers[(unit.mess_id, s)]
        arcs = cut_set(layer, t)
        weights = [values[rm.index.zeta[(unit.mess_id, s, arc)]] for arc in arcs]
        chosen[unit.mess_id] = arcs[int(np.argmax(weights))]
    return chosen


def _closed(rm: RestorationModel, values: np.ndarray, s: int, t: int) -> frozenset[str]:
    return frozenset(
        branch
        for branch in rm.system.ds.branch_ids
        if values[rm.index.alpha[(branch, s, t)]] > 0.5
    )
