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

"""Rolling-horizon restoration

Every interval of the run a fresh scenario set is drawn conditioned on the
realized state, the time-space layers are rebuilt from the current MESS
locations, the stochastic model is solved, its first-interval routing and
topology are implemented and the dispatch is re-optimised against the
realization. The realized interval is then scored and the state advanced.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np

from ..grid import Topology, validate_radial
from ..milp import (
    FirstStage,
    HorizonState,
    IntervalDispatch,
    ReoptInfeasibleError,
    ReoptPolicy,
    RestorationModel,
    RestorationSystem,
    Solution,
    SolveOptions,
    SolverError,
    SolverMode,
    SolveStatus,
    audit_solution,
    build_model,
    deterministic_reopt,
    expected_scenario,
    first_stage,
    interval_dispatch,
    most_likely_scenario,
    solve,
)
from ..milp.builder import LayerKey
from ..scenario import (
    ScenarioInputs,
    ScenarioSet,
    generate_scenarios,
    reduce_scenarios,
)
from ..transport import (
    ArcLocationMismatchError,
    AtSite,
    Continue,
    Hold,
    InTransit,
    MessLocation,
    MessMove,
    MessUnit,
    RoadStatus,
    SiteId,
    Travel,
    advance_mess,
    route_to,
    start_arrivals,
    travel_schedule,
)
from ..tsn import (
    ArcKind,
    FormulationSize,
    InfeasibleLayerError,
    LayerPolicy,
    MoveRule,
    NodeKind,
    TimeSpaceNetwork,
    TsArc,
    build_tsn,
    count_layers,
    pinned_layer,
)
from .realization import Realization, sample_realization, scripted_realization
from .report import TimelineReport
from .settings import FleetMode, RollingSettings

if TYPE_CHECKING:
    from ..case import CaseConfig

logger = logging.getLogger(__name__)

ENERGY_TOL = 1e-6
AUDIT_TOL = 1e-6


@dataclass(frozen=True)
class RollingState:
    """State carried from one interval of the run to the next

    Energies are in pu·h.
    """

    t: int
    t_h: int
    t_p: int
    locations: Mapping[str, MessLocation]
    mess_energy: Mapping[str, float]
    mg_energy: Mapping[str, float]
    topology: Topology

    @classmethod
    def initial(
        cls,
        system: RestorationSystem,
        t_h: int,
        t_p: int,
        locations: Mapping[str, MessLocation],
    ) -> RollingState:
        """Start of the run: MESSs at their depots, every branch open"""
        return cls(
            t=0,
            t_h=t_h,
            t_p=t_p,
            locations={u.mess_id: locations[u.mess_id] for u in system.fleet},
            mess_energy={u.mess_id: u.energy_init for u in system.fleet},
            mg_energy={mg.microgrid_id: mg.e_init_pu for mg in system.ds.microgrids},
            topology=Topology.from_closed(system.ds.branch_ids, ()),
        )

    @property
    def horizon(self) -> int:
        return min(self.t_p, self.t_h - self.t)

    @property
    def final_roll(self) -> bool:
        return self.t + self.t_p >= self.t_h

    def horizon_state(self) -> HorizonState:
        return HorizonState(
            t0=self.t,
            horizon=self.horizon,
            mess_energy=dict(self.mess_energy),
            mg_energy=dict(self.mg_energy),
            final_roll=self.final_roll,
        )

    def violations(self, system: RestorationSystem) -> list[str]:
        found = []
        if not 0 <= self.t <= self.t_h:
            found.append(f"interval {self.t} outside the run of {self.t_h}")
        for unit in system.fleet:
            energy = self.mess_energy[unit.mess_id]
            low, high = unit.energy_min - ENERGY_TOL, unit.energy_max + ENERGY_TOL
            if not low <= energy <= high:
                found.append(
                    f"MESS {unit.mess_id} energy {energy:.6g} outside"
                    f" [{unit.energy_min:.6g}, {unit.energy_max:.6g}]"
                )
        for mg in system.ds.microgrids:
            energy = self.mg_energy[mg.microgrid_id]
            if not mg.e_min_pu - ENERGY_TOL <= energy <= mg.e_max_pu + ENERGY_TOL:
                found.append(
                    f"microgrid {mg.microgrid_id} energy {energy:.6g} outside"
                    f" [{mg.e_min_pu:.6g}, {mg.e_max_pu:.6g}]"
                )
        return found


@dataclass(frozen=True)
class HorizonProblem:
    """Scenarios, layers and model of one prediction horizon"""

    state: HorizonState
    scenarios: ScenarioSet
    layers: Mapping[LayerKey, TimeSpaceNetwork]
    model: RestorationModel


class RollingRun:
    """One rolling-horizon run of a case

    :param seed: base seed, the case's seed by default
    :param mode: fleet mode overriding the case setting
    :param options: solver options, the case's by default
    :param solutions_dir: where export mode reads ``roll_ttt.sol`` files
    :param out_dir: where export mode writes models and debug dumps go
    """

    def __init__(
        self,
        case: CaseConfig,
        seed: int | None = None,
        mode: FleetMode | None = None,
        options: SolveOptions | None = None,
        solutions_dir: Path | None = None,
        out_dir: Path | None = None,
    ):
        self.case = case
        self.settings: RollingSettings = (
            case.rolling if mode is None else replace(case.rolling, mode=mode)
        )
        self.seed = case.seed if seed is None else seed
        self.options = options or case.solve_options
        self.solutions_dir = solutions_dir
        self.out_dir = out_dir
        self.system = (
            replace(case.system, fleet=())
            if self.settings.mode == FleetMode.no_mess
            else case.system
        )
        self.realization = self._realize()
        self.road_status: RoadStatus = self.realization.road_status()

    def _realize(self) -> Realization:
        case = self.case
        sd = case.scenario_settings.load_error_sd
        if case.scripted:
            return scripted_realization(
                case.forecast, case.roads, case.branches, case.events, self.seed, sd
            )
        return sample_realization(
            case.forecast, case.roads, case.branches, case.dt_h, self.seed, sd
        )

    def initial_state(self) -> RollingState:
        return RollingState.initial(
            self.system, self.case.t_h, self.case.t_p, self.case.initial_locations()
        )

    def scenarios(self, state: RollingState) -> ScenarioSet:
        """Reduced scenarios for the horizon at ``state.t``

        Availability processes start from the realized status at t and the
        first interval carries the realized loads.
        """
        case, t, horizon = self.case, state.t, state.horizon
        settings = case.scenario_settings
        realized = self.realization
        inputs = ScenarioInputs(
            forecast=case.forecast.window(t, horizon),
            roads=tuple(
                (edge, model.starting(bool(realized.road_up[r, t])))
                for r, (edge, model) in enumerate(case.roads)
            ),
            branches=tuple(
                (branch, model.starting(bool(realized.branch_up[b, t])))
                for b, (branch, model) in enumerate(case.branches)
            ),
            dt_h=case.dt_h,
            load_error_sd=settings.load_error_sd,
            exact_intervals=1 if settings.first_interval_exact else 0,
        )
        generated = generate_scenarios(inputs, settings.n_generated, [self.seed, 0, t])
        reduced = reduce_scenarios(
            generated, settings.n_reduced, settings.availability_weight
        )
        loads_now = realized.load_kw[:, t]
        scenarios = []
        for scenario in reduced.scenarios:
            load_kw = scenario.load_kw.copy()
            load_kw[:, 0] = loads_now
            scenarios.append(replace(scenario, load_kw=load_kw))
        return replace(reduced, scenarios=tuple(scenarios))

    def layer_policy(self, location: MessLocation, state: RollingState) -> LayerPolicy:
        match self.settings.mode:
            case FleetMode.dynamic:
                return LayerPolicy(
                    return_to_depot=self.settings.require_depot_return
                    and state.final_roll,
                    moves=MoveRule.free,
                )
            case FleetMode.allocation:
                destinations = None
                if isinstance(location, InTransit) and location.destination:
                    destinations = frozenset({location.destination})
                return LayerPolicy(
                    moves=MoveRule.first_departure if state.t == 0 else MoveRule.none,
                    destinations=destinations,
                )
            case FleetMode.no_mess:
                return LayerPolicy(moves=MoveRule.none)
            case _:
                raise ValueError(f"Unknown fleet mode {self.settings.mode}")

    def layer(
        self,
        unit: MessUnit,
        s: int,
        scenarios: ScenarioSet,
        state: RollingState,
    ) -> TimeSpaceNetwork:
        net, dt_h = self.system.net, self.system.dt_h
        location = state.locations[unit.mess_id]
        status = scenarios.road_status(s)
        schedule = travel_schedule(net, status, state.horizon, unit.v_avg_kmh, dt_h)
        arrivals = start_arrivals(net, location, status, 0, unit.v_avg_kmh, dt_h)
        policy = self.layer_policy(location, state)

        def build(policy: LayerPolicy) -> TimeSpaceNetwork:
            return build_tsn(
                unit.mess_id,
                s,
                state.horizon,
                schedule,
                arrivals,
                self.system.depot_sites,
                self.system.microgrid_sites,
                policy,
            )

        try:
            return build(policy)
        except InfeasibleLayerError as error:
            if not policy.return_to_depot:
                raise
            logger.warning(
                "interval %d: %s; dropping the depot return for this layer",
                state.t,
                error,
            )
            return build(replace(policy, return_to_depot=False))

    def layers(
        self, scenarios: ScenarioSet, state: RollingState, dump: bool = True
    ) -> dict[LayerKey, TimeSpaceNetwork]:
        keys = [
            (unit, s) for s in range(len(scenarios)) for unit in self.system.fleet
        ]
        with ThreadPoolExecutor(max_workers=self.settings.n_threads) as pool:
            built = list(
                pool.map(lambda key: self.layer(key[0], key[1], scenarios, state), keys)
            )
        layers = {(unit.mess_id, s): layer for (unit, s), layer in zip(keys, built)}
        if dump and self.settings.debug_level > 0 and self.out_dir is not None:
            folder = self.out_dir / "layers"
            folder.mkdir(parents=True, exist_ok=True)
            for (mess, s), layer in layers.items():
                layer.dump(folder / f"roll_{state.t:03d}_{mess}_s{s}.txt")
        return layers

    def problem(self, state: RollingState) -> HorizonProblem:
        """Scenarios, layers and the stochastic model for the horizon at ``state.t``"""
        scenarios = self.scenarios(state)
        layers = self.layers(scenarios, state)
        horizon_state = state.horizon_state()
        model = build_model(
            self.system,
            horizon_state,
            scenarios,
            layers,
            self.settings.model_settings(),
        )
        return HorizonProblem(horizon_state, scenarios, layers, model)

    def formulation_size(self, problem: HorizonProblem) -> FormulationSize:
        """Routing-block size of ``problem`` against the virtual-node formulation"""
        net, dt_h = self.system.net, self.system.dt_h
        entries = []
        for (mess, s), layer in sorted(problem.layers.items()):
            unit = self.system.mess(mess)
            status = problem.scenarios.road_status(s)
            schedule = travel_schedule(net, status, layer.horizon, unit.v_avg_kmh, dt_h)
            intervals = schedule.matrices[0].intervals
            assert intervals is not None
            entries.append((layer, intervals))
        return count_layers(entries)

    def audited(self, problem: HorizonProblem, solution: Solution, t: int) -> Solution:
        """``solution``, or an infeasible one when it violates the model"""
        if not solution.status.has_solution:
            return solution
        values = np.asarray(solution.values, dtype=float)
        report = audit_solution(problem.model.model, values, tol=AUDIT_TOL)
        if report.ok:
            return solution
        logger.error("interval %d: solution rejected, %s", t, report)
        return Solution(status=SolveStatus.infeasible, nodes=solution.nodes)

    def solve_options(self, t: int) -> SolveOptions:
        if self.options.mode != SolverMode.export_only:
            return self.options
        folder = self.out_dir or self.solutions_dir
        if folder is None:
            raise SolverError(
                "Export mode needs an output or solutions directory for the models"
            )
        folder.mkdir(parents=True, exist_ok=True)
        return replace(
            self.options,
            export_path=folder / f"roll_{t:03d}.mps",
            solution_path=(
                None
                if self.solutions_dir is None
                else self.solutions_dir / f"roll_{t:03d}.sol"
            ),
        )

    def reopt(
        self,
        state: RollingState,
        problem: HorizonProblem,
        fixed: FirstStage,
    ) -> IntervalDispatch:
        """Realized dispatch of the first interval with routing and topology fixed"""
        options = replace(self.options, mode=SolverMode.bundled)
        settings = self.settings.model_settings()
        match self.settings.reopt_policy:
            case ReoptPolicy.remaining_horizon:
                realized = expected_scenario(problem.scenarios)
                layers = self.layers(realized, state, dump=False)
                horizon_state = problem.state
            case ReoptPolicy.single_interval:
                realized = expected_scenario(problem.scenarios, 1)
                microgrids = self.system.microgrid_sites
                layers = {
                    (mess, 0): pinned_layer(mess, 0, arc, microgrids)
                    for mess, arc in fixed.arcs.items()
                }
                horizon_state = replace(problem.state, horizon=1)
            case _:
                raise ValueError(f"Unknown reopt policy {self.settings.reopt_policy}")
        return deterministic_reopt(
            self.system, horizon_state, realized, layers, fixed, options, settings
        )

    def shed_all(self, state: RollingState) -> IntervalDispatch:
        """Nothing restored; the previous topology minus what can no longer close"""
        ds = self.system.ds
        damaged = self.realization.damaged_branches(state.t)
        live = ds.energizable_buses(damaged)
        closed = frozenset(
            branch.branch_id
            for branch in ds.branches
            if state.topology.closed.get(branch.branch_id, False)
            and branch.branch_id not in damaged
            and branch.from_bus in live
            and branch.to_bus in live
        )
        return IntervalDispatch.all_shed(self.system, state.horizon_state(), closed)

    def move(
        self, unit: MessUnit, location: MessLocation, arc: TsArc | None, t: int
    ) -> MessMove:
        """Turn the implemented first-interval arc into a move on the road network"""
        stay: MessMove = (
            Hold(location.site) if isinstance(location, AtSite) else Continue()
        )
        if arc is None:
            return stay
        if arc.kind == ArcKind.holding:
            return Hold(SiteId(arc.tail.site))
        if arc.head.kind != NodeKind.site:
            return stay
        target = SiteId(arc.head.site)
        if location == AtSite(target):
            return Hold(target)
        try:
            return route_to(self.system.net, location, target, self.road_status, t)
        except ArcLocationMismatchError as error:
            logger.warning("interval %d: MESS %s %s", t, unit.mess_id, error)
            return stay

    def run(self) -> TimelineReport:
        state = self.initial_state()
        rows: dict[str, list[dict[str, object]]] = {
            "timeline": [],
            "loads": [],
            "generation": [],
            "mess_trace": [],
            "topology_log": [],
        }
        logger.info(
            "rolling run of %s: %d intervals, prediction %d, mode %s, seed %d",
            self.case.name,
            state.t_h,
            state.t_p,
            self.settings.mode.value,
            self.seed,
        )
        while state.t < state.t_h:
            state = self.roll(state, rows)
        return TimelineReport.from_rows(**rows)

    def roll(
        self, state: RollingState, rows: dict[str, list[dict[str, object]]]
    ) -> RollingState:
        """Solve, implement and score interval ``state.t``; return the next state"""
        t = state.t
        try:
            problem: HorizonProblem | None = self.problem(state)
        except InfeasibleLayerError as error:
            logger.warning("interval %d: %s", t, error)
            problem = None
        if problem is None:
            solution = Solution(status=SolveStatus.infeasible)
        else:
            size = self.formulation_size(problem)
            logger.debug(
                "interval %d: %d routing binaries, %d with virtual nodes",
                t,
                size.binaries_proposed,
                size.binaries_virtualnode,
            )
            solution = solve(problem.model.model, self.solve_options(t))
            solution = self.audited(problem, solution, t)
        if problem is not None and solution.status.has_solution:
            values = np.asarray(solution.values, dtype=float)
            fixed = first_stage(problem.model, values)
            most_likely = most_likely_scenario(problem.scenarios)
            if self.options.mode == SolverMode.export_only:
                reopt = "skipped"
                dispatch = interval_dispatch(problem.model, values, most_likely)
            else:
                reopt = self.settings.reopt_policy.value
                try:
                    dispatch = self.reopt(state, problem, fixed)
                except (ReoptInfeasibleError, InfeasibleLayerError) as error:
                    logger.warning(
                        "interval %d: re-optimisation failed (%s); implementing the"
                        " most likely scenario's dispatch",
                        t,
                        error,
                    )
                    reopt = "fallback"
                    dispatch = interval_dispatch(problem.model, values, most_likely)
        else:
            logger.warning(
                "interval %d: stochastic model is %s; shedding all load",
                t,
                solution.status.value,
            )
            reopt = "none"
            dispatch = self.shed_all(state)
        n_scenarios = 0 if problem is None else len(problem.scenarios)
        logger.info(
            "interval %d/%d: %s, %d scenarios, reopt %s",
            t + 1,
            state.t_h,
            solution.status.value,
            n_scenarios,
            reopt,
        )
        return self.implement(state, dispatch, solution, reopt, n_scenarios, rows)

    def implement(
        self,
        state: RollingState,
        dispatch: IntervalDispatch,
        solution: Solution,
        reopt: str,
        n_scenarios: int,
        rows: dict[str, list[dict[str, object]]],
    ) -> RollingState:
        t, system = state.t, self.system
        ds, net, dt_h = system.ds, system.net, system.dt_h
        base = ds.base_kva
        realized_load = self.realization.load_kw[:, t]

        interruption = 0.0
        demand_total = restored_total = 0.0
        for b, bus in enumerate(ds.buses):
            demand = float(realized_load[b])
            restored = min(max(dispatch.p_r.get(bus.bus_id, 0.0) * base, 0.0), demand)
            cost = bus.interruption_cost * (demand - restored) * dt_h
            interruption += cost
            demand_total += demand
            restored_total += restored
            rows["loads"].append(
                {
                    "t": t,
                    "bus": bus.bus_id,
                    "kind": "feeder",
                    "critical": bus.critical,
                    "demand_kw": demand,
                    "restored_kw": restored,
                    "cost": cost,
                }
            )

        generation = 0.0
        mess_net_at_site: dict[str, float] = {}
        for (mess, site), power in dispatch.p_dch.items():
            mess_net_at_site[site] = mess_net_at_site.get(site, 0.0) + power
        for (mess, site), power in dispatch.p_ch.items():
            mess_net_at_site[site] = mess_net_at_site.get(site, 0.0) - power
        for mg in ds.microgrids:
            local_demand = mg.local_load(t) * base
            served = min(
                max(dispatch.p_local.get(mg.microgrid_id, 0.0) * base, 0.0),
                local_demand,
            )
            local_cost = mg.local_cost * (local_demand - served) * dt_h
            interruption += local_cost
            p_dg = dispatch.p_dg.get(mg.microgrid_id, 0.0) * base
            cost = mg.gen_cost * p_dg * dt_h
            generation += cost
            rows["loads"].append(
                {
                    "t": t,
                    "bus": mg.bus,
                    "kind": "microgrid",
                    "critical": False,
                    "demand_kw": local_demand,
                    "restored_kw": served,
                    "cost": local_cost,
                }
            )
            rows["generation"].append(
                {
                    "t": t,
                    "microgrid": mg.microgrid_id,
                    "site": mg.site,
                    "p_dg_kw": p_dg,
                    "q_dg_kvar": dispatch.q_dg.get(mg.microgrid_id, 0.0) * base,
                    "local_demand_kw": local_demand,
                    "local_served_kw": served,
                    "mess_net_kw": mess_net_at_site.get(mg.site, 0.0) * base,
                    "energy_kwh": dispatch.mg_energy[mg.microgrid_id] * base,
                    "cost": cost,
                }
            )

        battery = transport = 0.0
        locations: dict[str, MessLocation] = {}
        for unit in system.fleet:
            mess = unit.mess_id
            location = state.locations[mess]
            arc = dispatch.arcs.get(mess)
            move = self.move(unit, location, arc, t)
            moving = isinstance(move, Travel) or (
                isinstance(move, Continue) and isinstance(location, InTransit)
            )
            locations[mess] = advance_mess(
                net, location, move, self.road_status, t, unit.v_avg_kmh, dt_h
            )
            p_ch = sum(v for (m, _), v in dispatch.p_ch.items() if m == mess) * base
            p_dch = sum(v for (m, _), v in dispatch.p_dch.items() if m == mess) * base
            holding_site = (
                arc.tail.site if arc is not None and arc.kind == ArcKind.holding else ""
            )
            battery_cost = unit.c_bat * (p_ch + p_dch) * dt_h
            transport_cost = unit.c_tran * dt_h if moving else 0.0
            battery += battery_cost
            transport += transport_cost
            energy = dispatch.mess_energy[mess]
            rows["mess_trace"].append(
                {
                    "t": t,
                    "mess": mess,
                    "location": str(location),
                    "arc": "" if arc is None else arc.label,
                    "move": str(move),
                    "next_location": str(locations[mess]),
                    "site": holding_site,
                    "p_ch_kw": p_ch,
                    "p_dch_kw": p_dch,
                    "energy_kwh": energy * base,
                    "soc": energy / unit.capacity_pu,
                    "battery_cost": battery_cost,
                    "transport_cost": transport_cost,
                }
            )

        topology = dispatch.topology(system)
        damaged = self.realization.damaged_branches(t)
        radiality = validate_radial(ds, topology, damaged)
        if not radiality.ok:
            logger.warning("interval %d: implemented topology:\n%s", t, radiality)
        for branch, closed in topology.changes_from(state.topology):
            rows["topology_log"].append(
                {"t": t, "branch": branch, "status": "closed" if closed else "open"}
            )
        rows["timeline"].append(
            {
                "t": t,
                "status": solution.status.value,
                "reopt": reopt,
                "n_scenarios": n_scenarios,
                "objective": solution.objective,
                "mip_gap": solution.gap,
                "interruption_cost": interruption,
                "generation_cost": generation,
                "battery_cost": battery,
                "transport_cost": transport,
                "total_cost": math.fsum([interruption, generation, battery, transport]),
                "demand_kw": demand_total,
                "restored_kw": restored_total,
                "closed_branches": len(topology.closed_branches),
                "radial": radiality.ok,
            }
        )

        following = RollingState(
            t=t + 1,
            t_h=state.t_h,
            t_p=state.t_p,
            locations=locations,
            mess_energy={
                u.mess_id: dispatch.mess_energy[u.mess_id] for u in system.fleet
            },
            mg_energy={
                mg.microgrid_id: dispatch.mg_energy[mg.microgrid_id]
                for mg in ds.microgrids
            },
            topology=topology,
        )
        for problem_text in following.violations(system):
            logger.warning("interval %d: %s", t, problem_text)
        return following


def run(
    case: CaseConfig,
    seed: int | None = None,
    mode: FleetMode | None = None,
    options: SolveOptions | None = None,
    solutions_dir: Path | None = None,
    out_dir: Path | None = None,
) -> TimelineReport:
    """Run the rolling-horizon restoration of ``case`` over its whole run"""
    return RollingRun(case, seed, mode, options, solutions_dir, out_dir).run()


def solve_once(
    case: CaseConfig,
    seed: int | None = None,
    mode: FleetMode | None = None,
    options: SolveOptions | None = None,
) -> tuple[HorizonProblem, Solution]:
    """Solve the stochastic model of the first prediction horizon only"""
    rolling = RollingRun(case, seed, mode, options)
    problem = rolling.problem(rolling.initial_state())
    return problem, solve(problem.model.model, rolling.options)


def first_horizon_scenarios(
    case: CaseConfig,
    seed: int | None = None,
    n: int | None = None,
    k: int | None = None,
) -> ScenarioSet:
    """Generated and reduced scenarios of the first horizon

    :param n: scenarios generated, the case setting by default
    :param k: scenarios kept, the case setting by default
    """
    settings = replace(
        case.scenario_settings,
        n_generated=case.scenario_settings.n_generated if n is None else n,
        n_reduced=case.scenario_settings.n_reduced if k is None else k,
    )
    rolling = RollingRun(replace(case, scenario_settings=settings), seed)
    return rolling.scenarios(rolling.initial_state())
