"""HVAC plant: per-zone VAV boxes on PI loops, three-heat-pump dispatch.

The airside is one PI controller + VAV box per zone. The PI output (0..1 by
default) scales airflow between the box's min and max; the box delivers

    q = airflow * cp * (T_supply(mode) - T_zone)

so cooling injections are negative. Coil demand is the sum of |q| across
zones and is served by greedy staging: ground-source units fill first in id
order (base load), then the air-source unit (peak), any excess is reported
as unmet load. Unit electrical power is thermal / COP where COP is linear in
the source temperature with a floor:

    cooling: COP = max(cop_min, cop_a - cop_b * T_source)
    heating: COP = max(cop_min, cop_a + cop_b * T_source)

Ground-source units see the fixed ground temperature; the air-source unit
sees outdoor air, which is what makes it the expensive peak machine on a hot
afternoon. A constant auxiliary draw (fans/pumps) applies whenever the
system is on.

Everything here is a pure function over value types.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import InvalidInputError


class Mode(str, Enum):
    COOLING = "cooling"
    HEATING = "heating"
    OFF = "off"


class HeatPumpKind(str, Enum):
    AIR = "air"
    GROUND = "ground"


# ---------------------------------------------------------------------------
# PI controller
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PiParams:
    kp: float                 # 1/K
    ki: float                 # 1/(K*s)
    out_min: float = 0.0
    out_max: float = 1.0

    def validate(self, path: str = "pi") -> list[str]:
        bad = []
        if not (self.kp >= 0):
            bad.append(f"{path}.kp: must be >= 0")
        if not (self.ki >= 0):
            bad.append(f"{path}.ki: must be >= 0")
        if not (self.out_min < self.out_max):
            bad.append(f"{path}.out_min: must be < out_max")
        return bad


@dataclass(frozen=True)
class PiState:
    integral: float = 0.0     # K*s


def pi_update(params: PiParams, state: PiState, error_k: float,
              dt_s: float) -> tuple[PiState, float]:
    """One PI step with back-calculation anti-windup.

    The candidate output is kp*e + ki*(I + e*dt). If it exceeds a clamp
    bound the output is pinned to the bound and the integral is
    back-calculated so that kp*e + ki*I equals the bound exactly; the
    integral therefore never winds up while the output is saturated.
    """
    if dt_s <= 0:
        raise InvalidInputError(f"dt_s must be > 0, got {dt_s}")
    if not math.isfinite(error_k):
        raise InvalidInputError(f"non-finite PI error: {error_k}")
    candidate_integral = state.integral + error_k * dt_s
    u = params.kp * error_k + params.ki * candidate_integral
    if u > params.out_max:
        u = params.out_max
    elif u < params.out_min:
        u = params.out_min
    else:
        return PiState(candidate_integral), u
    # Saturated: make the clamp exact. With ki == 0 the integral is inert.
    if params.ki > 0:
        integral = (u - params.kp * error_k) / params.ki
    else:
        integral = state.integral
    return PiState(integral), u


# ---------------------------------------------------------------------------
# VAV box
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VavParams:
    zone_id: str
    airflow_min_kg_s: float
    airflow_max_kg_s: float
    supply_cool_c: float
    supply_heat_c: float
    cp_j_per_kg_k: float = 1006.0

    def validate(self, path: str = "vav") -> list[str]:
        bad = []
        if not (0 <= self.airflow_min_kg_s < self.airflow_max_kg_s):
            bad.append(f"{path}: requires 0 <= airflow_min_kg_s < airflow_max_kg_s")
        if not (self.supply_cool_c < self.supply_heat_c):
            bad.append(f"{path}: supply_cool_c must be < supply_heat_c")
        if not (self.cp_j_per_kg_k > 0):
            bad.append(f"{path}.cp_j_per_kg_k: must be > 0")
        return bad


def vav_demand(params: VavParams, output: float, zone_temp_c: float,
               mode: Mode) -> tuple[float, float]:
    """Airflow (kg/s) and signed thermal injection q (W) for one box."""
    if mode is Mode.OFF:
        return 0.0, 0.0
    airflow = params.airflow_min_kg_s + output * (
        params.airflow_max_kg_s - params.airflow_min_kg_s)
    supply = params.supply_cool_c if mode is Mode.COOLING else params.supply_heat_c
    q_w = airflow * params.cp_j_per_kg_k * (supply - zone_temp_c)
    return airflow, q_w


# ---------------------------------------------------------------------------
# Heat pumps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HeatPumpParams:
    id: str
    kind: HeatPumpKind
    capacity_w: float
    cop_a: float               # COP intercept
    cop_b: float               # COP slope per K of source temperature
    cop_min: float = 1.5
    ground_temp_c: float = 18.0   # source temperature for ground-source units

    def validate(self, path: str = "heat_pump") -> list[str]:
        bad = []
        if not (self.capacity_w > 0):
            bad.append(f"{path}.capacity_w: must be > 0")
        if not (self.cop_min >= 1):
            bad.append(f"{path}.cop_min: must be >= 1")
        return bad


def cop(unit: HeatPumpParams, source_temp_c: float, mode: Mode = Mode.COOLING) -> float:
    """COP at the given source temperature; linear with a floor."""
    if not math.isfinite(source_temp_c):
        raise InvalidInputError(f"non-finite source temperature: {source_temp_c}")
    if mode is Mode.HEATING:
        value = unit.cop_a + unit.cop_b * source_temp_c
    else:
        value = unit.cop_a - unit.cop_b * source_temp_c
    return max(unit.cop_min, value)


@dataclass(frozen=True)
class UnitLoad:
    id: str
    thermal_w: float
    electrical_w: float


@dataclass(frozen=True)
class DispatchResult:
    units: tuple[UnitLoad, ...]   # same order as the input unit list
    unmet_w: float

    @property
    def electrical_w(self) -> float:
        return sum(u.electrical_w for u in self.units)


def dispatch(units: list[HeatPumpParams], demand_w: float, outdoor_c: float,
             mode: Mode = Mode.COOLING) -> DispatchResult:
    """Greedy staging: ground-source units by id, then air-source units by id.

    Demand beyond total capacity is returned as unmet load (a reported
    quantity, not an error). Per unit, electrical = thermal / COP.
    """
    if demand_w < 0:
        raise InvalidInputError(f"demand_w must be >= 0, got {demand_w}")
    ground = sorted((u for u in units if u.kind is HeatPumpKind.GROUND), key=lambda u: u.id)
    air = sorted((u for u in units if u.kind is HeatPumpKind.AIR), key=lambda u: u.id)
    remaining = demand_w
    thermal: dict[str, float] = {}
    for unit in [*ground, *air]:
        served = min(unit.capacity_w, remaining)
        thermal[unit.id] = served
        remaining -= served
    loads = []
    for unit in units:
        q = thermal[unit.id]
        source = unit.ground_temp_c if unit.kind is HeatPumpKind.GROUND else outdoor_c
        loads.append(UnitLoad(unit.id, q, q / cop(unit, source, mode)))
    return DispatchResult(tuple(loads), remaining)


# ---------------------------------------------------------------------------
# Composed plant step
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PlantParams:
    pi: PiParams
    vavs: tuple[VavParams, ...]            # one per zone, zone order
    heat_pumps: tuple[HeatPumpParams, ...]
    aux_power_w: float = 2000.0            # fans/pumps while the system is on

    def validate(self, path: str = "plant") -> list[str]:
        bad = self.pi.validate(f"{path}.pi")
        for i, v in enumerate(self.vavs):
            bad += v.validate(f"{path}.vav[{i}]")
        for i, hp in enumerate(self.heat_pumps):
            bad += hp.validate(f"{path}.heat_pumps[{i}]")
        if not self.heat_pumps:
            bad.append(f"{path}.heat_pumps: at least one unit required")
        if not (self.aux_power_w >= 0):
            bad.append(f"{path}.aux_power_w: must be >= 0")
        return bad


@dataclass(frozen=True)
class PlantState:
    pi_states: tuple[PiState, ...]         # one per zone, zone order
    mode: Mode = Mode.OFF
    unit_loads: tuple[UnitLoad, ...] = ()
    unmet_w: float = 0.0
    electrical_w: float = 0.0

    @classmethod
    def initial(cls, n_zones: int) -> "PlantState":
        return cls(pi_states=tuple(PiState() for _ in range(n_zones)))


def plant_step(params: PlantParams, state: PlantState, errors_k: list[float],
               zone_temps_c: list[float], mode: Mode, outdoor_c: float,
               dt_s: float) -> tuple[PlantState, list[float], float]:
    """One plant tick: PI -> VAV -> dispatch.

    Returns (new plant state, per-zone thermal injections in W, total
    electrical power in W). With mode off the PI states are frozen and
    everything is zero.
    """
    n = len(params.vavs)
    if not (len(errors_k) == len(zone_temps_c) == n):
        raise InvalidInputError(
            f"zone mismatch: {n} VAVs, {len(errors_k)} errors, {len(zone_temps_c)} temps")
    if mode is Mode.OFF:
        new_state = PlantState(pi_states=state.pi_states, mode=Mode.OFF)
        return new_state, [0.0] * n, 0.0
    # Entering a mode (off -> on, or a heating/cooling flip) reinitializes the
    # loop integrals: demand is one-sided, so a stale integral from the old
    # regime would hold airflow up with no error left to unwind it.
    pi_states_in = state.pi_states if mode is state.mode \
        else tuple(PiState() for _ in range(n))
    pi_states = []
    q_zones = []
    demand_w = 0.0
    for vav, pi_state, error, temp in zip(params.vavs, pi_states_in,
                                          errors_k, zone_temps_c):
        new_pi, output = pi_update(params.pi, pi_state, error, dt_s)
        pi_states.append(new_pi)
        _, q_w = vav_demand(vav, output, temp, mode)
        q_zones.append(q_w)
        demand_w += abs(q_w)
    result = dispatch(list(params.heat_pumps), demand_w, outdoor_c, mode)
    electrical_w = result.electrical_w + params.aux_power_w
    new_state = PlantState(
        pi_states=tuple(pi_states),
        mode=mode,
        unit_loads=result.units,
        unmet_w=result.unmet_w,
        electrical_w=electrical_w,
    )
    return new_state, q_zones, electrical_w
