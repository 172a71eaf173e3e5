"""Shared builders for compact in-code simulation configs."""

from flexlab.control import ControlSettings
from flexlab.engine import SimConfig
from flexlab.plant import HeatPumpKind, HeatPumpParams, PiParams, PlantParams, VavParams
from flexlab.zones import WeatherSample, WeatherSeries, ZoneParams


def make_config(n_zones=1, cooling=24.0, heating=19.0, start=0, end=1440,
                t_out=32.0, solar=0.0, initial=24.5, dt_s=60.0,
                capacitance=2e7, day_length_min=1440) -> SimConfig:
    """One-or-more identical zones under constant weather."""
    zones = tuple(
        ZoneParams(f"z{i + 1}", capacitance, 800.0, 2000.0, 1100.0, 0.0)
        for i in range(n_zones))
    vavs = tuple(
        VavParams(f"z{i + 1}", 0.1, 1.1, 13.0, 35.0) for i in range(n_zones))
    plant = PlantParams(
        pi=PiParams(2.5, 0.0015),
        vavs=vavs,
        heat_pumps=(
            HeatPumpParams("gshp1", HeatPumpKind.GROUND, 25000.0, 6.0, 0.1),
            HeatPumpParams("gshp2", HeatPumpKind.GROUND, 25000.0, 6.0, 0.1),
            HeatPumpParams("ashp", HeatPumpKind.AIR, 40000.0, 6.0, 0.1),
        ),
        aux_power_w=2000.0,
    )
    return SimConfig(
        zones=zones,
        plant=plant,
        baseline=ControlSettings(cooling, heating, start, end),
        weather=WeatherSeries([WeatherSample(0.0, t_out, solar)]),
        initial_temp_c=initial,
        dt_s=dt_s,
        day_length_min=day_length_min,
    )
