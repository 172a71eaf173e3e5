"""Exception types shared across the simulator."""

from __future__ import annotations


class FlexlabError(Exception):
    """Base class for all simulator errors."""


class InvalidInputError(FlexlabError):
    """A numeric input was non-finite or otherwise unusable."""


class ValidationError(FlexlabError):
    """One or more invariants were violated.

    ``violations`` holds one human-readable entry per violated invariant,
    each prefixed with a field path (e.g. ``zones[0].ua_w_per_k: must be > 0``).
    """

    def __init__(self, violations: list[str] | str):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = violations
        super().__init__("; ".join(violations))


class ModelDivergenceError(FlexlabError):
    """A zone temperature left the guard-rail band (numerical blow-up)."""

    def __init__(self, zone_id: str, temp_c: float, tick: int | None = None,
                 t_min: float | None = None):
        self.zone_id = zone_id
        self.temp_c = temp_c
        self.tick = tick
        self.t_min = t_min
        where = f"zone {zone_id}"
        if tick is not None:
            where += f" at tick {tick} (t_min={t_min})"
        super().__init__(f"model divergence: {where} reached {temp_c:.2f} degC")

    def with_context(self, tick: int, t_min: float) -> "ModelDivergenceError":
        return ModelDivergenceError(self.zone_id, self.temp_c, tick, t_min)
