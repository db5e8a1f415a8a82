"""Exception types shared across the engine."""

from __future__ import annotations


class ShelterAccessError(Exception):
    """Base class for all engine errors."""


class InputError(ShelterAccessError):
    """Rejected input: bad geometry, malformed row, negative quantity, unknown id."""


class UnimputableError(InputError):
    """Speed imputation impossible: no known speed anywhere in the network."""


class UnsnappableError(ShelterAccessError):
    """No network node within the snap radius of a point."""

    def __init__(self, point_id: str, nearest_m: float, max_radius_m: float):
        self.point_id = point_id
        self.nearest_m = nearest_m
        self.max_radius_m = max_radius_m
        super().__init__(
            f"point {point_id!r}: nearest node is {nearest_m:.0f} m away "
            f"(snap radius {max_radius_m:.0f} m)"
        )


class DegenerateDistributionError(ShelterAccessError):
    """Equity metrics undefined: every score is zero or no population present."""


class ClassificationError(ShelterAccessError):
    """Score classification impossible: no positive reference maximum."""


class InfeasiblePlacementError(ShelterAccessError):
    """Candidate catalog cannot cover the demand."""

    def __init__(self, shortfall: float, zone: str | None = None):
        self.shortfall = shortfall
        self.zone = zone
        where = f" for zone {zone!r}" if zone else ""
        super().__init__(f"placement infeasible{where}: short by {shortfall:.0f} capacity")


class ConfigError(ShelterAccessError):
    """Scenario configuration invalid or inconsistent."""
