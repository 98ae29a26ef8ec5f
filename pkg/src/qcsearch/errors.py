"""Exception types shared across the package."""


class LayoutError(ValueError):
    """Register layout problem: duplicate/unknown names, overlapping ranges."""


class CircuitError(ValueError):
    """Gate or circuit problem: bad indices, width mismatches."""


class PlanningError(ValueError):
    """Grover planning problem, e.g. zero marked states."""
