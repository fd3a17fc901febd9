"""Exception types shared across the toolkit."""


class DimensionError(ValueError):
    """Array size does not describe a valid square planar array."""


class ConfigError(ValueError):
    """System configuration is inconsistent or has a degenerate value."""


class InfeasibleBudgetError(ValueError):
    """Static overhead meets or exceeds the total power budget."""
