"""Exception types shared across the toolkit."""


class InvalidInputError(ValueError):
    """Arguments violate an operation's preconditions (shape, range, plan)."""


class DegenerateDataError(ValueError):
    """Data admits no meaningful answer (e.g. zero median pairwise distance)."""


class DataFormatError(ValueError):
    """An input file could not be parsed into a sample matrix."""
