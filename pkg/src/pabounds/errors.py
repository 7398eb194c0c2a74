"""Exception types shared across the package."""


class AlphabetMismatchError(ValueError):
    """Two tables do not live on the same alphabet shape."""


class ReferenceSupportError(ValueError):
    """A reference distribution lacks support where mass is present."""


class SizeCapError(ValueError):
    """A requested materialization or enumeration exceeds its size cap."""
