"""Exception types shared across the package."""


class ShapeError(ValueError):
    """An input array has the wrong shape or length."""


class ConfigError(ValueError):
    """Parameters violate a structural requirement (e.g. divisibility)."""


class SizeError(ValueError):
    """A requested computation exceeds an enforced size cap."""


class FormatError(ValueError):
    """A serialized file is malformed (bad magic, truncation, garbage tail)."""
