"""Exception hierarchy. ValidationError and its children map to CLI exit code 1,
anything else escaping a command maps to exit code 2."""


class SegshapeError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(SegshapeError):
    """Bad user input: malformed bundles, out-of-range parameters, mismatched files."""


class BundleError(ValidationError):
    """A city bundle failed to parse or violated an invariant."""


class ParameterError(ValidationError):
    """An operation was called with an out-of-range parameter (e.g. K > n)."""


class FiltrationError(SegshapeError):
    """A complex is not a valid filtration (face missing or appearing after a coface)."""


class UndefinedIndexError(ValidationError):
    """A segregation index is undefined (zero citywide population for a group)."""


class MissingArtifactError(SegshapeError):
    """A required intermediate artifact (PI, diagram, raster) is absent."""
