"""Exception hierarchy for the beamlink package."""


class BeamlinkError(Exception):
    """Base class for all beamlink errors."""


class ConfigurationError(BeamlinkError):
    """A scenario, geometry, or pattern parameter is invalid or unknown."""


class GeometryError(BeamlinkError):
    """A scene is geometrically degenerate (e.g. a zero-length path)."""


class NormalizationError(BeamlinkError):
    """Channel normalization misuse, such as normalizing twice."""


class IllConditionedChannelError(BeamlinkError):
    """Channel matrix condition number exceeds the inversion threshold."""


class CombinatorialExplosionError(BeamlinkError):
    """The beam-combination space is too large to enumerate."""


class NoValidCombinationError(BeamlinkError):
    """Every beam combination was rejected; nothing can be selected."""


class EmitError(BeamlinkError):
    """Result serialization or output I/O failed."""
