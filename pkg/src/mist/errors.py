"""Exception hierarchy shared across the package."""


class MistError(Exception):
    """Base class for all package errors."""


class RasterError(MistError):
    """Base class for raster loading/validation problems."""


class UnsupportedFormatError(RasterError):
    """File is not one of the supported raster formats."""


class CorruptFileError(RasterError):
    """File claims a supported format but its contents are broken."""


class ZeroDimensionError(RasterError):
    """Image declares a zero width or height."""


class DimensionMismatchError(MistError):
    """Two grids that must share dimensions do not."""


class MarkerExceedsMaskError(MistError):
    """Geodesic reconstruction requires marker <= mask pointwise."""


class FewerPixelsThanComponentsError(MistError):
    """Mixture fitting needs at least K pixels."""


class EmptyForegroundError(MistError):
    """Session has no foreground-side pixels to model."""


class NotIteratedError(MistError):
    """Mask extraction requested before any solver run."""


class EmptyMaskError(MistError):
    """Metric undefined on an empty mask."""
