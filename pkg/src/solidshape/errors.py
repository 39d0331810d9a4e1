"""Exception types separating bad inputs from mid-pipeline failures."""


class SolidShapeError(Exception):
    """Base class for all library errors."""


class InputError(SolidShapeError):
    """Unusable file, manifest, or configuration (CLI exit code 1)."""


class PipelineError(SolidShapeError):
    """Shape content that cannot be processed (CLI exit code 2)."""
