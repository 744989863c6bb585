class InputError(ValueError):
    """Malformed or invalid input; the CLI maps it to exit code 2."""


class DimensionError(InputError):
    pass


class DomainError(InputError):
    pass


class UnsupportedPairError(InputError):
    pass


class DegenerateClassError(InputError):
    pass


class ResourceError(RuntimeError):
    """Enumeration cap exceeded; the CLI maps it to exit code 3."""
