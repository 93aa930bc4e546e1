"""Exception types raised across the package."""


class PufError(Exception):
    """Base class for every error this package raises on purpose."""


class ConfigurationError(PufError, ValueError):
    pass


class AddressOutOfRangeError(PufError, IndexError):
    pass


class FuzzyCellError(PufError):
    """A reference bit was requested for a cell marked fuzzy ("X")."""


class UnmaskableError(PufError):
    """Every cell of the map is fuzzy, so no address can be masked."""


class ContractError(PufError, ValueError):
    pass


class AlreadyEnrolledError(PufError):
    pass


class FormatError(PufError, ValueError):
    """Malformed binary or text file; ``offset`` is the byte position (or line)."""

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class UnsupportedVersionError(FormatError):
    pass
