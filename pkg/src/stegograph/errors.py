"""Exception hierarchy.

Every error raised on purpose by the toolkit derives from :class:`StegoError`.
Classes that correspond to a documented CLI failure carry an ``exit_code``.
"""


class StegoError(Exception):
    exit_code = 1


class ConfigurationError(StegoError, ValueError):
    exit_code = 2


class ShapeError(StegoError, ValueError):
    exit_code = 2


class InputFormatError(StegoError):
    """An image file is not a lossless 8-bit RGB raster we can use."""

    exit_code = 2


class CapacityError(StegoError):
    """The payload does not fit into the available slots."""

    exit_code = 3

    def __init__(self, message, required_bits=None, available_bits=None):
        super().__init__(message)
        self.required_bits = required_bits
        self.available_bits = available_bits


class RangeError(StegoError, IndexError):
    pass


class NotStegoError(StegoError):
    """The bytes (or image) do not start with a stego segment."""

    exit_code = 5


class NoStegoFoundError(NotStegoError):
    """None of the images handed to the decoder carried a segment."""


class TruncationError(StegoError):
    def __init__(self, message, needed=None, available=None):
        super().__init__(message)
        self.needed = needed
        self.available = available


class CorruptionError(StegoError):
    """Conflicting or damaged data: bad manifest, checksum or chunk clash."""


class ManifestCorruptionError(CorruptionError):
    pass


class IncompletePayloadError(StegoError):
    exit_code = 4

    def __init__(self, message, payload_id=None, missing=(), expected_covers=None, seen_covers=()):
        super().__init__(message)
        self.payload_id = payload_id
        self.missing = tuple(missing)
        self.expected_covers = expected_covers
        self.seen_covers = tuple(seen_covers)


class ConsistencyError(StegoError, ValueError):
    """Arguments that must agree with each other do not."""


class SkippedImageWarning(UserWarning):
    """The decoder ignored an image that carries no stego segment."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index
