"""Exception types shared across the toolkit."""


class HeartSpotError(Exception):
    """Base class for all toolkit errors."""


class DecodeError(HeartSpotError):
    """An input image file could not be decoded."""


class ShapeError(HeartSpotError):
    """Mismatched dimensions or vector lengths."""


class FormatError(HeartSpotError):
    """A packet does not follow the container format."""


class CorruptionError(FormatError):
    """A packet is structurally valid but its payload is damaged."""


class IntegrityError(HeartSpotError):
    """A referenced side input does not match its recorded digest."""
