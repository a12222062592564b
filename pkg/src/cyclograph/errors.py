"""Shared exception types."""


class CapExceeded(Exception):
    """A configurable resource cap (oracle size, sign bits, cycle count) was hit."""


class MappingFormatError(ValueError):
    """A mapping spec file or field-element literal could not be parsed."""
