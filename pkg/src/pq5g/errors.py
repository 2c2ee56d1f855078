"""Exception hierarchy shared by all subpackages."""

from __future__ import annotations


class Pq5gError(Exception):
    pass


class ParameterError(Pq5gError, ValueError):
    """Input has the wrong length, range or type for the requested level."""


class EncapsulationError(ParameterError):
    """Encapsulation key failed the length or modulus check."""


class ModeError(Pq5gError, ValueError):
    pass


class ConfigurationError(Pq5gError, ValueError):
    pass


class StateError(Pq5gError, RuntimeError):
    """Operation invoked in the wrong protocol phase."""


class RecordError(Pq5gError):
    """AEAD record failed authentication or hit the sequence limit."""


class FramingError(Pq5gError, ValueError):
    pass


class KatFormatError(Pq5gError, ValueError):
    pass


class RegistrationReject(Pq5gError):
    def __init__(self, cause: str, supi: str = ""):
        super().__init__(f"registration_reject({cause})" + (f" for {supi}" if supi else ""))
        self.cause = cause
        self.supi = supi


class SessionReject(Pq5gError):
    def __init__(self, cause: str, supi: str = ""):
        super().__init__(f"session_reject({cause})" + (f" for {supi}" if supi else ""))
        self.cause = cause
        self.supi = supi


class ResourceError(Pq5gError):
    """An allocator (IP pool, TEID space) ran out."""
