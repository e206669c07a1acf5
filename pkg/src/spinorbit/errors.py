"""Exception hierarchy shared across the package."""

from __future__ import annotations


class SpinOrbitError(Exception):
    """Base class for all physics and bench-description errors."""


class TruncationError(SpinOrbitError, ValueError):
    """An operation would move amplitude outside the retained OAM range."""


class EncodingError(SpinOrbitError, ValueError):
    """A state is not one of the four encoded logical basis kets."""


class GateBrokenError(EncodingError):
    """A gate mapped an encoded basis state outside the encoded subspace."""


class CompileError(SpinOrbitError, ValueError):
    """A parsed bench description fails semantic validation."""


class BenchParseError(SpinOrbitError, ValueError):
    """A bench description has syntax errors; carries the full error list."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("\n".join(str(e) for e in self.errors))
