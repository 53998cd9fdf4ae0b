"""Exception types shared across the package.

Exit-code mapping used by the CLI: input problems -> 2, resource guards -> 3,
internal invariant violations -> 4.
"""


class JoinFdError(Exception):
    """Base class for all errors raised by this package."""


class InputError(JoinFdError):
    """Malformed user input: bad CSV, unknown attribute, invalid spec."""


class CsvFormatError(InputError):
    """CSV file violates the expected shape (ragged rows, empty file, ...)."""


class SchemaError(InputError):
    """Attribute lookup failed or attribute sets are inconsistent."""


class JoinSpecError(InputError):
    """Join specification is invalid for the given instances."""


class GuardError(JoinFdError):
    """A configured resource limit (e.g. join row guard) was exceeded."""


class InternalInvariantError(JoinFdError):
    """An internal consistency check failed; indicates a bug."""
