"""Root of the sqlgate exception hierarchy.

Every module-level error inherits from SqlgateError so callers (and the
CLI exit-code mapping) can catch the whole family at once.
"""


class SqlgateError(Exception):
    """Base class for all errors raised by sqlgate modules."""
