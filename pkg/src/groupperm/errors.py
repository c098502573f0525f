"""Exception types shared across the package."""


class GroupPermError(Exception):
    """Base class for all errors raised by this package."""


class InputError(GroupPermError):
    """Invalid data, configuration, or a request the data cannot support.

    The CLI maps this to exit code 2.
    """


class GuardError(GroupPermError):
    """A computational guard (enumeration size, attempt cap) was exceeded.

    The CLI maps this to exit code 3.
    """
