"""Exception hierarchy shared by the library and the command line front end."""


class MartpolyError(Exception):
    """Base class for all errors raised by this package."""


class InputError(MartpolyError):
    """Malformed user input: documents, flags, dimensions, parameters."""


class LimitExceededError(MartpolyError):
    """A configured enumeration guard was hit before the work started."""


class NotViableError(MartpolyError):
    """An operation required an arbitrage-free market and did not get one."""


class PerturbationError(MartpolyError):
    """Terminal-value perturbation exhausted its retry budget."""


class InternalContractError(MartpolyError):
    """A mathematically unreachable branch was taken; indicates a bug."""
