"""Exception hierarchy shared by the library and the command line."""


class DiracPendulumError(Exception):
    """Base class for all package errors."""


class QuantumNumberError(DiracPendulumError, ValueError):
    """Quantum numbers violate the oscillator / coupling selection rules."""


class FrameError(DiracPendulumError, ValueError):
    """An operation received a state in the wrong representation."""


class NumericalAccuracyError(DiracPendulumError, ArithmeticError):
    """A numerical procedure could not reach its accuracy target."""


class ConfigError(DiracPendulumError, ValueError):
    """Invalid run configuration."""
