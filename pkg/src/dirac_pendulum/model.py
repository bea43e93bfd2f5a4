"""Units, quantum-number bookkeeping and the Dirac-oscillator spectrum.

Natural units hbar = m = omega = 1 are used throughout, so lengths are in
oscillator widths, times in 1/omega and energies in hbar*omega.  The single
physical knob is the relativity parameter ``r = hbar*omega / (m c^2)``:

    rest energy   m c^2 = 1 / r
    light speed   c     = r ** -0.5

Half-integer angular momenta are stored doubled (``j2 = 2j``, ``mj2 = 2 m_j``)
so that every quantum number is an exact integer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

from .errors import QuantumNumberError

Component = Literal["large", "small"]


@dataclass(frozen=True)
class Units:
    r: float

    def __post_init__(self):
        if not (self.r > 0 and math.isfinite(self.r)):
            raise ValueError(f"relativity parameter must be positive and finite, got {self.r!r}")

    @property
    def mc2(self) -> float:
        return 1.0 / self.r

    @property
    def c(self) -> float:
        return self.r ** -0.5


@dataclass(frozen=True, order=True)
class BasisKet:
    """|N (l 1/2) j m_j> on the large (upper) or small (lower) bispinor pair."""

    N: int
    l: int
    j2: int
    mj2: int
    component: Component = "large"

    def __post_init__(self):
        validate_qn(self.N, self.l, self.j2, self.mj2)
        if self.component not in ("large", "small"):
            raise QuantumNumberError(f"component must be 'large' or 'small', got {self.component!r}")

    @property
    def n_r(self) -> int:
        return (self.N - self.l) // 2

    @property
    def aligned(self) -> bool:
        return self.j2 == 2 * self.l + 1

    @property
    def stretched(self) -> bool:
        return self.N == self.l and self.aligned


def validate_qn(N: int, l: int, j2: int, mj2: int | None = None) -> None:
    """Raise :class:`QuantumNumberError` unless the numbers label a valid ket."""
    for name, value in (("N", N), ("l", l), ("j2", j2)) + ((("mj2", mj2),) if mj2 is not None else ()):
        if isinstance(value, bool) or not isinstance(value, int):
            raise QuantumNumberError(f"{name} must be an integer, got {value!r}")
    if N < 0:
        raise QuantumNumberError(f"N must be >= 0, got N={N}")
    if l < 0:
        raise QuantumNumberError(f"l must be >= 0, got l={l}")
    if l > N:
        raise QuantumNumberError(f"l={l} exceeds N={N}")
    if (N - l) % 2:
        raise QuantumNumberError(f"N-l must be even, got N={N}, l={l}")
    if j2 != 2 * l + 1 and not (l >= 1 and j2 == 2 * l - 1):
        raise QuantumNumberError(f"j2={j2} is not 2l+1 or 2l-1 for l={l}")
    if mj2 is not None:
        if mj2 % 2 == 0:
            raise QuantumNumberError(f"mj2 must be odd, got {mj2}")
        if abs(mj2) > j2:
            raise QuantumNumberError(f"|mj2|={abs(mj2)} exceeds j2={j2}")


def a_quantum(N: int, l: int, j2: int) -> int:
    """Integer spectral quantum A_{Nlj}.

    2(N-j)+1 on the aligned branch j = l+1/2 and 2(N+j)+3 on the
    anti-aligned branch j = l-1/2; in doubled units these are
    2N - j2 + 1 and 2N + j2 + 3.
    """
    validate_qn(N, l, j2)
    if j2 == 2 * l + 1:
        return 2 * N - j2 + 1
    return 2 * N + j2 + 3


def energy(N: int, l: int, j2: int, units: Units, sign: int | str = +1) -> float:
    """Eigenenergy +-(1/r) sqrt(1 + r A) in units of hbar*omega."""
    s = _sign(sign)
    A = a_quantum(N, l, j2)
    return s * units.mc2 * math.sqrt(1.0 + units.r * A)


def _sign(sign) -> int:
    if sign in (+1, "+", "plus", "positive"):
        return +1
    if sign in (-1, "-", "minus", "negative"):
        return -1
    raise ValueError(f"sign must be +1/-1 or '+'/'-', got {sign!r}")
