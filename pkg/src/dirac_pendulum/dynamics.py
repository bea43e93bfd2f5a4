"""Closed-form evolution of the Dirac oscillator, one two-level sector at a time.

The Hamiltonian couples the upper bispinor pair only through
c sigma.(p - i r) = -i sqrt(2) c sigma.a, which lowers the oscillator shell by
one and flips l -> 2j - l.  Each large ket |N l j m> therefore pairs with a
single small ket |N-1, 2j-l, j, m> and, in the sector basis
{large, small-partner}, the Hamiltonian is the real 2x2 matrix

    [[ mc^2,  g c sqrt(2) mu ],
     [ g c sqrt(2) mu, -mc^2 ]],      mu = sqrt(A/2),  g = +-1 (gauge),

with eigenvalues +-E.  The sector basis vector for the small partner is
-i * g * ladder_sign * |N-1, 2j-l, j, m> in standard phases; see
:func:`physical_amplitudes`.  Stretched kets (A = 0) have no partner.

The Foldy-Wouthuysen frame is the exact per-sector rotation onto the
energy eigenvectors: a_plus sits on the large ket, a_minus on the small one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Literal, Mapping

import numpy as np

from .angular import coupling_mu, ladder_sign, partner_ket
from .errors import FrameError
from .expansion import ExpansionTable, PacketSpec, expand_packet
from .model import BasisKet, Units, a_quantum, energy

Frame = Literal["dirac", "fw"]


@dataclass(frozen=True)
class Sector:
    ket_large: BasisKet
    ket_small: BasisKet | None
    A: int
    E: float
    mu: float
    theta_fw: float
    gauge: int = 1

    @classmethod
    def from_ket(cls, ket: BasisKet, units: Units, gauge: int = 1) -> "Sector":
        if gauge not in (1, -1):
            raise ValueError(f"gauge must be +1 or -1, got {gauge}")
        A = a_quantum(ket.N, ket.l, ket.j2)
        return cls(
            ket_large=ket,
            ket_small=partner_ket(ket),
            A=A,
            E=energy(ket.N, ket.l, ket.j2, units, +1),
            mu=coupling_mu(ket.N, ket.l, ket.j2),
            # tan(2 theta) = sqrt(r A)
            theta_fw=0.5 * math.atan(math.sqrt(units.r * A)),
            gauge=gauge,
        )


@dataclass(frozen=True, eq=False)
class SectorLayout:
    """Ordered, immutable collection of sectors shared by every state built on it."""

    units: Units
    sectors: tuple

    def __len__(self):
        return len(self.sectors)

    @cached_property
    def E(self) -> np.ndarray:
        return np.array([s.E for s in self.sectors])

    @cached_property
    def A(self) -> np.ndarray:
        return np.array([s.A for s in self.sectors])

    @cached_property
    def gauge(self) -> np.ndarray:
        return np.array([s.gauge for s in self.sectors], dtype=float)

    @cached_property
    def cos2(self) -> np.ndarray:
        """mc^2 / E = cos(2 theta_fw)."""
        return 1.0 / np.sqrt(1.0 + self.units.r * self.A)

    @cached_property
    def sin2(self) -> np.ndarray:
        """c sqrt(2) mu / E = sin(2 theta_fw)."""
        x = self.units.r * self.A
        return np.sqrt(x / (1.0 + x))

    @cached_property
    def cos_fw(self) -> np.ndarray:
        return np.cos([s.theta_fw for s in self.sectors])

    @cached_property
    def sin_fw(self) -> np.ndarray:
        return np.sin([s.theta_fw for s in self.sectors])

    @cached_property
    def small_phase(self) -> np.ndarray:
        """Factor turning a sector-basis small amplitude into a standard-phase amplitude."""
        out = np.zeros(len(self), dtype=complex)
        for i, s in enumerate(self.sectors):
            if s.ket_small is not None:
                out[i] = -1j * s.gauge * ladder_sign(s.ket_large.l, s.ket_large.j2)
        return out

    @cached_property
    def mj2(self) -> np.ndarray:
        return np.array([s.ket_large.mj2 for s in self.sectors])

    def with_gauge(self, flips: Mapping[int, int] | None = None) -> "SectorLayout":
        """Copy with the coupling sign convention of selected sectors changed."""
        flips = flips or {}
        sectors = tuple(replace(s, gauge=flips.get(i, s.gauge)) for i, s in enumerate(self.sectors))
        return SectorLayout(self.units, sectors)


@dataclass(frozen=True, eq=False)
class StateVector:
    layout: SectorLayout
    large: np.ndarray
    small: np.ndarray
    time: float = 0.0
    frame: Frame = "dirac"

    def norm2(self) -> float:
        return float(np.sum(np.abs(self.large) ** 2) + np.sum(np.abs(self.small) ** 2))

    def entries(self):
        """Per-sector (first, second) amplitude pairs."""
        return list(zip(self.large, self.small))

    def relabel(self, layout: SectorLayout) -> "StateVector":
        """Same sector-basis amplitudes interpreted under another layout (e.g. other gauge)."""
        if len(layout) != len(self.layout):
            raise ValueError("layouts differ in size")
        return replace(self, layout=layout)


def build_sectors(table: ExpansionTable, units: Units,
                  gauge: Mapping[BasisKet, int] | None = None) -> StateVector:
    """t=0 Dirac-frame state: one sector per populated large ket, small parts empty."""
    gauge = gauge or {}
    kets = sorted(table.amplitudes)
    layout = SectorLayout(units, tuple(Sector.from_ket(k, units, gauge.get(k, 1)) for k in kets))
    large = np.array([table.amplitudes[k] for k in kets], dtype=complex)
    return StateVector(layout, large, np.zeros_like(large), 0.0, "dirac")


def _require(state: StateVector, frame: Frame) -> None:
    if state.frame != frame:
        raise FrameError(f"expected a state in the {frame!r} frame, got {state.frame!r}")


def dirac_amplitudes(state0: StateVector, times) -> tuple[np.ndarray, np.ndarray]:
    """Dirac-frame amplitudes after elapsed times, arrays shaped (len(times), n_sectors)."""
    _require(state0, "dirac")
    lay = state0.layout
    t = np.atleast_1d(np.asarray(times, dtype=float))[:, None]
    phase = lay.E[None, :] * t
    c, s = np.cos(phase), np.sin(phase)
    off = -1j * lay.gauge * lay.sin2 * s
    a, b = state0.large[None, :], state0.small[None, :]
    large = (c - 1j * lay.cos2 * s) * a + off * b
    small = off * a + (c + 1j * lay.cos2 * s) * b
    return large, small


def evolve_dirac(state0: StateVector, t: float) -> StateVector:
    """Propagate a Dirac-frame state by elapsed time t."""
    large, small = dirac_amplitudes(state0, [t])
    return StateVector(state0.layout, large[0], small[0], state0.time + t, "dirac")


def _rotate(layout: SectorLayout, first, second, inverse: bool):
    c, s = layout.cos_fw, layout.gauge * layout.sin_fw
    if inverse:
        s = -s
    return c * first + s * second, -s * first + c * second


def to_fw_frame(state: StateVector) -> StateVector:
    """(a_large, a_small) -> (a_plus, a_minus) on the energy eigenvectors."""
    _require(state, "dirac")
    plus, minus = _rotate(state.layout, state.large, state.small, inverse=False)
    return StateVector(state.layout, plus, minus, state.time, "fw")


def from_fw_frame(state: StateVector) -> StateVector:
    _require(state, "fw")
    large, small = _rotate(state.layout, state.large, state.small, inverse=True)
    return StateVector(state.layout, large, small, state.time, "dirac")


def fw_amplitudes(state0: StateVector, times) -> tuple[np.ndarray, np.ndarray]:
    """F-W frame amplitudes after elapsed times, arrays shaped (len(times), n_sectors)."""
    _require(state0, "fw")
    t = np.atleast_1d(np.asarray(times, dtype=float))[:, None]
    phase = np.exp(-1j * state0.layout.E[None, :] * t)
    return state0.large[None, :] * phase, state0.small[None, :] * np.conj(phase)


def evolve_fw(state0: StateVector, t: float) -> StateVector:
    plus, minus = fw_amplitudes(state0, [t])
    return StateVector(state0.layout, plus[0], minus[0], state0.time + t, "fw")


def evolve(state0: StateVector, t: float) -> StateVector:
    """Propagate in whichever frame the state is carried."""
    return evolve_dirac(state0, t) if state0.frame == "dirac" else evolve_fw(state0, t)


def convert(state: StateVector, frame: Frame) -> StateVector:
    if state.frame == frame:
        return state
    return to_fw_frame(state) if frame == "fw" else from_fw_frame(state)


def prepare_state(spec: PacketSpec, table: ExpansionTable | None = None,
                  gauge: Mapping[BasisKet, int] | None = None) -> StateVector:
    """Initial state for either preparation.

    ``dirac``: the Gaussian sits literally in the upper components.
    ``fw``: the same amplitudes placed on positive-energy eigenvectors only;
    the returned state is carried in the F-W frame.
    """
    if table is None:
        table = expand_packet(spec)
    state = build_sectors(table, spec.units, gauge)
    if spec.preparation == "fw":
        return StateVector(state.layout, state.large, np.zeros_like(state.large), 0.0, "fw")
    return state


def energy_projection(state: StateVector, sign) -> StateVector:
    """Keep only the positive (sign=+1) or negative (sign=-1) energy part."""
    s = sign if sign in (1, -1) else {"+": 1, "-": -1}.get(sign)
    if s is None:
        raise ValueError(f"sign must be +1/-1 or '+'/'-', got {sign!r}")
    fw = convert(state, "fw")
    zero = np.zeros_like(fw.large)
    kept = replace(fw, large=fw.large if s == 1 else zero, small=fw.small if s == -1 else zero)
    return convert(kept, state.frame)


def energy_populations(state: StateVector) -> tuple[float, float]:
    fw = convert(state, "fw")
    return float(np.sum(np.abs(fw.large) ** 2)), float(np.sum(np.abs(fw.small) ** 2))


def physical_amplitudes(state: StateVector) -> tuple[list, np.ndarray]:
    """Kets and standard-phase amplitudes of the bispinor in the state's own frame.

    Returns ``(kets, amps)`` where kets lists every large ket and then every
    small partner (None for stretched sectors, whose amplitude is exactly 0).
    """
    lay = state.layout
    kets = [s.ket_large for s in lay.sectors] + [s.ket_small for s in lay.sectors]
    return kets, np.concatenate([state.large, lay.small_phase * state.small])


def physical_batch(layout: SectorLayout, first: np.ndarray, second: np.ndarray) -> np.ndarray:
    """Vectorised :func:`physical_amplitudes` for (T, n_sectors) amplitude arrays."""
    return np.concatenate([first, layout.small_phase[None, :] * second], axis=-1)


def frame_amplitudes(state0: StateVector, times, frame: Frame) -> tuple[np.ndarray, np.ndarray]:
    """Amplitudes after elapsed times, expressed in ``frame``; arrays (len(times), n_sectors)."""
    if state0.frame == "dirac":
        first, second = dirac_amplitudes(state0, times)
    else:
        first, second = fw_amplitudes(state0, times)
    if state0.frame == frame:
        return first, second
    return _rotate(state0.layout, first, second, inverse=(frame == "dirac"))
