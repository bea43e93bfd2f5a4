"""Initial state: a displaced Gaussian spinor packet in the coupled oscillator basis.

The packet is a 3D oscillator coherent state displaced along z (position z0,
momentum p0) with its spin along (theta_sigma, phi_sigma).  In Cartesian
modes it is |0>_x |0>_y sum_N A_N |N>_z; each |N>_z is then re-expressed in
spherical kets |N l 0> (brackets c_{Nl}, l = N, N-2, ...) and the spin is
coupled to j = l +- 1/2.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Literal

import numpy as np
from scipy.special import roots_genlaguerre, roots_legendre
from scipy.stats import poisson

from .angular import cg_half
from .basis import hermite_poly, radial_poly, spherical_harmonic
from .errors import NumericalAccuracyError
from .model import BasisKet, Units

Preparation = Literal["dirac", "fw"]

DEFAULT_Z0 = 0.0
DEFAULT_P0 = 3.0
DEFAULT_EPS_TRUNC = 1e-10
BRACKET_TOL = 1e-10


@dataclass(frozen=True)
class PacketSpec:
    r: float = 0.01
    z0: float = DEFAULT_Z0
    p0: float = DEFAULT_P0
    theta_sigma: float = 0.0
    phi_sigma: float = 0.0
    eps_trunc: float = DEFAULT_EPS_TRUNC
    preparation: Preparation = "dirac"

    def __post_init__(self):
        Units(self.r)
        if not 0.0 < self.eps_trunc < 1.0:
            raise ValueError(f"eps_trunc must lie in (0, 1), got {self.eps_trunc}")
        if self.preparation not in ("dirac", "fw"):
            raise ValueError(f"preparation must be 'dirac' or 'fw', got {self.preparation!r}")

    @property
    def units(self) -> Units:
        return Units(self.r)

    @property
    def alpha_tilde(self) -> complex:
        return complex(self.z0, self.p0) / math.sqrt(2.0)

    @property
    def nu(self) -> float:
        return abs(self.alpha_tilde) ** 2

    @property
    def spinor(self) -> tuple[complex, complex]:
        half = 0.5 * self.theta_sigma
        return complex(math.cos(half)), cmath.exp(1j * self.phi_sigma) * math.sin(half)

    @property
    def spin_direction(self) -> np.ndarray:
        st = math.sin(self.theta_sigma)
        return np.array([st * math.cos(self.phi_sigma), st * math.sin(self.phi_sigma),
                         math.cos(self.theta_sigma)])


@dataclass(frozen=True)
class ExpansionTable:
    nu: float
    N_max: int
    lam: dict = field(repr=False)          # (N, l) -> complex
    amplitudes: dict = field(repr=False)   # BasisKet (large) -> complex

    def norm2(self) -> float:
        return float(sum(abs(a) ** 2 for a in self.amplitudes.values()))


def coherent_amplitudes(z0: float, p0: float, N_max: int) -> np.ndarray:
    """A_N = exp(-nu/2) alpha^N / sqrt(N!) with alpha = (z0 + i p0)/sqrt(2)."""
    if N_max < 0:
        raise ValueError(f"N_max must be >= 0, got {N_max}")
    alpha = complex(z0, p0) / math.sqrt(2.0)
    out = np.empty(N_max + 1, dtype=complex)
    out[0] = math.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, N_max + 1):
        out[n] = out[n - 1] * alpha / math.sqrt(n)
    return out


def choose_truncation(nu: float, eps_trunc: float) -> int:
    """Smallest N_max whose Poisson(nu) tail P(N > N_max) falls below eps_trunc."""
    if nu < 0:
        raise ValueError(f"nu must be >= 0, got {nu}")
    if nu == 0:
        return 0
    n = max(0, int(nu))
    while poisson.sf(n, nu) >= eps_trunc:
        n += 1
    # sf is monotone, walk back in case the starting guess overshot
    while n > 0 and poisson.sf(n - 1, nu) < eps_trunc:
        n -= 1
    return n


def _bracket_quadrature(N: int, l: int, n_s: int, n_u: int) -> float:
    s, ws = roots_genlaguerre(n_s, 0.5)
    u, wu = roots_legendre(n_u)
    rho = np.sqrt(s)[:, None]
    theta = np.arccos(u)[None, :]
    ylm = spherical_harmonic(l, 0, theta, 0.0).real
    # phi_0(x) phi_0(y) phi_N(z) without its Gaussian factor
    cart = hermite_poly(N, rho * u[None, :]) / math.sqrt(math.pi)
    integrand = radial_poly((N - l) // 2, l, rho) * ylm * cart
    # 2 pi from phi, 1/2 from rho -> s
    return float(math.pi * (ws @ integrand @ wu))


@lru_cache(maxsize=None)
def bracket_cnl(N: int, l: int) -> float:
    """<N l 0 | n_x=0, n_y=0, n_z=N> by Gauss-Laguerre x Gauss-Legendre quadrature."""
    if l < 0 or l > N or (N - l) % 2:
        return 0.0
    base = _bracket_quadrature(N, l, N + 2, N + l + 2)
    check = _bracket_quadrature(N, l, N + 6, N + l + 6)
    if abs(base - check) > BRACKET_TOL:
        raise NumericalAccuracyError(
            f"bracket c_{{{N},{l}}} did not converge: {base!r} vs {check!r}")
    return check


def expand_packet(spec: PacketSpec, N_max: int | None = None) -> ExpansionTable:
    """Expansion amplitudes of the packet on large-component kets.

    ``N_max`` overrides the truncation chosen from ``spec.eps_trunc``.
    """
    nu = spec.nu
    if N_max is None:
        N_max = choose_truncation(nu, spec.eps_trunc)
    A = coherent_amplitudes(spec.z0, spec.p0, N_max)
    up, down = spec.spinor

    lam = {}
    amps = {}
    for N in range(N_max + 1):
        for l in range(N % 2, N + 1, 2):
            value = A[N] * bracket_cnl(N, l)
            lam[(N, l)] = value
            for j2 in (2 * l + 1, 2 * l - 1):
                if j2 < 1:
                    continue
                for mj2, spin_amp, ms2 in ((1, up, 1), (-1, down, -1)):
                    amp = value * spin_amp * cg_half(l, 0, ms2, j2, mj2)
                    if amp != 0:
                        amps[BasisKet(N, l, j2, mj2, "large")] = amp
    return ExpansionTable(nu=nu, N_max=N_max, lam=lam, amplitudes=amps)


def gaussian_packet(spec: PacketSpec, x, y, z) -> np.ndarray:
    """Closed-form t=0 packet, shape (4, ...) over bispinor components.

    Normalised 3D oscillator coherent state of width 1 with the spin spinor in
    the upper components.  The basis expansion equals this times the global
    phase exp(-i z0 p0 / 2).
    """
    x, y, z = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, z)))
    d2 = x * x + y * y + (z - spec.z0) ** 2
    g = math.pi**-0.75 * np.exp(-0.5 * d2 + 1j * spec.p0 * z)
    up, down = spec.spinor
    zero = np.zeros_like(g)
    return np.stack([up * g, down * g, zero, zero])
