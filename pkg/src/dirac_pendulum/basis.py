"""Real-space harmonic-oscillator eigenfunctions (lengths in oscillator widths).

Laguerre and Hermite factors come from upward three-term recurrences at fixed
argument; normalisation constants go through log-Gamma so that shells up to
N ~ 60 stay finite in double precision.  The ``*_poly`` variants omit the
Gaussian factor and are what the quadrature routines integrate against their
own weights.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.special import sph_harm_y


def _laguerre(n: int, alpha: float, x: np.ndarray) -> np.ndarray:
    prev = np.ones_like(x)
    if n == 0:
        return prev
    cur = 1.0 + alpha - x
    for k in range(2, n + 1):
        prev, cur = cur, ((2 * k - 1 + alpha - x) * cur - (k - 1 + alpha) * prev) / k
    return cur


def radial_poly(n_r: int, l: int, rho) -> np.ndarray:
    """R_{n_r l}(rho) * exp(rho^2/2)."""
    rho = np.asarray(rho, dtype=float)
    log_norm = 0.5 * (math.log(2.0) + math.lgamma(n_r + 1) - math.lgamma(n_r + l + 1.5))
    return math.exp(log_norm) * rho**l * _laguerre(n_r, l + 0.5, rho * rho)


def radial_wavefunction(n_r: int, l: int, rho) -> np.ndarray:
    """Normalised radial function with int R^2 rho^2 drho = 1, positive as rho -> 0+."""
    if n_r < 0 or l < 0:
        raise ValueError(f"need n_r >= 0 and l >= 0, got n_r={n_r}, l={l}")
    rho = np.asarray(rho, dtype=float)
    return radial_poly(n_r, l, rho) * np.exp(-0.5 * rho * rho)


def spherical_harmonic(l: int, m: int, theta, phi) -> np.ndarray:
    """Orthonormal Y_l^m(theta, phi) with the Condon-Shortley phase (theta polar)."""
    if abs(m) > l:
        raise ValueError(f"|m| must not exceed l, got l={l}, m={m}")
    return sph_harm_y(l, m, theta, phi)


def hermite_poly(n: int, z) -> np.ndarray:
    """psi_n(z) * exp(z^2/2) for the normalised 1D oscillator eigenfunction."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    z = np.asarray(z, dtype=float)
    prev = np.full_like(z, math.pi**-0.25)
    if n == 0:
        return prev
    cur = math.sqrt(2.0) * z * prev
    for k in range(2, n + 1):
        prev, cur = cur, math.sqrt(2.0 / k) * z * cur - math.sqrt((k - 1) / k) * prev
    return cur


def cartesian_z_mode(n: int, z) -> np.ndarray:
    """Normalised 1D oscillator eigenfunction ~ H_n(z) exp(-z^2/2)."""
    z = np.asarray(z, dtype=float)
    return hermite_poly(n, z) * np.exp(-0.5 * z * z)
