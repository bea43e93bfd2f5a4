"""Brute-force reference calculations that share no evaluation code with the main path.

The dense model starts from the Dirac-oscillator Hamiltonian written with
Cartesian ladder operators,

    H = [[ mc^2,                 i sqrt2 c sigma.a^dagger ],
         [ -i sqrt2 c sigma.a,   -mc^2                    ]],

on upper kets with N <= N_max and lower kets with N <= N_max - 1 (the
truncation is exact because sigma.a only lowers).  Spherical kets |N l m_l>
are found by diagonalising L^2 inside each Cartesian shell and fixing phases
by Condon-Shortley ladders plus a positive z^l coefficient on the z axis;
spin is coupled with sympy's Clebsch-Gordan coefficients.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial import hermite as npherm
from sympy import S
from sympy.physics.quantum.cg import CG

from .model import BasisKet, Units

MAX_ORACLE_N = 12

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def cartesian_states(N_max: int) -> list[tuple[int, int, int]]:
    """(nx, ny, nz) with nx+ny+nz <= N_max, ordered shell by shell."""
    out = []
    for N in range(N_max + 1):
        for nx in range(N, -1, -1):
            for ny in range(N - nx, -1, -1):
                out.append((nx, ny, N - nx - ny))
    return out


def _lowering(states_hi, states_lo) -> list[np.ndarray]:
    index = {s: i for i, s in enumerate(states_lo)}
    mats = []
    for k in range(3):
        a = np.zeros((len(states_lo), len(states_hi)))
        for col, s in enumerate(states_hi):
            if s[k] == 0:
                continue
            t = list(s)
            t[k] -= 1
            row = index.get(tuple(t))
            if row is not None:
                a[row, col] = math.sqrt(s[k])
        mats.append(a)
    return mats


def _phi0(n: int) -> float:
    """Normalised 1D oscillator function at the origin."""
    c = np.zeros(n + 1)
    c[n] = 1.0
    return float(npherm.hermval(0.0, c)) / math.sqrt(2.0**n * math.factorial(n) * math.sqrt(math.pi))


def _z_axis_coefficient(vec, shell, power: int) -> complex:
    """Coefficient of z^power in psi(0, 0, z) * exp(z^2/2)."""
    total = 0j
    for amp, (nx, ny, nz) in zip(vec, shell):
        if amp == 0 or nx % 2 or ny % 2:
            continue
        c = np.zeros(nz + 1)
        c[nz] = 1.0
        poly = npherm.herm2poly(c) / math.sqrt(2.0**nz * math.factorial(nz) * math.sqrt(math.pi))
        if power < len(poly):
            total += amp * _phi0(nx) * _phi0(ny) * poly[power]
    return total


@lru_cache(maxsize=None)
def _shell_spherical(N: int) -> dict:
    """{(l, m): vector in the Cartesian shell basis} for every ket of shell N."""
    shell = [s for s in cartesian_states(N) if sum(s) == N]
    a = _lowering(shell, [s for s in cartesian_states(N) if sum(s) == N - 1]) if N else None
    dim = len(shell)
    if N == 0:
        return {(0, 0): np.ones(1, dtype=complex)}
    # number-conserving a_i^dagger a_j on the shell: a_i^T a_j
    ad_a = [[a[i].T @ a[j] for j in range(3)] for i in range(3)]
    Lx = -1j * (ad_a[1][2] - ad_a[2][1])
    Ly = -1j * (ad_a[2][0] - ad_a[0][2])
    Lz = -1j * (ad_a[0][1] - ad_a[1][0])
    L2 = Lx @ Lx + Ly @ Ly + Lz @ Lz
    eps = 1.0 / (2 * N + 3)
    w, v = np.linalg.eigh(L2 + eps * Lz)
    Lp, Lm = Lx + 1j * Ly, Lx - 1j * Ly
    out = {}
    for l in range(N % 2, N + 1, 2):
        pick = np.flatnonzero(np.abs(w - l * (l + 1)) < 0.5 * eps)
        if len(pick) != 1:
            raise RuntimeError(f"could not isolate |{N} {l} 0> (found {len(pick)} candidates)")
        vec = v[:, pick[0]]
        coeff = _z_axis_coefficient(vec, shell, l)
        vec = vec * (abs(coeff) / coeff)
        out[(l, 0)] = vec
        up = down = vec
        for m in range(0, l):
            step = math.sqrt(l * (l + 1) - m * (m + 1))
            up = Lp @ up / step
            down = Lm @ down / step
            out[(l, m + 1)] = up
            out[(l, -m - 1)] = down
    assert len(out) == dim
    return out


@lru_cache(maxsize=None)
def _cg(l: int, ml: int, ms2: int, j2: int, mj2: int) -> float:
    return float(CG(S(l), S(ml), S(1) / 2, S(ms2) / 2, S(j2) / 2, S(mj2) / 2).doit())


def coupled_kets(N_max: int, component: str) -> list[BasisKet]:
    kets = []
    for N in range(N_max + 1):
        for l in range(N % 2, N + 1, 2):
            for j2 in (2 * l + 1, 2 * l - 1):
                if j2 < 1:
                    continue
                for mj2 in range(-j2, j2 + 1, 2):
                    kets.append(BasisKet(N, l, j2, mj2, component))
    return kets


@lru_cache(maxsize=8)
def _coupled_transform(N_max: int, component: str) -> np.ndarray:
    """Columns: coupled kets expanded over Cartesian (state, spin) pairs (read-only, cached)."""
    states = cartesian_states(N_max)
    pos = {s: i for i, s in enumerate(states)}
    kets = coupled_kets(N_max, component)
    U = np.zeros((2 * len(states), len(kets)), dtype=complex)
    for col, ket in enumerate(kets):
        shell = [s for s in states if sum(s) == ket.N]
        sph = _shell_spherical(ket.N)
        for spin_index, ms2 in enumerate((1, -1)):
            ml2 = ket.mj2 - ms2
            if abs(ml2) > 2 * ket.l:
                continue
            c = _cg(ket.l, ml2 // 2, ms2, ket.j2, ket.mj2)
            vec = sph[(ket.l, ml2 // 2)]
            for amp, s in zip(vec, shell):
                U[2 * pos[s] + spin_index, col] += c * amp
    U.flags.writeable = False
    return U


@dataclass(frozen=True, eq=False)
class DenseModel:
    N_max: int
    units: Units
    basis: list            # BasisKet, upper kets then lower kets
    H: np.ndarray          # coupled, standard-phase basis
    H_cartesian: np.ndarray
    U: np.ndarray          # Cartesian <- coupled, block diagonal
    n_upper_cartesian: int
    _eig: dict = field(default_factory=dict, repr=False)

    def index(self) -> dict:
        return {k: i for i, k in enumerate(self.basis)}

    def eigh(self):
        if "w" not in self._eig:
            w, v = np.linalg.eigh(self.H)
            self._eig["w"], self._eig["v"] = w, v
        return self._eig["w"], self._eig["v"]

    def eigenvalues(self) -> np.ndarray:
        if "w" in self._eig:
            return self._eig["w"]
        return np.linalg.eigvalsh(self.H)


def dense_hamiltonian(N_max: int, units: Units) -> DenseModel:
    if not 1 <= N_max <= MAX_ORACLE_N:
        raise ValueError(f"oracle scale requires 1 <= N_max <= {MAX_ORACLE_N}, got {N_max}")
    hi, lo = cartesian_states(N_max), cartesian_states(N_max - 1)
    a = _lowering(hi, lo)
    sigma_a = sum(np.kron(a[k], PAULI[k]) for k in range(3))
    mc2, c = units.mc2, units.c
    du, dl = 2 * len(hi), 2 * len(lo)
    Hc = np.zeros((du + dl, du + dl), dtype=complex)
    Hc[:du, :du] = mc2 * np.eye(du)
    Hc[du:, du:] = -mc2 * np.eye(dl)
    Hc[du:, :du] = -1j * math.sqrt(2.0) * c * sigma_a
    Hc[:du, du:] = Hc[du:, :du].conj().T

    Uu, Ul = _coupled_transform(N_max, "large"), _coupled_transform(N_max - 1, "small")
    U = np.zeros((du + dl, Uu.shape[1] + Ul.shape[1]), dtype=complex)
    U[:du, :Uu.shape[1]] = Uu
    U[du:, Uu.shape[1]:] = Ul
    H = U.conj().T @ Hc @ U
    basis = coupled_kets(N_max, "large") + coupled_kets(N_max - 1, "small")
    return DenseModel(N_max, units, basis, H, Hc, U, du)


def dense_evolve(model: DenseModel, state0: np.ndarray, t) -> np.ndarray:
    """exp(-i H t) state0 by eigendecomposition; t scalar or 1D array (rows = times)."""
    w, v = model.eigh()
    c0 = v.conj().T @ np.asarray(state0, dtype=complex)
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    out = (np.exp(-1j * np.outer(t_arr, w)) * c0[None, :]) @ v.T
    return out[0] if np.ndim(t) == 0 else out


def positive_energy_population(model: DenseModel, state: np.ndarray) -> float:
    w, v = model.eigh()
    c = v.conj().T @ state
    return float(np.sum(np.abs(c[w > 0]) ** 2))


def cartesian_packet(model: DenseModel, z0: float, p0: float, spinor) -> np.ndarray:
    """Coherent packet |0>_x |0>_y |alpha>_z (x) spinor in the coupled basis, truncated at N_max."""
    states = cartesian_states(model.N_max)
    alpha = complex(z0, p0) / math.sqrt(2.0)
    psi = np.zeros(model.U.shape[0], dtype=complex)
    for i, (nx, ny, nz) in enumerate(states):
        if nx == 0 and ny == 0:
            amp = math.exp(-0.5 * abs(alpha) ** 2) * alpha**nz / math.sqrt(math.factorial(nz))
            psi[2 * i] = amp * spinor[0]
            psi[2 * i + 1] = amp * spinor[1]
    return model.U.conj().T @ psi


def dense_spin(model: DenseModel, state: np.ndarray) -> np.ndarray:
    """<Sigma> (x, y, z) evaluated in the Cartesian basis, normalised by the state norm."""
    psi = model.U @ state
    n = psi.size // 2
    pairs = psi.reshape(n, 2)
    norm = float(np.vdot(psi, psi).real)
    return np.array([np.einsum("ia,ab,ib->", pairs.conj(), P, pairs).real / norm for P in PAULI])


def reconstruct_pointwise(N: int, n_rho: int = 20, n_theta: int = 20, rho_max: float = 6.0) -> float:
    """Max |sum_l c_{Nl} R Y - phi_0(x) phi_0(y) phi_N(z)| over a (rho, theta) sample grid."""
    from .basis import radial_wavefunction, spherical_harmonic
    from .expansion import bracket_cnl

    rho = np.linspace(0.0, rho_max, n_rho)[:, None]
    theta = np.linspace(0.0, math.pi, n_theta)[None, :]
    x = rho * np.sin(theta)  # azimuth 0: y = 0
    z = rho * np.cos(theta)
    c = np.zeros(N + 1)
    c[N] = 1.0
    hn = npherm.hermval(z, c) / math.sqrt(2.0**N * math.factorial(N) * math.sqrt(math.pi))
    exact = math.pi**-0.5 * np.exp(-0.5 * x * x) * hn * np.exp(-0.5 * z * z)
    approx = np.zeros_like(exact)
    for l in range(N % 2, N + 1, 2):
        approx = approx + bracket_cnl(N, l) * radial_wavefunction((N - l) // 2, l, rho) * \
            spherical_harmonic(l, 0, theta, 0.0).real
    return float(np.max(np.abs(approx - exact)))
