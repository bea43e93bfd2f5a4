"""Measured quantities: spin and angular momentum, purity, fidelity, spectra, densities.

Expectation values are normalised by the state norm, so truncation loss does
not bias them.  Sigma acts as the Pauli vector on both the large and the small
bispinor pair.  For a state carried in the F-W frame, the same operator gives
the mean-spin observable; the Dirac-frame spin of such a state is obtained by
converting it back first (or via :func:`dirac_spin_from_fw`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import sparse
from scipy.integrate import simpson

from .angular import cg_half, pauli_matrix_element
from .basis import radial_wavefunction, spherical_harmonic
from .dynamics import (SectorLayout, StateVector, convert, energy_projection,
                       frame_amplitudes, physical_amplitudes, physical_batch, prepare_state)
from .expansion import ExpansionTable, PacketSpec

SQRT2 = math.sqrt(2.0)
COLUMNS = ("sigma_n", "sigma_x", "sigma_y", "sigma_z", "Lz", "Jz",
           "purity", "fidelity", "pos_fraction", "norm")


@dataclass(frozen=True, eq=False)
class SpinOperators:
    x: sparse.csr_matrix
    y: sparse.csr_matrix
    z: sparse.csr_matrix
    jz: np.ndarray   # diagonal of J_z


@lru_cache(maxsize=16)
def spin_operators(layout: SectorLayout) -> SpinOperators:
    """Sigma_{x,y,z} and J_z over the physical ket list of ``layout``."""
    kets = [s.ket_large for s in layout.sectors] + [s.ket_small for s in layout.sectors]
    groups: dict = {}
    for i, k in enumerate(kets):
        if k is not None:
            groups.setdefault((k.component, k.N, k.l), []).append(i)
    rows, cols, vx, vy, vz = [], [], [], [], []
    for (_, _, l), members in groups.items():
        for a in members:
            ka = kets[a]
            for b in members:
                kb = kets[b]
                e = {q: pauli_matrix_element(l, ka.j2, ka.mj2, q, kb.j2, kb.mj2) for q in (-1, 0, 1)}
                if not any(e.values()):
                    continue
                rows.append(a)
                cols.append(b)
                vx.append((e[-1] - e[1]) / SQRT2)
                vy.append(1j * (e[-1] + e[1]) / SQRT2)
                vz.append(e[0])
    n = len(kets)

    def mat(v):
        return sparse.csr_matrix((np.asarray(v, dtype=complex), (rows, cols)), shape=(n, n))

    jz = np.array([0.5 * k.mj2 if k is not None else 0.0 for k in kets])
    return SpinOperators(mat(vx), mat(vy), mat(vz), jz)


def _expect(op, psi: np.ndarray, norm: np.ndarray) -> np.ndarray:
    """<psi|op|psi>/norm for psi of shape (T, n)."""
    return np.real(np.sum(psi.conj() * (op @ psi.T).T, axis=1)) / norm


def _spin_batch(layout, psi) -> tuple[np.ndarray, np.ndarray]:
    ops = spin_operators(layout)
    norm = np.sum(np.abs(psi) ** 2, axis=1)
    s = np.stack([_expect(ops.x, psi, norm), _expect(ops.y, psi, norm), _expect(ops.z, psi, norm)], axis=1)
    jz = (np.abs(psi) ** 2 @ ops.jz) / norm
    return s, jz


def spin_vector(state: StateVector) -> np.ndarray:
    """Bloch vector (<Sigma_x>, <Sigma_y>, <Sigma_z>) in the state's own frame."""
    _, psi = physical_amplitudes(state)
    s, _ = _spin_batch(state.layout, psi[None, :])
    return s[0]


def spin_expectation(state: StateVector, n) -> float:
    n = np.asarray(n, dtype=float)
    if abs(np.linalg.norm(n) - 1.0) > 1e-12:
        raise ValueError("direction must be a unit vector")
    return float(spin_vector(state) @ n)


def dirac_spin_from_fw(state_fw: StateVector) -> np.ndarray:
    """Dirac-frame <Sigma> from an F-W state by rotating the operators, not the state."""
    lay = state_fw.layout
    ops = spin_operators(lay)
    S = len(lay)
    # physical <- Dirac sector basis
    P = sparse.diags(np.concatenate([np.ones(S), lay.small_phase])).tocsr()
    c, s = lay.cos_fw, lay.gauge * lay.sin_fw
    # F-W <- Dirac rotation
    R = sparse.bmat([[sparse.diags(c), sparse.diags(s)], [sparse.diags(-s), sparse.diags(c)]]).tocsr()
    v = np.concatenate([state_fw.large, state_fw.small])
    norm = float(np.vdot(v, v).real)
    out = []
    for op in (ops.x, ops.y, ops.z):
        rotated = R @ (P.conj().T @ op @ P) @ R.T
        out.append(float(np.vdot(v, rotated @ v).real) / norm)
    return np.array(out)


def angular_momentum_expectation(state: StateVector) -> tuple[float, float]:
    """(<L_z>, <J_z>) with L_z = J_z - Sigma_z / 2."""
    _, psi = physical_amplitudes(state)
    s, jz = _spin_batch(state.layout, psi[None, :])
    return float(jz[0] - 0.5 * s[0, 2]), float(jz[0])


def spin_purity(state: StateVector) -> float:
    s = spin_vector(state)
    return 0.5 * (1.0 + float(s @ s))


def fidelity(state_t: StateVector, state_0: StateVector) -> float:
    """|<Psi(0)|Psi(t)>|^2, normalised; both states must share a layout."""
    if state_t.layout is not state_0.layout:
        raise ValueError("states live on different sector layouts")
    a, b = convert(state_t, "dirac"), convert(state_0, "dirac")
    overlap = np.vdot(b.large, a.large) + np.vdot(b.small, a.small)
    return float(abs(overlap) ** 2 / (a.norm2() * b.norm2()))


# -- time series --------------------------------------------------------------

@dataclass
class TimeSeries:
    times: np.ndarray
    columns: dict
    meta: dict = field(default_factory=dict)

    def __getitem__(self, name):
        return self.columns[name]

    def to_csv(self, path, header_lines=()) -> None:
        names = ["t"] + list(self.columns)
        data = np.column_stack([self.times] + [self.columns[c] for c in self.columns])
        with open(path, "w") as fh:
            for line in header_lines:
                fh.write(f"# {line}\n")
            fh.write(",".join(names) + "\n")
            for row in data:
                fh.write(",".join(f"{v:.15e}" for v in row) + "\n")


def time_grid(t_max: float, dt: float) -> np.ndarray:
    if dt <= 0 or t_max < 0:
        raise ValueError("need dt > 0 and t_max >= 0")
    n = int(math.floor(t_max / dt + 1e-9))
    return dt * np.arange(n + 1)


def state_series(state0: StateVector, times, n=None, frame="dirac", chunk: int = 2048) -> TimeSeries:
    """All observable columns for a prepared state on an explicit time grid."""
    times = np.asarray(times, dtype=float)
    lay = state0.layout
    if n is None:
        n = np.array([0.0, 0.0, 1.0])
    n = np.asarray(n, dtype=float)
    ref = convert(state0, "dirac")
    cols = {c: np.empty(times.size) for c in COLUMNS}
    for start in range(0, times.size, chunk):
        t = times[start:start + chunk]
        sl = slice(start, start + t.size)
        first, second = frame_amplitudes(state0, t, frame)
        psi = physical_batch(lay, first, second)
        norm = np.sum(np.abs(psi) ** 2, axis=1)
        s, jz = _spin_batch(lay, psi)
        cols["sigma_x"][sl], cols["sigma_y"][sl], cols["sigma_z"][sl] = s.T
        cols["sigma_n"][sl] = s @ n
        cols["Jz"][sl] = jz
        cols["Lz"][sl] = jz - 0.5 * s[:, 2]
        cols["purity"][sl] = 0.5 * (1.0 + np.sum(s * s, axis=1))
        dl, ds = frame_amplitudes(state0, t, "dirac")
        overlap = dl @ ref.large.conj() + ds @ ref.small.conj()
        cols["fidelity"][sl] = np.abs(overlap) ** 2 / (norm * ref.norm2())
        plus, _ = frame_amplitudes(state0, t, "fw")
        cols["pos_fraction"][sl] = np.sum(np.abs(plus) ** 2, axis=1) / norm
        cols["norm"][sl] = norm
    return TimeSeries(times, cols, {"frame": frame, "direction": list(map(float, n))})


def time_series(spec: PacketSpec, t_max: float, dt: float, n=None, frame="dirac",
                table: ExpansionTable | None = None, times=None) -> TimeSeries:
    """Observable columns for ``spec`` on a uniform grid (or explicit ``times``).

    ``n`` defaults to the initial spin direction.
    """
    state0 = prepare_state(spec, table)
    if times is None:
        times = time_grid(t_max, dt)
    if n is None:
        n = spec.spin_direction
    ts = state_series(state0, times, n, frame)
    ts.meta.update(r=spec.r, preparation=spec.preparation, n_sectors=len(state0.layout))
    return ts


# -- spectra ------------------------------------------------------------------

@dataclass
class Spectrum:
    omega: np.ndarray       # angular frequency, units of omega
    magnitude: np.ndarray   # sqrt of one-sided power; sum(magnitude**2) = mean(x**2)
    window: str

    @property
    def resolution(self) -> float:
        return float(self.omega[1] - self.omega[0]) if self.omega.size > 1 else math.inf

    def peaks(self, k: int = 5) -> list[tuple[float, float]]:
        m = self.magnitude
        idx = [i for i in range(1, m.size - 1) if m[i] >= m[i - 1] and m[i] >= m[i + 1] and m[i] > 0]
        idx.sort(key=lambda i: -m[i])
        return [(float(self.omega[i]), float(m[i])) for i in idx[:k]]

    def band(self, lo: float, hi: float) -> np.ndarray:
        return (self.omega >= lo) & (self.omega <= hi)

    def band_peak(self, lo: float, hi: float) -> tuple[float, float]:
        """(omega, magnitude) of the largest component inside [lo, hi]."""
        mask = self.band(lo, hi)
        if not mask.any():
            return math.nan, 0.0
        i = np.flatnonzero(mask)[np.argmax(self.magnitude[mask])]
        return float(self.omega[i]), float(self.magnitude[i])

    def relative_band_magnitude(self, lo: float, hi: float) -> float:
        """Largest magnitude inside [lo, hi] over the largest magnitude anywhere."""
        top = float(np.max(self.magnitude)) if self.magnitude.size else 0.0
        return self.band_peak(lo, hi)[1] / top if top > 0 else 0.0


def zb_spectrum(values, times, window: str = "none") -> Spectrum:
    """One-sided Fourier magnitudes of a mean-subtracted, uniformly sampled column."""
    v = np.asarray(values, dtype=float)
    t = np.asarray(times, dtype=float)
    if v.shape != t.shape or v.size < 2:
        raise ValueError("values and times must be equal-length 1D arrays with >= 2 samples")
    dt = t[1] - t[0]
    if not np.allclose(np.diff(t), dt, rtol=1e-9, atol=1e-12 * max(1.0, abs(t[-1]))):
        raise ValueError("time grid must be uniform")
    x = v - v.mean()
    if window == "hann":
        x = x * np.hanning(x.size)
    elif window != "none":
        raise ValueError(f"unknown window {window!r}")
    n = x.size
    X = np.fft.rfft(x) / n
    power = np.abs(X) ** 2
    power[1:] *= 2.0
    if n % 2 == 0:
        power[-1] /= 2.0
    omega = 2.0 * math.pi * np.fft.rfftfreq(n, dt)
    return Spectrum(omega, np.sqrt(power), window)


# -- densities ----------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    ymin: float = -6.0
    ymax: float = 6.0
    zmin: float = -6.0
    zmax: float = 6.0
    ny: int = 121
    nz: int = 121

    def __post_init__(self):
        if self.ny < 2 or self.nz < 2 or not (self.ymax > self.ymin and self.zmax > self.zmin):
            raise ValueError(f"degenerate grid {self}")

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        parts = text.split(":")
        if len(parts) != 6:
            raise ValueError(f"grid must be 'ymin:ymax:zmin:zmax:ny:nz', got {text!r}")
        return cls(*map(float, parts[:4]), int(parts[4]), int(parts[5]))

    def text(self) -> str:
        return f"{self.ymin:g}:{self.ymax:g}:{self.zmin:g}:{self.zmax:g}:{self.ny}:{self.nz}"

    @property
    def y(self) -> np.ndarray:
        return np.linspace(self.ymin, self.ymax, self.ny)

    @property
    def z(self) -> np.ndarray:
        return np.linspace(self.zmin, self.zmax, self.nz)


@dataclass
class DensityGrid:
    grid: GridSpec
    values: np.ndarray  # shape (nz, ny), rows follow z
    time: float
    frame: str
    component: str
    sign: str

    def mass(self) -> float:
        """Total probability assuming cylindrical symmetry about z (weight 2 pi |y|)."""
        y, z = self.grid.y, self.grid.z
        mask = y >= 0
        if not mask.any():
            mask = y <= 0
        yy = np.abs(y[mask])
        order = np.argsort(yy)
        inner = simpson(self.values[:, mask][:, order] * yy[order], x=yy[order], axis=1)
        return float(2.0 * math.pi * simpson(inner, x=z))

    def to_text(self, path, header_lines=()) -> None:
        with open(path, "w") as fh:
            for line in header_lines:
                fh.write(f"# {line}\n")
            fh.write(f"# grid {self.grid.text()} (ymin:ymax:zmin:zmax:ny:nz)\n")
            fh.write(f"# time {self.time!r} frame {self.frame} component {self.component} sign {self.sign}\n")
            fh.write("# rows: z from zmin to zmax; columns: y from ymin to ymax\n")
            for row in self.values:
                fh.write(" ".join(f"{v:.10e}" for v in row) + "\n")


def bispinor_field(state: StateVector, x, y, z) -> np.ndarray:
    """Four bispinor components (upper up/down, lower up/down) of the state at points."""
    x, y, z = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, z)))
    rho = np.sqrt(x * x + y * y + z * z)
    theta = np.arccos(np.clip(np.divide(z, rho, out=np.ones_like(rho), where=rho > 0), -1.0, 1.0))
    phi = np.arctan2(y, x)

    kets, amps = physical_amplitudes(state)
    coeffs: dict = {}
    for k, a in zip(kets, amps):
        if k is None or a == 0:
            continue
        base = 0 if k.component == "large" else 2
        for spin, ms2 in enumerate((1, -1)):
            ml2 = k.mj2 - ms2
            if abs(ml2) > 2 * k.l:
                continue
            c = a * cg_half(k.l, ml2 // 2, ms2, k.j2, k.mj2)
            if c == 0:
                continue
            per_radial = coeffs.setdefault((base + spin, k.l, ml2 // 2), {})
            per_radial[k.n_r] = per_radial.get(k.n_r, 0) + c

    out = np.zeros((4,) + rho.shape, dtype=complex)
    radial_cache: dict = {}
    for (comp, l, ml), per_radial in coeffs.items():
        radial = np.zeros(rho.shape, dtype=complex)
        for n_r, c in per_radial.items():
            if (n_r, l) not in radial_cache:
                radial_cache[(n_r, l)] = radial_wavefunction(n_r, l, rho)
            radial += c * radial_cache[(n_r, l)]
        out[comp] += radial * spherical_harmonic(l, ml, theta, phi)
    if not np.all(np.isfinite(out)):
        raise ValueError("non-finite basis values on the requested grid")
    return out


def density_grid(state: StateVector, grid: GridSpec | None = None, component: str = "all",
                 sign: str = "both", frame: str = "dirac") -> DensityGrid:
    """Probability density on the x = 0 (zOy) plane for the selected part of the state."""
    if component not in ("large", "small", "all"):
        raise ValueError(f"component must be large, small or all, got {component!r}")
    if sign not in ("+", "-", "both"):
        raise ValueError(f"sign must be '+', '-' or 'both', got {sign!r}")
    if frame not in ("dirac", "fw"):
        raise ValueError(f"frame must be dirac or fw, got {frame!r}")
    grid = grid or GridSpec()
    selected = state if sign == "both" else energy_projection(state, sign)
    selected = convert(selected, frame)
    Z, Y = np.meshgrid(grid.z, grid.y, indexing="ij")
    field_ = bispinor_field(selected, np.zeros_like(Y), Y, Z)
    parts = {"large": (0, 1), "small": (2, 3), "all": (0, 1, 2, 3)}[component]
    values = np.sum(np.abs(field_[list(parts)]) ** 2, axis=0)
    return DensityGrid(grid, values, state.time, frame, component, sign)
