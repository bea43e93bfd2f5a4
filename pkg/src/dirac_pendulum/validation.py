"""Oracle comparisons and invariant checks behind the ``validate`` command."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import oracle
from .dynamics import (StateVector, build_sectors, dirac_amplitudes, physical_amplitudes,
                       physical_batch, prepare_state)
from .expansion import PacketSpec, expand_packet
from .model import Units, energy
from .observables import state_series


@dataclass(frozen=True)
class CheckResult:
    name: str
    deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.deviation <= self.tolerance)


def to_dense(state_or_batch, model: oracle.DenseModel, layout=None) -> np.ndarray:
    """Place standard-phase amplitudes into the dense model's basis ordering."""
    if isinstance(state_or_batch, StateVector):
        kets, amps = physical_amplitudes(state_or_batch)
        amps = amps[None, :]
    else:
        kets = [s.ket_large for s in layout.sectors] + [s.ket_small for s in layout.sectors]
        amps = state_or_batch
    index = model.index()
    out = np.zeros((amps.shape[0], len(model.basis)), dtype=complex)
    for j, k in enumerate(kets):
        if k is not None:
            out[:, index[k]] += amps[:, j]
    return out[0] if isinstance(state_or_batch, StateVector) else out


def expected_spectrum(model: oracle.DenseModel) -> np.ndarray:
    """Eigenvalues implied by the closed-form spectrum for the dense model's basis."""
    vals = []
    for k in model.basis:
        if k.component != "large":
            continue
        e = energy(k.N, k.l, k.j2, model.units, +1)
        vals.append(e)
        if not k.stretched:
            vals.append(-e)
    return np.sort(np.array(vals))


def spectrum_deviation(N_max: int, r: float) -> float:
    model = oracle.dense_hamiltonian(N_max, Units(r))
    w = model.eigenvalues()
    expected = expected_spectrum(model)
    if w.size != expected.size:
        return math.inf
    return float(np.max(np.abs(w - expected) / np.abs(expected)))


def propagator_deviation(spec: PacketSpec, N_max: int, times) -> float:
    model = oracle.dense_hamiltonian(N_max, spec.units)
    state0 = build_sectors(expand_packet(spec, N_max=N_max), spec.units)
    large, small = dirac_amplitudes(state0, times)
    ours = to_dense(physical_batch(state0.layout, large, small), model, state0.layout)
    theirs = oracle.dense_evolve(model, to_dense(state0, model), np.asarray(times))
    return float(np.max(np.abs(ours - theirs)))


def packet_deviation(spec: PacketSpec, N_max: int) -> float:
    model = oracle.dense_hamiltonian(N_max, spec.units)
    state0 = build_sectors(expand_packet(spec, N_max=N_max), spec.units)
    cart = oracle.cartesian_packet(model, spec.z0, spec.p0, spec.spinor)
    return float(np.max(np.abs(to_dense(state0, model) - cart)))


def dense_observable_deviation(spec: PacketSpec, N_max: int, times) -> float:
    """Spin vector and positive-energy fraction: main path vs Cartesian dense evolution."""
    model = oracle.dense_hamiltonian(N_max, spec.units)
    state0 = prepare_state(spec, expand_packet(spec, N_max=N_max))
    ts = state_series(state0, times)
    dirac0 = state0 if state0.frame == "dirac" else None
    if dirac0 is None:
        from .dynamics import from_fw_frame
        dirac0 = from_fw_frame(state0)
    psi = oracle.dense_evolve(model, to_dense(dirac0, model), np.asarray(times))
    worst = 0.0
    for i, row in enumerate(np.atleast_2d(psi)):
        s = oracle.dense_spin(model, row)
        pos = oracle.positive_energy_population(model, row) / float(np.vdot(row, row).real)
        ours = np.array([ts["sigma_x"][i], ts["sigma_y"][i], ts["sigma_z"][i], ts["pos_fraction"][i]])
        worst = max(worst, float(np.max(np.abs(ours - np.append(s, pos)))))
    return worst


def constants_deviation(spec: PacketSpec, t_max: float, n_times: int = 801) -> dict:
    ts = state_series(prepare_state(spec), np.linspace(0.0, t_max, n_times))
    norm = ts["norm"]
    return {
        "norm": float(np.max(np.abs(norm - norm[0])) / norm[0]),
        "Jz": float(np.max(np.abs(ts["Jz"] - ts["Jz"][0]))),
        "pos_fraction": float(np.max(np.abs(ts["pos_fraction"] - ts["pos_fraction"][0]))),
    }


def gauge_deviation(spec: PacketSpec, times, flip_every: int = 3) -> float:
    """Max change of any observable column when every ``flip_every``-th sector flips its coupling sign."""
    table = expand_packet(spec)
    base = prepare_state(spec, table)
    flips = {k: -1 for i, k in enumerate(sorted(table.amplitudes)) if i % flip_every == 0}
    flipped = prepare_state(spec, table, gauge=flips)
    a = state_series(base, times, spec.spin_direction)
    b = state_series(flipped, times, spec.spin_direction)
    return max(float(np.max(np.abs(a[c] - b[c]))) for c in a.columns)


def run_checks(cfg) -> list[CheckResult]:
    spec = cfg.packet()
    results = []
    for r in (1e-4, 0.01, 0.5):
        results.append(CheckResult(f"spectrum oracle N<=10 r={r:g}", spectrum_deviation(10, r), 1e-10))
    times = np.linspace(0.0, 4 * math.pi, 50)
    prop_spec = PacketSpec(r=0.5, z0=spec.z0, p0=spec.p0, theta_sigma=spec.theta_sigma,
                           phi_sigma=spec.phi_sigma)
    results.append(CheckResult("propagator oracle N_max=8 r=0.5", propagator_deviation(prop_spec, 8, times), 1e-10))
    results.append(CheckResult(f"propagator oracle N_max=8 r={spec.r:g}",
                               propagator_deviation(PacketSpec(r=spec.r, z0=spec.z0, p0=spec.p0,
                                                               theta_sigma=spec.theta_sigma,
                                                               phi_sigma=spec.phi_sigma), 8, times), 1e-10))
    results.append(CheckResult("t=0 packet vs Cartesian coherent state", packet_deviation(spec, 8), 1e-12))
    results.append(CheckResult("observables vs Cartesian dense model",
                               dense_observable_deviation(prop_spec, 8, np.linspace(0, 2 * math.pi, 12)), 1e-10))
    results.append(CheckResult("pointwise reconstruction N<=8",
                               max(oracle.reconstruct_pointwise(N) for N in range(9)), 1e-8))
    consts = constants_deviation(spec, 40 * math.pi)
    results.append(CheckResult("norm conservation over [0, 40pi]", consts["norm"], 1e-12))
    results.append(CheckResult("<J_z> conservation over [0, 40pi]", consts["Jz"], 1e-12))
    results.append(CheckResult("energy-sign populations over [0, 40pi]", consts["pos_fraction"], 1e-10))
    results.append(CheckResult("gauge invariance of all columns",
                               gauge_deviation(spec, np.linspace(0, 2 * math.pi, 64)), 1e-12))
    return results
