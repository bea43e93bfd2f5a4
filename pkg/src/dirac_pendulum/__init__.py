"""Spectral simulator for spin-orbit pendulum wave packets in the 3D Dirac oscillator."""
from .model import BasisKet, Units, a_quantum, energy, validate_qn
from .angular import cg_half, coupling_mu, ladder_sign, partner_ket, partner_l, pauli_matrix_element
from .basis import cartesian_z_mode, radial_wavefunction, spherical_harmonic
from .expansion import (ExpansionTable, PacketSpec, bracket_cnl, choose_truncation,
                        coherent_amplitudes, expand_packet, gaussian_packet)
from .dynamics import (Sector, SectorLayout, StateVector, build_sectors, energy_populations,
                       energy_projection, evolve_dirac, evolve_fw, from_fw_frame, prepare_state,
                       to_fw_frame)
from .observables import (DensityGrid, GridSpec, TimeSeries, angular_momentum_expectation,
                          density_grid, fidelity, spin_expectation, spin_purity, time_series,
                          zb_spectrum)

__version__ = "0.1.0"
