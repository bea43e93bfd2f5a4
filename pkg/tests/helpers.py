"""Small shared constructors for tests."""
from dirac_pendulum.dynamics import build_sectors
from dirac_pendulum.expansion import ExpansionTable
from dirac_pendulum.model import BasisKet, Units


def single_ket_state(ket: BasisKet, r: float, amp: complex = 1.0):
    table = ExpansionTable(nu=0.0, N_max=ket.N, lam={}, amplitudes={ket: amp})
    return build_sectors(table, Units(r))


def table_from(amps: dict) -> ExpansionTable:
    return ExpansionTable(nu=0.0, N_max=max(k.N for k in amps), lam={}, amplitudes=dict(amps))
