"""Orbital x spin-1/2 coupling in the Condon-Shortley convention.

Clebsch-Gordan coefficients <l m_l; 1/2 m_s | j m_j> are generated by
lowering from the top state |j, j> with J- = L- + S-, then memoised.
Spin projections are always passed doubled (ms2 = +-1, mj2 odd).
"""
from __future__ import annotations

import math
from functools import lru_cache

from .model import BasisKet, a_quantum, validate_qn

SQRT2 = math.sqrt(2.0)

# <ms2_a | sigma_q | ms2_b> for the spherical components
#   sigma_{+1} = -(sx + i sy)/sqrt2,  sigma_0 = sz,  sigma_{-1} = (sx - i sy)/sqrt2
_PAULI_SPHERICAL = {
    (0, 1, 1): 1.0,
    (0, -1, -1): -1.0,
    (1, 1, -1): -SQRT2,
    (-1, -1, 1): SQRT2,
}


@lru_cache(maxsize=None)
def _cg_table(l: int, j2: int) -> dict:
    """All nonzero coefficients {(mj2, ml, ms2): value} for fixed (l, j)."""
    if j2 == 2 * l + 1:
        top = {(l, 1): 1.0}
    elif j2 == 2 * l - 1 and l >= 1:
        norm = math.sqrt(2 * l + 1)
        # orthogonal to |l+1/2, l-1/2>, sign fixed by <l l; 1/2 -1/2 | j j> > 0
        top = {(l - 1, 1): -1.0 / norm, (l, -1): math.sqrt(2 * l) / norm}
    else:
        raise ValueError(f"invalid coupling l={l}, j2={j2}")

    table = {}
    state = top
    mj2 = j2
    while True:
        for (ml, ms2), v in state.items():
            table[(mj2, ml, ms2)] = v
        if mj2 == -j2:
            break
        # J-|j m> = sqrt((j+m)(j-m+1)) |j m-1>, everything doubled
        lowered: dict = {}
        for (ml, ms2), v in state.items():
            if ml > -l:
                key = (ml - 1, ms2)
                lowered[key] = lowered.get(key, 0.0) + v * math.sqrt((l + ml) * (l - ml + 1))
            if ms2 == 1:
                key = (ml, -1)
                lowered[key] = lowered.get(key, 0.0) + v
        denom = 0.5 * math.sqrt((j2 + mj2) * (j2 - mj2 + 2))
        state = {k: v / denom for k, v in lowered.items() if v != 0.0}
        mj2 -= 2
    return table


def cg_half(l: int, ml: int, ms2: int, j2: int, mj2: int) -> float:
    """<l ml; 1/2 ms2/2 | j2/2 mj2/2>; zero whenever a selection rule fails."""
    if ms2 not in (1, -1) or abs(ml) > l or mj2 != 2 * ml + ms2:
        return 0.0
    if l < 0 or (j2 != 2 * l + 1 and not (l >= 1 and j2 == 2 * l - 1)) or abs(mj2) > j2:
        return 0.0
    return _cg_table(l, j2).get((mj2, ml, ms2), 0.0)


@lru_cache(maxsize=None)
def pauli_matrix_element(l: int, j2a: int, mj2a: int, q: int, j2b: int, mj2b: int) -> float:
    """<(l 1/2) ja ma | sigma_q | (l 1/2) jb mb>, by uncoupling both kets."""
    if q not in (-1, 0, 1):
        raise ValueError(f"spherical index q must be -1, 0 or 1, got {q}")
    if mj2a != mj2b + 2 * q:
        return 0.0
    total = 0.0
    for ms2b in (1, -1):
        ms2a = ms2b + 2 * q
        s = _PAULI_SPHERICAL.get((q, ms2a, ms2b))
        if s is None:
            continue
        ml = (mj2b - ms2b) // 2
        if ml != (mj2a - ms2a) // 2:
            continue
        total += cg_half(l, ml, ms2a, j2a, mj2a) * s * cg_half(l, ml, ms2b, j2b, mj2b)
    return total


def partner_l(l: int, j2: int) -> int:
    """Opposite-parity orbital partner at the same j: 2j - l."""
    validate_qn(l, l, j2)
    return j2 - l


def coupling_mu(N: int, l: int, j2: int) -> float:
    """|<partner| sigma.a |N l j m>| = sqrt(A/2), the sector coupling magnitude."""
    return math.sqrt(a_quantum(N, l, j2) / 2.0)


def ladder_sign(l: int, j2: int) -> int:
    """Sign of <N-1, 2j-l, j, m | sigma.a | N, l, j, m> with standard phases.

    Positive radial functions near the origin, Condon-Shortley spherical
    harmonics and sigma.rhat Omega_{l j m} = -Omega_{2j-l, j, m} make the
    matrix element positive on the aligned branch and negative on the
    anti-aligned one.
    """
    return 1 if j2 == 2 * l + 1 else -1


def partner_ket(ket: BasisKet) -> BasisKet | None:
    """Small-component ket reached from a large ket by sigma.a, or None if stretched."""
    if ket.stretched:
        return None
    return BasisKet(ket.N - 1, partner_l(ket.l, ket.j2), ket.j2, ket.mj2, "small")
