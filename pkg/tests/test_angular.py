import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dirac_pendulum.angular import (cg_half, coupling_mu, ladder_sign, partner_ket, partner_l,
                                    pauli_matrix_element)
from dirac_pendulum.model import BasisKet, Units, energy


def cg_by_diagonalisation(l):
    """Independent CG table: eigenvectors of J^2, J_z in the (2l+1)x2 product space.

    Top states |j, j> come from diagonalising J^2 in the m = j subspace with the
    Condon-Shortley sign <l l; 1/2 (j-l) | j j> > 0; lower m by J-.
    Returns {(j2, mj2): vector over (ml, ms2) basis}.
    """
    mls = list(range(-l, l + 1))
    basis = [(ml, ms2) for ml in mls for ms2 in (1, -1)]
    dim = len(basis)
    index = {b: i for i, b in enumerate(basis)}
    Lz = np.diag([ml for ml, _ in basis]).astype(float)
    Sz = np.diag([ms2 / 2 for _, ms2 in basis])
    Lm = np.zeros((dim, dim))
    Sm = np.zeros((dim, dim))
    for (ml, ms2), i in index.items():
        if ml > -l:
            Lm[index[(ml - 1, ms2)], i] = math.sqrt(l * (l + 1) - ml * (ml - 1))
        if ms2 == 1:
            Sm[index[(ml, -1)], i] = 1.0
    Jm = Lm + Sm
    Jz = Lz + Sz
    J2 = Jm.T @ Jm + Jz @ Jz - Jz  # J+ J- + Jz^2 - Jz, with J+ = Jm^T
    out = {}
    for j2 in [2 * l + 1] + ([2 * l - 1] if l else []):
        j = j2 / 2
        sub = [i for i, (ml, ms2) in enumerate(basis) if 2 * ml + ms2 == j2]
        w, v = np.linalg.eigh(J2[np.ix_(sub, sub)])
        k = int(np.argmin(np.abs(w - j * (j + 1))))
        top = np.zeros(dim)
        top[sub] = v[:, k]
        top_coord = index[(l, j2 - 2 * l)]
        top *= np.sign(top[top_coord])
        vec, mj2 = top, j2
        out[(j2, mj2)] = vec
        while mj2 > -j2:
            m = mj2 / 2
            vec = Jm @ vec / math.sqrt(j * (j + 1) - m * (m - 1))
            mj2 -= 2
            out[(j2, mj2)] = vec
    return basis, out


def test_cg_examples():
    assert cg_half(0, 0, 1, 1, 1) == 1.0
    assert cg_half(1, 0, 1, 3, 1) == pytest.approx(math.sqrt(2 / 3), abs=1e-15)
    assert cg_half(1, 0, 1, 1, 1) == pytest.approx(-math.sqrt(1 / 3), abs=1e-15)


def test_cg_selection_rules_return_zero():
    assert cg_half(1, 0, 1, 3, 3) == 0.0       # m mismatch
    assert cg_half(1, 2, 1, 3, 5) == 0.0       # |ml| > l
    assert cg_half(1, 0, 1, 5, 1) == 0.0       # j not l +- 1/2


@pytest.mark.parametrize("l", range(0, 8))
def test_cg_matches_j2_diagonalisation(l):
    basis, table = cg_by_diagonalisation(l)
    for (j2, mj2), vec in table.items():
        ours = np.array([cg_half(l, ml, ms2, j2, mj2) for ml, ms2 in basis])
        np.testing.assert_allclose(ours, vec, atol=1e-12)


@pytest.mark.parametrize("l", range(0, 12))
def test_cg_closed_form(l):
    # <l m-1/2; 1/2 1/2 | l+1/2 m> = sqrt((l+m+1/2)/(2l+1)) and partners
    for mj2 in range(-2 * l - 1, 2 * l + 2, 2):
        m = mj2 / 2
        up_ml, down_ml = (mj2 - 1) // 2, (mj2 + 1) // 2
        if abs(up_ml) <= l:
            assert cg_half(l, up_ml, 1, 2 * l + 1, mj2) == pytest.approx(math.sqrt((l + m + 0.5) / (2 * l + 1)), abs=1e-13)
        if abs(down_ml) <= l:
            assert cg_half(l, down_ml, -1, 2 * l + 1, mj2) == pytest.approx(math.sqrt((l - m + 0.5) / (2 * l + 1)), abs=1e-13)
        if l and abs(mj2) <= 2 * l - 1:
            assert cg_half(l, up_ml, 1, 2 * l - 1, mj2) == pytest.approx(-math.sqrt((l - m + 0.5) / (2 * l + 1)), abs=1e-13)
            assert cg_half(l, down_ml, -1, 2 * l - 1, mj2) == pytest.approx(math.sqrt((l + m + 0.5) / (2 * l + 1)), abs=1e-13)


@pytest.mark.parametrize("l", range(0, 15))
def test_cg_orthonormality(l):
    for mj2 in range(-2 * l - 1, 2 * l + 2, 2):
        rows = []
        for j2 in (2 * l + 1, 2 * l - 1):
            rows.append([cg_half(l, (mj2 - ms2) // 2, ms2, j2, mj2) for ms2 in (1, -1)])
        aligned, anti = np.array(rows)
        assert aligned @ aligned == pytest.approx(1.0, abs=1e-12)
        if l and abs(mj2) < 2 * l:
            assert anti @ anti == pytest.approx(1.0, abs=1e-12)
            assert abs(aligned @ anti) < 1e-12


def test_pauli_examples():
    assert pauli_matrix_element(0, 1, 1, 0, 1, 1) == pytest.approx(1.0)
    assert pauli_matrix_element(1, 3, 1, 0, 3, 1) == pytest.approx(1 / 3, abs=1e-15)
    assert pauli_matrix_element(1, 3, 1, 0, 1, 1) == pytest.approx(-2 * math.sqrt(2) / 3, abs=1e-15)
    # cross-check 2 mj / (2l+1) on the aligned diagonal
    for l in range(5):
        for mj2 in range(-2 * l - 1, 2 * l + 2, 2):
            assert pauli_matrix_element(l, 2 * l + 1, mj2, 0, 2 * l + 1, mj2) == pytest.approx(mj2 / (2 * l + 1), abs=1e-13)


def test_pauli_selection_rule():
    assert pauli_matrix_element(1, 3, 3, 0, 3, 1) == 0.0
    assert pauli_matrix_element(1, 3, 3, 1, 3, 1) != 0.0


def coupled_states(l):
    return [(j2, mj2) for j2 in ([2 * l + 1] + ([2 * l - 1] if l else [])) for mj2 in range(-j2, j2 + 1, 2)]


@given(st.integers(0, 8), st.data())
def test_pauli_hermiticity(l, data):
    states = coupled_states(l)
    a = data.draw(st.sampled_from(states))
    b = data.draw(st.sampled_from(states))
    q = data.draw(st.sampled_from([-1, 0, 1]))
    lhs = pauli_matrix_element(l, *a, q, *b)
    rhs = (-1) ** q * pauli_matrix_element(l, *b, -q, *a)
    assert lhs == pytest.approx(rhs, abs=1e-13)


@pytest.mark.parametrize("l", range(1, 7))
def test_sigma_dot_l_eigenvalues(l):
    # sigma.L = 2 L.S, diagonal in j: build it from sigma_q and the orbital L_q matrix in the
    # uncoupled basis, then project onto the two j values at fixed m_j
    for mj2 in (1, -1, 2 * l - 1):
        states = [(2 * l + 1, mj2), (2 * l - 1, mj2)]
        # J^2 = L^2 + S^2 + L.sigma  =>  sigma.L = J^2 - L^2 - 3/4
        for j2, _ in states:
            j = j2 / 2
            value = j * (j + 1) - l * (l + 1) - 0.75
            assert value == pytest.approx(l if j2 == 2 * l + 1 else -(l + 1))
        # matrix in the {aligned, anti} basis from the sigma elements: sigma.L|l ml ms> uncoupled
        M = np.zeros((2, 2))
        for i, (ja, ma) in enumerate(states):
            for k, (jb, mb) in enumerate(states):
                total = 0.0
                for ml in range(-l, l + 1):
                    for ms2 in (1, -1):
                        cb = cg_half(l, ml, ms2, jb, mb)
                        if cb == 0:
                            continue
                        # sz Lz
                        total += cg_half(l, ml, ms2, ja, ma) * cb * ml * ms2
                        # s+ L- + s- L+ (sigma_x Lx + sigma_y Ly)
                        if ms2 == -1 and ml > -l:
                            total += cg_half(l, ml - 1, 1, ja, ma) * cb * math.sqrt(l * (l + 1) - ml * (ml - 1))
                        if ms2 == 1 and ml < l:
                            total += cg_half(l, ml + 1, -1, ja, ma) * cb * math.sqrt(l * (l + 1) - ml * (ml + 1))
                M[i, k] = total
        np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(M)), [-(l + 1), l], atol=1e-12)
        # and the spherical Pauli elements reproduce the sigma_z part of the same sum
        sz = np.array([[pauli_matrix_element(l, *a, 0, *b) for b in states] for a in states])
        assert np.allclose(sz, sz.T)


@pytest.mark.parametrize("l,j2,expected", [(0, 1, 1), (1, 1, 0), (2, 5, 3)])
def test_partner_l(l, j2, expected):
    assert partner_l(l, j2) == expected


def test_coupling_mu_examples():
    for l in range(6):
        assert coupling_mu(l, l, 2 * l + 1) == 0.0
    assert coupling_mu(1, 1, 1) == pytest.approx(math.sqrt(3))
    assert coupling_mu(2, 0, 1) == pytest.approx(math.sqrt(2))


@pytest.mark.parametrize("r", [1e-6, 0.01, 0.5, 2.0])
def test_sector_spectrum_consistency(r):
    u = Units(r)
    for N in range(0, 16):
        for l in range(N % 2, N + 1, 2):
            for j2 in [2 * l + 1] + ([2 * l - 1] if l else []):
                lhs = u.mc2**2 + 2 * u.mc2 * coupling_mu(N, l, j2) ** 2
                assert lhs == pytest.approx(energy(N, l, j2, u) ** 2, rel=1e-12)


def test_partner_ket_structure():
    assert partner_ket(BasisKet(2, 2, 5, 1)) is None
    k = partner_ket(BasisKet(4, 2, 5, 1))
    assert k == BasisKet(3, 3, 5, 1, "small")
    k = partner_ket(BasisKet(3, 1, 1, -1))
    assert k == BasisKet(2, 0, 1, -1, "small")
    assert ladder_sign(2, 5) == 1 and ladder_sign(2, 3) == -1
