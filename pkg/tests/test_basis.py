import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import lpmv

from qpendulum.basis import (BasisSpec, assemble, cos2_matrix, cos_matrix, default_jmax,
                             hamiltonian_element)
from qpendulum.model import InteractionParams

X, W = np.polynomial.legendre.leggauss(80)


def _theta_part(j, m):
    """Normalized theta factor of Y_jm on the Gauss-Legendre nodes, by scipy's lpmv."""
    norm = math.sqrt((2 * j + 1) / 2 * math.factorial(j - m) / math.factorial(j + m))
    return norm * lpmv(m, j, X)


def _element_by_quadrature(j1, j2, m, eta, zeta):
    f1, f2 = _theta_part(j1, m), _theta_part(j2, m)
    v = -eta * X - zeta * X * X
    out = np.sum(W * f1 * f2 * v)
    return out + (j1 * (j1 + 1) if j1 == j2 else 0.0)


@pytest.mark.parametrize("m", [0, 1, 2, 3])
def test_elements_match_quadrature(m):
    p = InteractionParams(7.3, 4.1)
    for j1 in range(m, m + 8):
        for j2 in range(m, m + 8):
            assert hamiltonian_element(j1, j2, m, p) == pytest.approx(
                _element_by_quadrature(j1, j2, m, 7.3, 4.1), abs=1e-12)


def test_assemble_matches_elementwise():
    spec, p = BasisSpec(2, 12), InteractionParams(3.0, 5.0)
    h = assemble(spec, p).dense()
    ref = np.array([[hamiltonian_element(a, b, 2, p) for b in spec.j] for a in spec.j])
    np.testing.assert_allclose(h, ref, atol=1e-13)


def test_free_rotor_is_diagonal():
    h = assemble(BasisSpec(1, 6), InteractionParams(0.0, 0.0))
    np.testing.assert_array_equal(h.dense(), np.diag([j * (j + 1.0) for j in range(1, 7)]))


def test_negative_m_uses_abs():
    assert BasisSpec(-2, 5) == BasisSpec(2, 5)


def test_empty_basis_rejected():
    with pytest.raises(ValueError):
        BasisSpec(3, 2)
    with pytest.raises(ValueError):
        hamiltonian_element(0, 1, 1, InteractionParams(1, 1))


def test_far_elements_vanish():
    assert hamiltonian_element(0, 3, 0, InteractionParams(5.0, 5.0)) == 0.0


def test_operator_matrices_combine_to_hamiltonian():
    spec, p = BasisSpec(1, 10), InteractionParams(2.5, 1.5)
    j = spec.j
    h = np.diag(j * (j + 1.0)) - p.eta * cos_matrix(spec).dense() - p.zeta * cos2_matrix(spec).dense()
    np.testing.assert_allclose(assemble(spec, p).dense(), h, atol=1e-13)


def test_cos_squared_is_cos_times_cos_away_from_cutoff():
    spec = BasisSpec(0, 30)
    c = cos_matrix(spec).dense()
    np.testing.assert_allclose((c @ c)[:25, :25], cos2_matrix(spec).dense()[:25, :25], atol=1e-13)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 4), st.integers(5, 40), st.floats(-50, 50), st.floats(0, 50))
def test_banded_storage_round_trip(m, extra, eta, zeta):
    h = assemble(BasisSpec(m, m + extra), InteractionParams(eta, zeta))
    d = h.dense()
    np.testing.assert_array_equal(d, d.T)
    assert np.count_nonzero(np.triu(d, 3)) == 0
    ab = h.lapack_upper()
    np.testing.assert_array_equal(ab[2], np.diag(d))
    np.testing.assert_array_equal(ab[1, 1:], np.diag(d, 1))
    np.testing.assert_array_equal(ab[0, 2:], np.diag(d, 2))
    v = np.random.default_rng(0).standard_normal((h.dim, 3))
    np.testing.assert_allclose(h.matvec(v), d @ v, atol=1e-10)
    np.testing.assert_allclose(h.matvec(v[:, 0]), d @ v[:, 0], atol=1e-10)


def test_bands_are_read_only():
    h = assemble(BasisSpec(0, 5), InteractionParams(1.0, 1.0))
    with pytest.raises(ValueError):
        h.diagonal[0] = 1.0


def test_default_jmax_grows_with_field():
    assert default_jmax(0, InteractionParams(0, 0)) == 40
    assert default_jmax(0, InteractionParams(1e6, 0)) > 4000
