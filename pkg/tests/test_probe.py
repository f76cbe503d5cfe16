import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spin_engine import qmat
from spin_engine.errors import InvalidInputError
from spin_engine.probe import MeasurementBasis, basis_states, dephase, outcome_probs, projectors, wrap_phi
from spin_engine.qmat import IDENTITY, SIGMA_X
from spin_engine.thermo import von_neumann_entropy
from spin_engine.verify import random_density

from .conftest import MIXED, UP, assert_close

alphas = st.floats(min_value=0, max_value=math.pi)
phis = st.floats(min_value=-20, max_value=20)


def test_basis_states_endpoints():
    chi1, chi2 = basis_states(MeasurementBasis(0.0, 0.0))
    assert_close(chi1, [0, -1], 0)
    assert_close(chi2, [1, 0], 0)
    _, chi2 = basis_states(MeasurementBasis(math.pi / 2, 0.0))
    assert_close(chi2, np.array([1, 1]) / math.sqrt(2), 1e-15)


def test_projector_examples():
    p1, p2 = projectors(MeasurementBasis(0.0, 0.0))
    assert_close(p1, np.diag([0, 1]), 0)
    assert_close(p2, np.diag([1, 0]), 0)
    assert_close(projectors(MeasurementBasis(math.pi / 2, 0.0)).p2, (IDENTITY + SIGMA_X) / 2, 1e-15)


@settings(max_examples=200, deadline=None)
@given(alphas, phis)
def test_projectors_form_orthogonal_resolution(alpha, phi):
    p1, p2 = projectors(MeasurementBasis(alpha, phi))
    assert_close(p1 + p2, IDENTITY, 1e-15)
    assert_close(p1 @ p2, np.zeros((2, 2)), 1e-15)
    assert_close(p1 @ p1, p1, 1e-15)


@settings(max_examples=200, deadline=None)
@given(alphas, phis)
def test_chi2_points_along_bloch_vector(alpha, phi):
    b = MeasurementBasis(alpha, phi)
    p2 = projectors(b).p2
    bloch = [np.trace(s @ p2).real for s in qmat.PAULIS]
    assert_close(bloch, b.bloch_vector, 1e-15)


def test_alpha_outside_range_rejected():
    for bad in (-1e-3, math.pi + 1e-3, math.nan):
        with pytest.raises(InvalidInputError):
            MeasurementBasis(bad, 0.0)


def test_phi_is_normalized():
    assert MeasurementBasis(1.0, 2 * math.pi + 0.5).phi == pytest.approx(0.5)
    assert MeasurementBasis(1.0, -0.5).phi == pytest.approx(2 * math.pi - 0.5)
    assert 0 <= wrap_phi(-1e-18) < 2 * math.pi


def test_antipode_gives_the_same_projectors(rng):
    for _ in range(50):
        b = MeasurementBasis(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi))
        pa, pb = projectors(b), projectors(b.antipode())
        assert_close(pa.p1, pb.p2, 1e-15)
        assert_close(pa.p2, pb.p1, 1e-15)


def test_dephase_examples():
    b = MeasurementBasis(0.7, 2.1)
    assert_close(dephase(MIXED, b), MIXED, 1e-15)
    assert_close(dephase((IDENTITY + 0.8 * SIGMA_X) / 2, MeasurementBasis(0.0, 0.0)), MIXED, 0)
    p1, p2 = projectors(b)
    diag = 0.3 * p1 + 0.7 * p2
    assert_close(dephase(diag, b), diag, 1e-15)


def test_dephase_rejects_non_density():
    with pytest.raises(InvalidInputError):
        dephase(IDENTITY, MeasurementBasis(0.3))
    with pytest.raises(InvalidInputError):
        outcome_probs(SIGMA_X, MeasurementBasis(0.3))


def test_outcome_prob_examples():
    assert outcome_probs(MIXED, MeasurementBasis(1.2, 0.4)) == pytest.approx((0.5, 0.5), abs=1e-15)
    assert outcome_probs(UP, MeasurementBasis(0.0, 0.0)) == (0.0, 1.0)
    assert outcome_probs(UP, MeasurementBasis(math.pi / 2, 0.0)) == pytest.approx((0.5, 0.5), abs=1e-15)


def test_dephasing_channel_properties(rng):
    for _ in range(300):
        rho = random_density(rng)
        b = MeasurementBasis(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi))
        out = dephase(rho, b)
        assert abs(np.trace(out) - 1) < 1e-14
        assert qmat.is_density(out)
        assert_close(dephase(out, b), out, 1e-14)
        assert outcome_probs(out, b) == pytest.approx(outcome_probs(rho, b), abs=1e-14)
        assert von_neumann_entropy(out) >= von_neumann_entropy(rho) - 1e-12


def test_entropy_unchanged_only_when_rho_commutes(rng):
    b = MeasurementBasis(0.9, 1.3)
    p1, p2 = projectors(b)
    diag = 0.2 * p1 + 0.8 * p2
    assert von_neumann_entropy(dephase(diag, b)) == pytest.approx(von_neumann_entropy(diag), abs=1e-13)
    rho = random_density(rng)
    comm = np.max(np.abs(rho @ p1 - p1 @ rho))
    assert comm > 1e-3
    assert von_neumann_entropy(dephase(rho, b)) > von_neumann_entropy(rho) + 1e-8


def test_phase_covariance(rng):
    # rotating about z by phi maps the phi = 0 channel onto the phi channel
    for _ in range(50):
        alpha, phi = rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi)
        r = np.diag([1, np.exp(1j * phi)])
        rho = random_density(rng)
        lhs = dephase(rho, MeasurementBasis(alpha, phi))
        rhs = r @ dephase(r.conj().T @ rho @ r, MeasurementBasis(alpha, 0.0)) @ r.conj().T
        assert_close(lhs, rhs, 1e-14)


def test_alpha_zero_basis_ignores_phi():
    for phi in (0.0, 1.0, 4.0):
        assert_close(projectors(MeasurementBasis(0.0, phi)).p2, np.diag([1, 0]), 0)
