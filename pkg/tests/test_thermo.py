import math

import numpy as np
import pytest
from scipy.linalg import expm, logm

from spin_engine import qmat
from spin_engine.errors import InvalidInputError, SingularReferenceError
from spin_engine.qmat import IDENTITY, SIGMA_X, SIGMA_Z
from spin_engine.thermo import (
    ThermalContext,
    divergence,
    gibbs_divergence,
    gibbs_state,
    internal_energy,
    log_gibbs,
    log_partition,
    noneq_free_energy,
    partition_and_free_energy,
    state_functions,
    thermal_divergence,
    von_neumann_entropy,
)
from spin_engine.verify import random_density, random_hamiltonian

from .conftest import MIXED, UP, assert_close

CTX = ThermalContext(1.0)
H1 = SIGMA_Z / 2
H2 = SIGMA_X / 2

# closed forms at beta*hbar*omega = 1
Z1 = 2 * math.cosh(0.5)
F_EQ = -math.log(Z1)
E_GIBBS = -0.5 * math.tanh(0.5)
S_GIBBS = math.log(Z1) - 0.5 * math.tanh(0.5)


def test_frozen_closed_form_values():
    assert 1 / (1 + math.exp(-1)) == pytest.approx(0.731059, abs=5e-7)
    assert Z1 == pytest.approx(2.255252, abs=5e-7)
    assert F_EQ == pytest.approx(-0.813262, abs=5e-7)
    assert S_GIBBS == pytest.approx(0.582203, abs=5e-7)
    assert E_GIBBS == pytest.approx(-0.231059, abs=5e-7)


def test_gibbs_populations():
    g = gibbs_state(H1, CTX)
    p_down = 1 / (1 + math.exp(-1))
    assert_close(g, np.diag([1 - p_down, p_down]), 1e-15)


def test_gibbs_high_temperature_limit():
    assert_close(gibbs_state(H1, ThermalContext(1e-8)), MIXED, 1e-8)


def test_gibbs_sigma_x_shares_spectrum():
    gx, gz = gibbs_state(H2, CTX), gibbs_state(H1, CTX)
    assert_close(sorted(qmat.eigvals(gx)), sorted(qmat.eigvals(gz)), 1e-15)
    r = qmat.unitary_axis_angle((0, 1, 0), math.pi / 4)
    assert_close(r @ gz @ r.conj().T, gx, 1e-15)


def test_gibbs_matches_scipy_expm(rng):
    for _ in range(50):
        h = random_hamiltonian(rng)
        ctx = ThermalContext(float(10 ** rng.uniform(-1, 1)))
        m = expm(-ctx.beta_hw * h)
        assert_close(gibbs_state(h, ctx), m / np.trace(m), 1e-13)


def test_partition_examples():
    z, f = partition_and_free_energy(H1, CTX)
    assert z == pytest.approx(Z1, abs=1e-14)
    assert f == pytest.approx(F_EQ, abs=1e-14)
    z0, f0 = partition_and_free_energy(np.zeros((2, 2)), ThermalContext(2.0))
    assert z0 == 2.0 and f0 == pytest.approx(-math.log(2) / 2)
    assert partition_and_free_energy(H2, CTX) == pytest.approx((z, f), abs=1e-15)


def test_log_partition_is_stable_at_low_temperature():
    ln_z = log_partition(H1, ThermalContext(5000.0))
    assert ln_z == pytest.approx(2500.0, rel=1e-14)
    g = gibbs_state(H1, ThermalContext(5000.0))
    assert_close(g, np.diag([0, 1]), 1e-300)


def test_context_rejects_bad_beta():
    for bad in (0.0, -1.0, math.inf):
        with pytest.raises(InvalidInputError):
            ThermalContext(bad)


def test_entropy_examples():
    assert von_neumann_entropy(UP) == 0.0
    assert von_neumann_entropy(MIXED) == pytest.approx(math.log(2), abs=1e-15)
    assert von_neumann_entropy(gibbs_state(H1, CTX)) == pytest.approx(S_GIBBS, abs=1e-14)


def test_entropy_rejects_non_density():
    with pytest.raises(InvalidInputError):
        von_neumann_entropy(IDENTITY)


def test_energy_examples():
    assert internal_energy(MIXED, H1) == 0.0
    assert internal_energy(gibbs_state(H1, CTX), H1) == pytest.approx(E_GIBBS, abs=1e-15)
    assert internal_energy(UP, H1) == 0.5


def test_divergence_examples(rng):
    for _ in range(20):
        rho = random_density(rng)
        assert abs(divergence(rho, rho)) < 1e-13
    d = divergence(MIXED, gibbs_state(H1, CTX))
    assert d == pytest.approx(math.log(Z1) - math.log(2), abs=1e-14)
    assert d == pytest.approx(0.120115, abs=5e-7)
    assert abs(thermal_divergence(gibbs_state(H1, CTX), H1, CTX)) < 1e-15


def test_divergence_against_matrix_logarithm(rng):
    for _ in range(50):
        rho, sigma = random_density(rng), random_density(rng)
        expected = np.trace(rho @ (logm(rho) - logm(sigma))).real
        assert divergence(rho, sigma) == pytest.approx(expected, abs=1e-10)


def test_divergence_singular_reference():
    with pytest.raises(SingularReferenceError):
        divergence(MIXED, UP)


def test_pure_state_divergence_is_finite():
    assert divergence(UP, MIXED) == pytest.approx(math.log(2), abs=1e-15)


def test_thermal_divergence_examples():
    assert thermal_divergence(MIXED, H1, CTX) == pytest.approx(0.120115, abs=5e-7)
    assert thermal_divergence(MIXED, H1, CTX) == pytest.approx(divergence(MIXED, gibbs_state(H1, CTX)), abs=1e-14)
    assert thermal_divergence(UP, H1, CTX) == pytest.approx(0.5 - F_EQ, abs=1e-14)
    assert thermal_divergence(UP, H1, CTX) == pytest.approx(1.313262, abs=5e-7)


def test_free_energy_examples():
    g = gibbs_state(H1, CTX)
    assert noneq_free_energy(g, H1, CTX) == pytest.approx(F_EQ, abs=1e-14)
    f_mixed = noneq_free_energy(MIXED, H1, CTX)
    assert f_mixed == pytest.approx(-math.log(2), abs=1e-15)
    assert f_mixed > F_EQ
    assert noneq_free_energy(UP, H1, CTX) == 0.5


def test_divergence_routes_and_free_energy_gap(rng):
    for _ in range(500):
        rho, h = random_density(rng), random_hamiltonian(rng)
        ctx = ThermalContext(float(10 ** rng.uniform(-1, 1)))
        d1 = divergence(rho, gibbs_state(h, ctx))
        d2 = thermal_divergence(rho, h, ctx)
        d3 = gibbs_divergence(rho, h, ctx)
        f_eq = partition_and_free_energy(h, ctx)[1]
        assert abs(d1 - d2) < 1e-11
        assert abs(d3 - d2) < 1e-11
        assert abs(d2 - ctx.beta_hw * (noneq_free_energy(rho, h, ctx) - f_eq)) < 1e-12
        assert min(d1, d2) >= -1e-12


def test_log_gibbs_is_analytic_log():
    h = 0.3 * IDENTITY + 0.2 * SIGMA_X - 0.4 * SIGMA_Z
    ctx = ThermalContext(2.5)
    assert_close(log_gibbs(h, ctx), logm(gibbs_state(h, ctx)), 1e-12)


def test_unitary_invariance(rng):
    for _ in range(50):
        rho, sigma = random_density(rng), random_density(rng)
        n = rng.normal(size=3)
        u = qmat.unitary_axis_angle(n / np.linalg.norm(n), rng.uniform(0, 6))
        rr, ss = u @ rho @ u.conj().T, u @ sigma @ u.conj().T
        assert von_neumann_entropy(rr) == pytest.approx(von_neumann_entropy(rho), abs=1e-13)
        assert divergence(rr, ss) == pytest.approx(divergence(rho, sigma), abs=1e-11)


def test_state_functions_bundle():
    sf = state_functions(MIXED, H1, CTX)
    assert sf.energy == 0.0
    assert sf.entropy == pytest.approx(math.log(2))
    assert sf.f_eq == pytest.approx(F_EQ)
    assert sf.f_neq == pytest.approx(-math.log(2))
    assert sf.divergence == pytest.approx(math.log(Z1) - math.log(2))
