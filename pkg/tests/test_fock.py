import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import factorial

from cvrepeater import (
    DensityMatrix,
    FockKet,
    make_coherent,
    make_fock,
    make_tmsv,
    make_vacuum,
    partial_trace,
    quadrature_moments,
    tensor,
)
from cvrepeater.fock import ladder_expectations

from .conftest import random_ket

complexes = st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False)


def test_vacuum_coherent_is_vacuum():
    ket = make_coherent(0, 10)
    assert ket.amplitudes[0] == 1
    assert np.all(ket.amplitudes[1:] == 0)


def test_coherent_norm_and_photon_number():
    ket = make_coherent(1.0, 20)
    n = np.arange(21)
    expected = np.exp(-1) * np.sum(1 / factorial(n))
    assert ket.norm2 == pytest.approx(expected, abs=1e-15)
    assert abs(ket.norm2 - 1) < 1e-12
    assert ket.photon_distribution(0) @ n == pytest.approx(1.0, abs=1e-10)


def test_coherent_rejects_nonfinite():
    with pytest.raises(ValueError):
        make_coherent(complex("nan"), 5)
    with pytest.raises(ValueError):
        make_coherent(1.0, -1)


def test_tmsv_amplitudes_and_photon_number():
    assert make_tmsv(0.0, 5).amplitudes[0, 0] == 1
    ket = make_tmsv(0.7, 30)
    assert ket.amplitudes[1, 1] == pytest.approx(math.sqrt(0.51) * 0.7, abs=1e-15)
    assert ket.amplitudes[1, 1] == pytest.approx(0.49990, abs=5e-6)
    assert ket.amplitudes[1, 0] == 0
    n = np.arange(31)
    assert ket.photon_distribution(0) @ n == pytest.approx(0.49 / 0.51, abs=1e-6)


def test_tmsv_rejects_unit_strength():
    with pytest.raises(ValueError):
        make_tmsv(1.0, 5)
    with pytest.raises(ValueError):
        make_tmsv(-0.1, 5)


def test_tensor_of_vacua():
    ket = tensor(make_vacuum(4), make_vacuum(4))
    assert ket.mode_count == 2
    assert ket.amplitudes[0, 0] == 1 and ket.norm2 == 1


def test_tensor_rejects_mismatched_cutoffs():
    with pytest.raises(ValueError):
        tensor(make_vacuum(3), make_vacuum(4))


def test_tensor_norm_multiplies(rng):
    for _ in range(20):
        a = random_ket(rng, 4, scale=rng.uniform(0.1, 1))
        b = random_ket(rng, 4, modes=2, scale=rng.uniform(0.1, 1))
        assert tensor(a, b).norm2 == pytest.approx(a.norm2 * b.norm2, rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(complexes.filter(lambda z: abs(z) <= 1), complexes.filter(lambda z: abs(z) <= 1))
def test_tensor_matches_direct_two_mode_coherent(a, b):
    cutoff = 25
    n = np.arange(cutoff + 1)
    amp = lambda z: np.exp(-abs(z) ** 2 / 2) * z**n / np.sqrt(factorial(n))
    direct = FockKet(np.outer(amp(a), amp(b)))
    built = tensor(make_coherent(a, cutoff), make_coherent(b, cutoff))
    assert built.fidelity(direct) == pytest.approx(1.0, abs=1e-10)


def test_vacuum_moments():
    m = quadrature_moments(make_vacuum(5))
    assert (m.mean_x, m.mean_p, m.var_x, m.var_p) == pytest.approx((0, 0, 1, 1))


def test_coherent_moments():
    m = quadrature_moments(make_coherent(1.0, 25))
    assert m.mean_x == pytest.approx(2.0, abs=1e-8)
    assert m.var_x == pytest.approx(1.0, abs=1e-8)
    assert m.var_p == pytest.approx(1.0, abs=1e-8)


def test_single_photon_variance():
    m = quadrature_moments(make_fock(1, 5))
    assert m.var_x == pytest.approx(3.0, abs=1e-14)
    assert m.var_p == pytest.approx(3.0, abs=1e-14)


def test_moments_normalize_subnormalized_kets():
    ket = FockKet(0.3 * make_coherent(0.5, 25).amplitudes)
    m = quadrature_moments(ket)
    assert m.mean_x == pytest.approx(1.0, abs=1e-10)


def test_moments_warn_when_cutoff_is_occupied():
    with pytest.warns(RuntimeWarning):
        quadrature_moments(make_coherent(3.0, 6))


def test_moments_reject_zero_norm():
    with pytest.raises(ValueError):
        quadrature_moments(FockKet(np.zeros(4)))


@settings(max_examples=30, deadline=None)
@given(complexes)
def test_coherent_variance_property(alpha):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        m = quadrature_moments(make_coherent(alpha, 30))
    assert m.var_x == pytest.approx(1.0, abs=1e-6)
    assert m.var_p == pytest.approx(1.0, abs=1e-6)
    assert m.mean_amplitude == pytest.approx(alpha, abs=1e-6)


def test_uncertainty_product(rng):
    for _ in range(30):
        m = quadrature_moments(random_ket(rng, 6, support=4))
        assert m.var_x * m.var_p >= 1 - 1e-9


def test_ladder_expectations_are_unnormalized():
    ket = FockKet(2 * make_fock(1, 4).amplitudes)
    norm2, a1, a2, n = ladder_expectations(ket, 0)
    assert (norm2, n) == pytest.approx((4, 4))
    assert a1 == 0 and a2 == 0


def test_partial_trace_of_product_vacuum():
    rho = partial_trace(make_vacuum(3, modes=2), [0])
    assert rho.matrix[0, 0] == pytest.approx(1)
    assert rho.purity() == pytest.approx(1)


def test_partial_trace_of_tmsv_is_thermal():
    chi = 0.6
    rho = partial_trace(make_tmsv(chi, 30), [1])
    n = np.arange(31)
    np.testing.assert_allclose(np.diag(rho.matrix).real, (1 - chi**2) * chi ** (2 * n), atol=1e-14)
    assert np.abs(rho.matrix - np.diag(np.diag(rho.matrix))).max() < 1e-15


def test_partial_trace_keeps_trace_and_positivity(rng):
    for _ in range(10):
        ket = random_ket(rng, 5, modes=3, scale=rng.uniform(0.2, 1))
        for keep in ([0], [1, 2], [2, 0]):
            rho = partial_trace(ket, keep)
            assert rho.trace == pytest.approx(ket.norm2, abs=1e-12)
            assert rho.is_physical()
            m = rho.matrix
            assert np.abs(m - m.conj().T).max() < 1e-12
        # tracing a density matrix further agrees with tracing the ket directly
        twice = partial_trace(partial_trace(ket, [0, 2]), [1])
        once = partial_trace(ket, [2])
        np.testing.assert_allclose(twice.matrix, once.matrix, atol=1e-13)


def test_partial_trace_reorders_kept_modes(rng):
    ket = random_ket(rng, 3, modes=2)
    swapped = FockKet(ket.amplitudes.T)
    np.testing.assert_allclose(
        partial_trace(ket, [1, 0]).matrix, partial_trace(swapped, [0, 1]).matrix, atol=1e-14
    )


def test_partial_trace_rejects_bad_modes():
    with pytest.raises(ValueError):
        partial_trace(make_vacuum(2, modes=2), [])
    with pytest.raises(ValueError):
        partial_trace(make_vacuum(2, modes=2), [2])


def test_density_matrix_invariants_enforced():
    assert not DensityMatrix.from_matrix(np.array([[1, 1j], [0, 0]]), 1).is_physical()
    with pytest.raises(ValueError):
        DensityMatrix(np.ones((2, 2, 2)))
    bad = DensityMatrix.from_matrix(np.diag([1.5, -0.5]).astype(complex), 1)
    assert not bad.is_physical()


def test_constructors_never_exceed_unit_norm():
    for ket in (make_coherent(1.5, 8), make_tmsv(0.9, 10), make_fock(3, 3), make_vacuum(2, 3)):
        assert ket.norm2 <= 1 + 1e-9
