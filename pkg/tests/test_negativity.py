import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cvrepeater import (
    ChannelModel,
    Concat2Params,
    CovarianceMatrix,
    IntegratorConfig,
    channel_log_negativity,
    concat2_numeric,
    eb_bound_check,
    link_closed,
    log_negativity_fock,
    log_negativity_gaussian,
    log_negativity_limit,
    make_tmsv,
    make_vacuum,
    protocol_negativity_curve,
    tensor,
)
from cvrepeater.fock import partial_trace
from cvrepeater.negativity import epr_through_channel, symplectic_eigenvalues, tmsv_covariance
from cvrepeater.optics import apply_loss


def test_eb_bound_check():
    assert eb_bound_check(0.0, 1e-9)
    assert eb_bound_check(0.126, 0.1)
    assert not eb_bound_check(0.2, 0.1)
    with pytest.raises(ValueError):
        eb_bound_check(-0.1, 0.1)


def test_channel_model_validation():
    for bad in (dict(transmission=0.0), dict(transmission=1.5), dict(transmission=0.5, excess_noise=-1e-3)):
        with pytest.raises(ValueError):
            ChannelModel(**bad)


def test_covariance_validation():
    with pytest.raises(ValueError):
        CovarianceMatrix(np.eye(3))
    with pytest.raises(ValueError):
        CovarianceMatrix(np.array([[1.0, 0.2], [0.0, 1.0]]))
    squeezed_too_far = CovarianceMatrix(np.diag([0.5, 0.5]))
    assert not squeezed_too_far.is_physical()
    with pytest.raises(ValueError):
        log_negativity_gaussian(CovarianceMatrix(np.diag([0.5, 0.5, 1, 1])))


def test_lossless_channel_keeps_tmsv():
    cov = epr_through_channel(0.6, ChannelModel(1.0, 0.0)).cov
    np.testing.assert_allclose(cov, tmsv_covariance(0.6).cov, atol=1e-14)


def test_tmsv_symplectic_spectrum():
    nus = symplectic_eigenvalues(tmsv_covariance(0.5).cov)
    np.testing.assert_allclose(nus, [1.0, 1.0], atol=1e-12)


def test_gaussian_negativity_examples():
    assert log_negativity_gaussian(CovarianceMatrix(np.eye(4))) == 0.0
    assert log_negativity_gaussian(tmsv_covariance(0.5)) == pytest.approx(math.log2(3), abs=1e-12)
    assert channel_log_negativity(ChannelModel(1 / 3)) == pytest.approx(1.0, abs=1e-12)


def test_negativity_limit():
    assert log_negativity_limit(Fraction(1, 3)) == 1.0
    assert log_negativity_limit(1 / 3) == pytest.approx(1.0, abs=1e-15)
    assert log_negativity_limit(0.5) == pytest.approx(math.log2(3), abs=1e-14)
    assert 0 < log_negativity_limit(1e-12) < 1e-11
    for bad in (0.0, 1.0):
        with pytest.raises(ValueError):
            log_negativity_limit(bad)


def test_strong_squeezing_approaches_limit():
    eta = 0.3
    values = [channel_log_negativity(ChannelModel(eta), chi) for chi in (0.9, 0.99, 0.999, 0.9999)]
    assert all(a < b for a, b in zip(values, values[1:]))
    assert values[-1] == pytest.approx(log_negativity_limit(eta), abs=1e-3)


def test_bound_saturation_gives_zero_in_limit():
    for eta in (0.01, 0.2, 0.7):
        assert channel_log_negativity(ChannelModel(eta, 2 * eta)) == pytest.approx(0.0, abs=1e-15)
        assert channel_log_negativity(ChannelModel(eta, 2 * eta * 0.99)) > 0


def test_fock_negativity_of_product_state():
    assert log_negativity_fock(tensor(make_vacuum(4), make_vacuum(4))) == pytest.approx(0.0, abs=1e-8)


def test_fock_negativity_of_tmsv():
    assert log_negativity_fock(make_tmsv(0.3, 8)) == pytest.approx(math.log2(13 / 7), abs=1e-3)


def test_fock_negativity_guard():
    with pytest.raises(ValueError):
        log_negativity_fock(make_tmsv(0.3, 9))


@pytest.mark.parametrize("chi", [0.05, 0.1, 0.2, 0.3])
@pytest.mark.parametrize("eta", [0.3, 0.5, 0.7, 0.9])
def test_gaussian_and_fock_negativity_agree(chi, eta):
    rho = partial_trace(apply_loss(make_tmsv(chi, 8), 1, eta), [0, 1])
    fock = log_negativity_fock(rho)
    gauss = log_negativity_gaussian(epr_through_channel(chi, ChannelModel(eta)))
    assert fock == pytest.approx(gauss, abs=1e-3)


def test_limit_is_strictly_increasing():
    etas = np.linspace(1e-4, 0.999, 2000)
    vals = np.array([log_negativity_limit(e) for e in etas])
    assert np.all(np.diff(vals) > 0)


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-4, 0.999), st.floats(1e-6, 3.0))
def test_noise_lowers_negativity(eta, delta):
    assert channel_log_negativity(ChannelModel(eta, delta)) < log_negativity_limit(eta)


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-4, 1.0), st.floats(0.0, 1.0))
def test_bound_implies_entanglement(eta, frac):
    delta = 2 * eta * frac
    if eb_bound_check(delta, eta):
        assert channel_log_negativity(ChannelModel(eta, delta)) > 0


def test_noiseless_square_root_channel_beats_bare_channel():
    etas = np.logspace(-6, math.log10(0.999), 60)
    points = [(e, math.sqrt(e), 0.0) for e in etas]
    assert all(p.outperforms for p in protocol_negativity_curve(points))


def test_single_link_outperforms_somewhere():
    etas = np.logspace(-4, math.log10(0.99), 40)
    pts = []
    for e in etas:
        r = link_closed(e, 0.01)
        pts.append((e, r.effective_transmission, r.excess_noise))
    curve = protocol_negativity_curve(pts)
    flags = [p.outperforms for p in curve]
    assert any(flags) and not all(flags)
    # the region is the high-loss end
    first_loss = flags.index(False)
    assert all(flags[:first_loss]) and not any(flags[first_loss:])


def test_finite_source_squeezing_lowers_curve():
    r = link_closed(0.01, 0.01)
    pt = (0.01, r.effective_transmission, r.excess_noise)
    (inf,) = protocol_negativity_curve([pt])
    (fin,) = protocol_negativity_curve([pt], chi_source=0.9)
    assert 0 < fin.protocol < inf.protocol


def test_concat_curve_outperforms_only_at_small_transmission():
    cfg = IntegratorConfig(scheme="monte-carlo", samples=100_000, batch_size=50_000, seed=5)
    pts = []
    for eta_eff in (0.005, 0.02, 0.3):
        p = Concat2Params.tuned(eta_eff**2, 0.01, 0.7)
        r = concat2_numeric(p, cfg)
        pts.append((p.direct_transmission, r.effective_transmission, r.excess_noise))
    flags = [pt.outperforms for pt in protocol_negativity_curve(pts)]
    assert flags == [True, True, False]


def test_single_link_curve_turns_over_at_low_loss():
    # truncation noise grows with the effective transmission, so the protocol's
    # negativity peaks near eta_direct ~ 0.1 and falls off towards eta = 1
    etas = np.logspace(-3, math.log10(0.99), 200)
    vals = []
    for e in etas:
        r = link_closed(e, 0.01)
        vals.append(channel_log_negativity(ChannelModel(r.effective_transmission, r.excess_noise)))
    peak = etas[int(np.argmax(vals))]
    assert 0.05 < peak < 0.2
    assert vals[-1] < 0.1 * max(vals)
