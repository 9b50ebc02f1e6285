"""One error-correction link: CV teleportation through NLA-distilled entanglement.

The input mode A and the local EPR arm R are measured by dual homodyne
detection; the remote arm B has crossed a lossy channel of transmission
``eta`` and is amplified by the NLA before a displacement by the scaled
measurement result.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fock import FockKet, ladder_expectations, make_coherent, make_tmsv, moments_from_ladder, tensor
from .integrate import IntegratorConfig, integrate_plane
from .optics import (
    NlaSpec,
    apply_displacement,
    apply_nla,
    as_beta,
    attach_loss_mode,
    dual_homodyne_project,
)


def _check_eta(eta):
    if not (0 < eta <= 1):
        raise ValueError(f"transmission must lie in (0, 1], got {eta}")


def _check_chi(chi):
    if not (0 <= chi < 1):
        raise ValueError(f"EPR strength must satisfy 0 <= chi < 1, got {chi}")


@dataclass(frozen=True)
class LinkParams:
    eta: float
    chi: float
    nla: NlaSpec
    alpha: complex = 0j

    def __post_init__(self):
        _check_eta(self.eta)
        _check_chi(self.chi)

    @classmethod
    def tuned(cls, eta: float, chi: float, scissors: int = 1, alpha: complex = 0j) -> "LinkParams":
        return cls(eta, chi, NlaSpec(tuned_gain(eta, chi), scissors), alpha)

    @property
    def gain(self) -> float:
        return self.nla.gain

    @property
    def amplitude_gain(self) -> float:
        """g sqrt(eta) chi: the teleported coherent amplitude per unit input."""
        return self.nla.gain * math.sqrt(self.eta) * self.chi


@dataclass(frozen=True)
class LinkResult:
    success_prob: float
    variance: float
    effective_transmission: float
    variance_p: float | None = None
    mean_amplitude: complex = 0j
    error_estimate: dict = field(default_factory=dict)
    converged: bool = True

    @property
    def excess_noise(self) -> float:
        return self.variance - 1.0

    @property
    def eb_bound(self) -> float:
        return 2.0 * self.effective_transmission

    @property
    def entanglement_preserving(self) -> bool:
        """delta < 2 eta_eff. Sufficient for distributing entanglement, not necessary."""
        return self.excess_noise < self.eb_bound


def tuned_gain(eta: float, chi: float) -> float:
    """g = 1/(eta^(1/4) chi), which makes the link's effective transmission sqrt(eta)."""
    _check_eta(eta)
    _check_chi(chi)
    if chi == 0:
        raise ValueError("gain tuning needs chi > 0")
    return 1.0 / (eta**0.25 * chi)


def effective_transmission(eta: float, chi: float, gain: float) -> float:
    return (gain * math.sqrt(eta) * chi) ** 2


def link_success_prob_closed(eta: float, chi: float, gain: float) -> float:
    """Single-scissor success probability integrated over all homodyne outcomes."""
    c2, g2 = chi * chi, gain * gain
    return (1 - c2) * (c2 * (eta * g2 + eta - 1) + 1) / ((g2 + 1) * ((eta - 1) * c2 + 1) ** 2)


def link_variance_closed(eta: float, chi: float, gain: float) -> float:
    """Single-scissor output quadrature variance, averaged over outcomes (vacuum = 1)."""
    c2, g2 = chi * chi, gain * gain
    num = c2 * (eta * (g2 + c2 * (4 * eta * g2 * g2 + (eta - 1) * g2 + eta - 2) + 2) + c2 - 2) + 1
    den = ((eta - 1) * c2 + 1) * (c2 * (eta * g2 + eta - 1) + 1)
    return num / den


def link_closed(eta: float, chi: float, gain: float | None = None) -> LinkResult:
    """Closed-form single-scissor link; ``gain=None`` applies the tuning rule."""
    _check_eta(eta)
    _check_chi(chi)
    g = tuned_gain(eta, chi) if gain is None else gain
    V = link_variance_closed(eta, chi, g)
    return LinkResult(
        success_prob=link_success_prob_closed(eta, chi, g),
        variance=V,
        variance_p=V,
        effective_transmission=effective_transmission(eta, chi, g),
    )


def link_output_state(params: LinkParams, outcome, cutoff: int = 20) -> FockKet:
    """Unnormalized output for one outcome; its squared norm is the success density.

    For a single scissor this is the printed closed form
    sqrt((1-chi^2)/((1+g^2) pi)) exp(|alpha-beta|^2 (chi^2-1-eta chi^2)/2)
    D(g sqrt(eta) chi beta)(|0> + g sqrt(eta) chi (alpha-beta)|1>).
    More scissors go through the Fock pipeline (loss mode traced as a pure
    product, so only the output mode is returned).
    """
    beta = as_beta(outcome)
    if params.nla.scissors != 1:
        ket = link_pipeline_state(params, beta, cutoff)
        # the loss mode is in a coherent state for coherent inputs: fold it away
        amps = ket.amplitudes
        u, s, vh = np.linalg.svd(amps)
        return FockKet(u[:, 0] * s[0] * np.exp(1j * np.angle(vh[0, 0])))
    eta, chi, g = params.eta, params.chi, params.gain
    d = params.alpha - beta
    pref = math.sqrt((1 - chi**2) / ((1 + g**2) * math.pi)) * math.exp(
        0.5 * abs(d) ** 2 * (chi**2 - 1 - eta * chi**2)
    )
    amps = np.zeros(cutoff + 1, dtype=complex)
    amps[0] = pref
    amps[1] = pref * params.amplitude_gain * d
    return apply_displacement(FockKet(amps), 0, params.amplitude_gain * beta)


def teleport_through_link(
    ket: FockKet,
    mode: int,
    chi: float,
    eta: float,
    nla: NlaSpec,
    outcome,
    displacement_gain: float | None = None,
    displace: bool = True,
) -> FockKet:
    """Run ``mode`` of ``ket`` through one link for a fixed homodyne outcome.

    The input mode is consumed; the link's output mode and its loss mode are
    appended (in that order) after the untouched modes.
    """
    beta = as_beta(outcome)
    k = ket.mode_count
    state = tensor(ket, make_tmsv(chi, ket.cutoff))  # R = k, B = k + 1
    state = dual_homodyne_project(state, mode, k, beta)
    out = state.mode_count - 1
    state = attach_loss_mode(state, out, eta)
    state = apply_nla(state, out, nla)
    if displace:
        gain = nla.gain * math.sqrt(eta) * chi if displacement_gain is None else displacement_gain
        state = apply_displacement(state, out, gain * beta)
    return state


def link_pipeline_state(params: LinkParams, outcome, cutoff: int = 15, displace: bool = True) -> FockKet:
    """Full Fock simulation of a link with a coherent input; modes (B, loss)."""
    source = make_coherent(params.alpha, cutoff)
    return teleport_through_link(
        source, 0, params.chi, params.eta, params.nla, outcome, displace=displace
    )


def shifted_ladder(norm2, a1, a2, n, gamma):
    """Ladder expectations after D(gamma), from D^dag a D = a + gamma."""
    a1_d = a1 + gamma * norm2
    a2_d = a2 + 2 * gamma * a1 + gamma**2 * norm2
    n_d = n + 2 * (np.conj(gamma) * a1).real + abs(gamma) ** 2 * norm2
    return norm2, a1_d, a2_d, n_d


def link_numeric(
    params: LinkParams,
    config: IntegratorConfig | None = None,
    cutoff: int = 15,
) -> LinkResult:
    """Success probability and ensemble moments by integrating the Fock pipeline.

    Moments are ensemble averages over outcomes,
    <O> = (1/P) int <psi(beta)|O|psi(beta)> d^2 beta.
    """
    config = config or IntegratorConfig()
    source = make_coherent(params.alpha, cutoff)
    shift = params.amplitude_gain

    def f(betas):
        out = np.empty((6, betas.size))
        for i, beta in enumerate(betas):
            ket = teleport_through_link(
                source, 0, params.chi, params.eta, params.nla, beta, displace=False
            )
            norm2, a1, a2, n = shifted_ladder(*ladder_expectations(ket, 0), shift * beta)
            out[:, i] = norm2, a1.real, a1.imag, a2.real, a2.imag, n
        return out

    res = integrate_plane(f, config)
    norm2, a1r, a1i, a2r, a2i, n = res.value
    m = moments_from_ladder(norm2, complex(a1r, a1i), complex(a2r, a2i), n)
    err = np.asarray(res.error_estimate)
    return LinkResult(
        success_prob=float(norm2),
        variance=m.var_x,
        variance_p=m.var_p,
        effective_transmission=effective_transmission(params.eta, params.chi, params.gain),
        mean_amplitude=m.mean_amplitude,
        error_estimate={"success_prob": float(err[0]), "moments": float(err[1:].max() / norm2)},
        converged=res.converged,
    )
