"""Concatenated links: scaling laws and the two-link (M = 2) repeater.

In the M = 2 repeater the channel of an outer link is replaced by two nested
links, each over a segment of transmission ``eta`` (direct transmission
``eta**2``). With tuned gains each nested link maps eta -> sqrt(eta), the
pair emulates a channel of transmission eta, and the outer link restores
sqrt(eta).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .fock import FockKet, make_coherent, make_tmsv, tensor
from .integrate import IntegratorConfig, PlaneProposal, integrate_multi
from .link import (
    LinkResult,
    _check_chi,
    _check_eta,
    link_success_prob_closed,
    shifted_ladder,
    teleport_through_link,
    tuned_gain,
)
from .optics import NlaSpec, apply_displacement, apply_nla, as_beta, dual_homodyne_project

SMALL_CHI = 0.1


def _check_power_of_two(M: int) -> int:
    if int(M) != M or M < 1 or (int(M) & (int(M) - 1)):
        raise ValueError(f"link count must be a power of two, got {M}")
    return int(M)


def repeater_success(P: float, M: int) -> float:
    """P_M = P^log2(2M): one heralding level per doubling, ideal memories."""
    if not (0 < P <= 1):
        raise ValueError(f"link probability must lie in (0, 1], got {P}")
    M = _check_power_of_two(M)
    return P ** math.log2(2 * M)


def approx_link_success(eta: float, chi: float, scissors: int = 1) -> float:
    """(eta chi^4)^(N/2): the tuned-gain estimate, valid for g >> 1."""
    _check_eta(eta)
    _check_chi(chi)
    return (eta * chi**4) ** (scissors / 2)


@dataclass(frozen=True)
class NestingPlan:
    """Gains and transmissions for M = 2^k links (k + 1 heralding levels).

    Every level sees a channel of transmission ``eta``: the base links cross
    one segment each, and every higher level crosses a pair of corrected
    sub-channels, each at sqrt(eta).
    """

    eta: float
    link_count: int
    chis: tuple[float, ...]
    gains: tuple[float, ...]

    @property
    def levels(self) -> int:
        return int(math.log2(self.link_count)) + 1

    @property
    def direct_transmission(self) -> float:
        return self.eta**self.link_count

    @property
    def effective_transmission(self) -> float:
        return math.sqrt(self.eta)


def nesting_plan(
    eta: float,
    link_count: int,
    chis: float | Sequence[float],
    gains: Sequence[float | None] | None = None,
) -> NestingPlan:
    """Per-level chi (base level first) with tuned gains unless overridden."""
    _check_eta(eta)
    M = _check_power_of_two(link_count)
    levels = int(math.log2(M)) + 1
    chis = (chis,) * levels if np.isscalar(chis) else tuple(chis)
    if len(chis) != levels:
        raise ValueError(f"need {levels} chi values for M = {M}, got {len(chis)}")
    gains = [None] * levels if gains is None else list(gains)
    if len(gains) != levels:
        raise ValueError(f"need {levels} gains for M = {M}, got {len(gains)}")
    resolved = tuple(tuned_gain(eta, c) if g is None else float(g) for c, g in zip(chis, gains))
    return NestingPlan(eta, M, chis, resolved)


@dataclass(frozen=True)
class BreakEven:
    link_count: int | None
    repeater_prob: float | None
    bare_prob: float | None
    practical: bool
    rows: list = field(repr=False, default_factory=list)


def scaling_table(P: float, eta: float, max_links: int = 2**20) -> list[dict]:
    """Rows {M, P_M, bare, repeater_wins} for M = 1, 2, 4, ..., max_links."""
    rows = []
    M = 1
    while M <= max_links:
        pm = repeater_success(P, M)
        bare = eta ** (M - 0.5)
        rows.append({"M": M, "P_M": pm, "bare": bare, "repeater_wins": pm > bare})
        M *= 2
    return rows


def break_even(
    eta: float,
    chi: float,
    scissors: int = 1,
    prob_floor: float = 0.0,
    max_links: int = 2**20,
    link_prob: float | None = None,
) -> BreakEven:
    """Smallest M with P_M > eta^(M - 1/2).

    Compares single-photon delivery through the repeater, sqrt(eta) P_M,
    with the bare channel eta^M. ``link_prob`` defaults to the tuned-gain
    estimate. No crossing up to ``max_links`` gives ``link_count=None``.
    """
    P = approx_link_success(eta, chi, scissors) if link_prob is None else link_prob
    rows = scaling_table(P, eta, max_links)
    for row in rows:
        if row["repeater_wins"]:
            return BreakEven(row["M"], row["P_M"], row["bare"], row["P_M"] >= prob_floor, rows)
    return BreakEven(None, None, None, False, rows)


@dataclass(frozen=True)
class ConcatIntermediates:
    kappa: np.ndarray | complex
    lam: np.ndarray | complex
    C: np.ndarray | complex


@dataclass(frozen=True)
class Concat2Params:
    """M = 2 repeater: segment transmission ``eta``, nested and outer EPR strengths."""

    eta: float
    chi_inner: float
    chi_outer: float
    gains: tuple[float, float, float]
    alpha: complex = 0j

    def __post_init__(self):
        _check_eta(self.eta)
        _check_chi(self.chi_inner)
        _check_chi(self.chi_outer)
        if any(not g > 0 for g in self.gains):
            raise ValueError("gains must be positive")

    @classmethod
    def tuned(cls, eta, chi_inner, chi_outer, alpha=0j, gains=None) -> "Concat2Params":
        if gains is None:
            g_in = tuned_gain(eta, chi_inner)
            g_out = tuned_gain(eta, chi_outer) if chi_outer > 0 else 1.0
            gains = (g_in, g_in, g_out)
        return cls(eta, chi_inner, chi_outer, tuple(gains), alpha)

    @property
    def direct_transmission(self) -> float:
        return self.eta**2

    @property
    def effective_transmission(self) -> float:
        g1, g2, g3 = self.gains
        s = math.sqrt(self.eta)
        return (g3 * (g1 * s * self.chi_inner) * (g2 * s * self.chi_inner) * self.chi_outer) ** 2


def concat2_intermediates(p: Concat2Params, b1, b2, b3) -> ConcatIntermediates:
    """kappa, lambda and the Gaussian prefactor C of the two-link output.

    Accepts scalars or arrays of outcomes.
    """
    eta, chi, chi3, alpha = p.eta, p.chi_inner, p.chi_outer, p.alpha
    g1, g2, _ = p.gains
    s = math.sqrt(eta)
    u = g1 * s * chi
    A = chi3 * (alpha - b3)
    kappa = 1 + u * (A - b1) * (-u * np.conj(b1) + np.conj(b2))
    lam = chi * (u * (A - b1) + kappa * (u * b1 - b2))
    C = (
        np.sqrt((1 - chi3**2) / np.pi)
        * np.exp(0.5 * np.abs(alpha - b3) ** 2 * (chi3**2 - 1))
        * (1 - chi**2)
        / np.pi
        / np.sqrt((1 + g1**2) * (1 + g2**2))
        * np.exp(u * (b1 * np.conj(b2) - np.conj(b1) * b2) / 2)
        * np.exp(0.5 * np.abs(A - b1) ** 2 * (chi**2 - 1 - eta * chi**2))
        * np.exp(-np.abs(u * b1 - b2) ** 2 / 2)
    )
    return ConcatIntermediates(kappa, lam, C)


def concat2_coefficients(p: Concat2Params, b1, b2, b3):
    """Bracket amplitudes (c00, c10, c01, c11) over (B, C), prefactor included,
    before the final displacement D_B(g3 sqrt(eta) chi_outer beta3)."""
    eta, chi = p.eta, p.chi_inner
    _, g2, g3 = p.gains
    s = math.sqrt(eta)
    im = concat2_intermediates(p, b1, b2, b3)
    k = g2 * s * chi * b2
    pref = im.C * np.exp(-np.abs(k) ** 2 / 2) / math.sqrt(g3**2 + 1)
    kappa, lam = im.kappa, im.lam
    c00 = kappa - lam * g2 * s * np.conj(k)
    c10 = kappa * k * g3 + lam * g2 * g3 * s * (1 - np.abs(k) ** 2)
    c01 = lam * math.sqrt(1 - eta)
    c11 = lam * math.sqrt(1 - eta) * k * g3
    return pref * c00, pref * c10, pref * c01, pref * c11


def _outer_shift(p: Concat2Params, b3):
    return p.gains[2] * math.sqrt(p.eta) * p.chi_outer * b3


def concat2_output_state(p: Concat2Params, b1, b2, b3, cutoff: int = 10) -> FockKet:
    """Closed-form two-link output on modes (B, C), truncated to first order in
    the nested EPR strength."""
    if p.chi_inner > SMALL_CHI:
        warnings.warn(
            f"chi_inner = {p.chi_inner} > {SMALL_CHI}: first-order truncation is inaccurate",
            RuntimeWarning,
            stacklevel=2,
        )
    b1, b2, b3 = as_beta(b1), as_beta(b2), as_beta(b3)
    c00, c10, c01, c11 = concat2_coefficients(p, b1, b2, b3)
    amps = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
    amps[0, 0], amps[1, 0], amps[0, 1], amps[1, 1] = c00, c10, c01, c11
    return apply_displacement(FockKet(amps), 0, _outer_shift(p, b3))


def outer_link_state(p: Concat2Params, b3, inner_transmission: float = 1.0, cutoff: int = 10) -> FockKet:
    """Outer link alone with the nested links replaced by a pure-loss channel.

    ``inner_transmission=1`` bypasses the nested links entirely.
    """
    b3 = as_beta(b3)
    chi3, g3 = p.chi_outer, p.gains[2]
    t = math.sqrt(inner_transmission)
    A = chi3 * (p.alpha - b3)
    pref = (
        math.sqrt((1 - chi3**2) / math.pi)
        * math.exp(0.5 * abs(p.alpha - b3) ** 2 * (chi3**2 - 1))
        * math.exp(-abs(t * A) ** 2 / 2)
        / math.sqrt(g3**2 + 1)
    )
    amps = np.zeros(cutoff + 1, dtype=complex)
    amps[0], amps[1] = pref, pref * g3 * t * A
    return apply_displacement(FockKet(amps), 0, g3 * t * chi3 * b3)


def concat2_pipeline_state(p: Concat2Params, b1, b2, b3, cutoff: int = 10) -> FockKet:
    """Exact Fock simulation of the two-link repeater for fixed outcomes.

    Returns modes (C1, B, C2): the first nested link's loss mode, the output
    and the second nested link's loss mode.
    """
    b1, b2, b3 = as_beta(b1), as_beta(b2), as_beta(b3)
    g1, g2, g3 = p.gains
    state = tensor(make_coherent(p.alpha, cutoff), make_tmsv(p.chi_outer, cutoff))
    state = dual_homodyne_project(state, 0, 1, b3)  # [B3]
    state = teleport_through_link(state, 0, p.chi_inner, p.eta, NlaSpec(g1), b1)  # [B1, C1]
    state = teleport_through_link(state, 0, p.chi_inner, p.eta, NlaSpec(g2), b2)  # [C1, B2, C2]
    state = apply_nla(state, 1, NlaSpec(g3))
    return apply_displacement(state, 1, _outer_shift(p, b3))


@dataclass(frozen=True)
class Concat2Result(LinkResult):
    """Two-link repeater figures of merit.

    ``success_prob`` counts heralding levels as in the scaling law: the two
    nested links run in parallel with ideal memories, so the level-1 cost is
    one nested-link probability, giving joint / P_nested. ``joint_success_prob``
    is the single-shot probability that all three amplifiers herald.
    """

    joint_success_prob: float = 0.0
    nested_link_prob: float = 1.0
    direct_transmission: float = 0.0
    samples_used: int = 0


def _proposals(p: Concat2Params, inflate: float):
    """Gaussian chain following the exponents of C (order: beta3, beta1, beta2)."""
    eta, chi, chi3 = p.eta, p.chi_inner, p.chi_outer
    g1, g2, _ = p.gains
    s = math.sqrt(eta)
    u = g1 * s * chi
    k2 = (g2 * s * chi) ** 2
    w3 = math.sqrt(inflate / (1 - chi3**2))
    w1 = math.sqrt(inflate / (1 - chi**2 + eta * chi**2))
    w2 = math.sqrt(inflate / (1 + k2))
    return [
        PlaneProposal(p.alpha, w3),
        PlaneProposal(lambda prev: chi3 * (p.alpha - prev[0]), w1),
        PlaneProposal(lambda prev: u * prev[1] / (1 + k2), w2),
    ]


def concat2_numeric(
    p: Concat2Params,
    config: IntegratorConfig | None = None,
    inflate: float = 1.25,
) -> Concat2Result:
    """Average the closed-form two-link output over beta1, beta2, beta3 by
    importance-sampled Monte Carlo.

    The proposal is a chain of complex Gaussians centred on each outcome's
    conditional peak with widths from the Gaussian prefactors (variances
    scaled by ``inflate``). Standard errors for V come from the delta method.
    """
    config = config or IntegratorConfig(scheme="monte-carlo", samples=1_000_000)

    def f(b3, b1, b2):
        c00, c10, c01, c11 = concat2_coefficients(p, b1, b2, b3)
        norm2 = np.abs(c00) ** 2 + np.abs(c10) ** 2 + np.abs(c01) ** 2 + np.abs(c11) ** 2
        a1 = np.conj(c00) * c10 + np.conj(c01) * c11
        n = np.abs(c10) ** 2 + np.abs(c11) ** 2
        norm2, a1, a2, n = shifted_ladder(norm2, a1, 0.0, n, _outer_shift(p, b3))
        x1 = 2 * a1.real
        x2 = 2 * a2.real + 2 * n + norm2
        p1 = 2 * a1.imag
        p2 = -2 * a2.real + 2 * n + norm2
        return np.stack([norm2, x1, x2, p1, p2])

    res = integrate_multi(f, _proposals(p, inflate), config)
    S0, S1, S2, T1, T2 = res.value
    cov = res.covariance
    mx, mp = S1 / S0, T1 / S0
    V = S2 / S0 - mx**2
    Vp = T2 / S0 - mp**2
    # dV/d(S0, S1, S2) for the delta-method standard error
    grad = np.array([-S2 / S0**2 + 2 * S1**2 / S0**3, -2 * S1 / S0**2, 1 / S0, 0, 0])
    v_se = math.sqrt(max(grad @ cov @ grad, 0.0))
    nested = link_success_prob_closed(p.eta, p.chi_inner, p.gains[0])
    return Concat2Result(
        success_prob=S0 / nested,
        variance=V,
        variance_p=Vp,
        effective_transmission=p.effective_transmission,
        mean_amplitude=complex(mx, mp) / 2,
        error_estimate={
            "success_prob": float(res.error_estimate[0]) / nested,
            "joint_success_prob": float(res.error_estimate[0]),
            "variance": v_se,
        },
        converged=res.converged,
        joint_success_prob=float(S0),
        nested_link_prob=nested,
        direct_transmission=p.direct_transmission,
        samples_used=res.samples_used,
    )
