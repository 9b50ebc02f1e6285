"""Fock-basis simulation of a continuous-variable quantum repeater built from
teleportation links whose entanglement is distilled by noiseless linear
amplifiers (quantum scissors)."""
from .fock import (
    DensityMatrix,
    FockKet,
    QuadratureMoments,
    ladder_expectations,
    make_coherent,
    make_fock,
    make_tmsv,
    make_vacuum,
    partial_trace,
    quadrature_moments,
    tensor,
)
from .integrate import IntegralResult, IntegratorConfig, PlaneProposal, integrate_multi, integrate_plane
from .link import (
    LinkParams,
    LinkResult,
    effective_transmission,
    link_closed,
    link_numeric,
    link_output_state,
    link_success_prob_closed,
    link_variance_closed,
    teleport_through_link,
    tuned_gain,
)
from .negativity import (
    ChannelModel,
    CovarianceMatrix,
    channel_log_negativity,
    eb_bound_check,
    log_negativity_fock,
    log_negativity_gaussian,
    log_negativity_limit,
    protocol_negativity_curve,
)
from .optics import (
    HomodyneOutcome,
    NlaSpec,
    apply_beamsplitter,
    apply_displacement,
    apply_loss,
    apply_nla,
    dual_homodyne_project,
    scissor_circuit,
)
from .repeater import (
    Concat2Params,
    Concat2Result,
    approx_link_success,
    break_even,
    concat2_numeric,
    concat2_output_state,
    nesting_plan,
    repeater_success,
    scaling_table,
)

__version__ = "0.1.0"
