# # One error-correction link
#
# A state is teleported with entanglement whose remote arm has crossed a
# lossy channel; an amplifier on the remote arm undoes the loss. With gain
# g = 1/(eta^(1/4) chi) the link behaves like a channel of transmission
# sqrt(eta), plus some noise from the scissor's truncation.

# %%
import numpy as np

from cvrepeater import IntegratorConfig, LinkParams, link_closed, link_numeric, tuned_gain

# %% [markdown]
# Closed forms at 1% transmission for a strong and a weak source.

# %%
for chi in (0.7, 0.1):
    r = link_closed(0.01, chi)
    print(f"chi={chi}: g={tuned_gain(0.01, chi):.3f}, eta_eff={r.effective_transmission:.3f}, "
          f"P={r.success_prob:.4g}, V={r.variance:.4f}, delta={r.excess_noise:.4f} "
          f"(bound {r.eb_bound:.2f}, preserved={r.entanglement_preserving})")

# %% [markdown]
# The same numbers from a full Fock simulation, integrated over the
# dual-homodyne outcome on a Gauss-Legendre grid.

# %%
r = link_numeric(LinkParams.tuned(0.01, 0.7, alpha=0.3), IntegratorConfig(radius=8, points=48))
print(f"numeric: P={r.success_prob:.6f}, V={r.variance:.6f}, mean amplitude={r.mean_amplitude.real:.5f} "
      f"(eta^(1/4) alpha = {0.01**0.25 * 0.3:.5f})")

# %% [markdown]
# The variance curves against effective transmission: the weak source
# stays under the 2 eta_eff bound everywhere, the strong one crosses it.

# %%
print(" eta_eff   V(chi=0.1)  V(chi=0.7)  2eta_eff")
for eff in np.linspace(0.05, 0.95, 10):
    weak, strong = link_closed(eff**2, 0.1), link_closed(eff**2, 0.7)
    print(f"  {eff:.2f}     {weak.variance:.4f}     {strong.variance:.4f}     {2 * eff:.2f}")

# %% [markdown]
# Two scissors cut the truncation noise, at a price in probability.

# %%
two = link_numeric(LinkParams.tuned(0.01, 0.7, scissors=2), IntegratorConfig(radius=8, points=48))
print(f"N=2: P={two.success_prob:.5f}, V={two.variance:.5f}")
