# # Scaling with distance
#
# With ideal memories, M links need log2(2M) heralding levels, so the
# success probability falls polynomially, P^log2(2M), while the bare
# channel falls exponentially. For single-photon delivery the bare figure is
# eta^(M - 1/2).

# %%
from cvrepeater import approx_link_success, break_even, scaling_table

# %%
eta, chi, N = 0.04, 0.9, 3
P = approx_link_success(eta, chi, N)
print(f"per-link estimate P = {P:.4g}")
for row in scaling_table(P, eta, 32):
    print(f"M={row['M']:>3}  repeater {row['P_M']:.3e}  bare {row['bare']:.3e}  wins={row['repeater_wins']}")

# %% [markdown]
# The break-even link count, and how it moves with the channel.

# %%
for eta in (0.01, 0.04, 0.1, 0.3):
    be = break_even(eta, chi, N)
    print(f"eta={eta}: M*={be.link_count}, P_M={be.repeater_prob:.2e}")
