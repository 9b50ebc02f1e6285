# # Truncated Fock states
#
# Every state in the package is a dense complex array with one axis per mode,
# indexed by photon number up to a cutoff. Conditional states produced by
# measurements are left unnormalized: their squared norm is the probability
# (or probability density) of the outcome that produced them.

# %%
import numpy as np

from cvrepeater import make_coherent, make_tmsv, partial_trace, quadrature_moments, tensor

# %% [markdown]
# A coherent state at cutoff 20 loses almost nothing to truncation.

# %%
alpha = 1.0
ket = make_coherent(alpha, 20)
print("norm^2 =", ket.norm2)
print("mean photon number =", ket.photon_distribution(0) @ np.arange(21))

# %% [markdown]
# Quadratures follow X = a + a^dag, so the vacuum variance is 1 and a
# coherent state of amplitude alpha has mean X equal to 2 Re(alpha).

# %%
m = quadrature_moments(make_coherent(1.0, 25))
print(f"mean_x = {m.mean_x:.6f}, var_x = {m.var_x:.6f}, var_p = {m.var_p:.6f}")

# %% [markdown]
# The entangled resource sqrt(1 - chi^2) sum chi^n |n, n>. Tracing one arm
# leaves a thermal state with P(n) = (1 - chi^2) chi^(2n).

# %%
chi = 0.7
epr = make_tmsv(chi, 30)
rho = partial_trace(epr, [0])
n = np.arange(6)
print("reduced P(n):", np.round(np.diag(rho.matrix).real[:6], 5))
print("thermal     :", np.round((1 - chi**2) * chi ** (2 * n), 5))

# %% [markdown]
# Products of states just multiply amplitudes.

# %%
pair = tensor(make_coherent(0.5, 10), make_coherent(-0.3j, 10))
print("two-mode shape:", pair.amplitudes.shape, "norm^2:", round(pair.norm2, 12))
