# # The noiseless linear amplifier and the quantum scissor
#
# An ideal amplifier would map |n> to g^n |n>. The heralded N-scissor version
# keeps photon numbers up to N and rescales them; one scissor turns
# a|0> + b|1> into (a|0> + g b|1>)/sqrt(g^2 + 1).

# %%
import numpy as np

from cvrepeater import FockKet, NlaSpec, apply_nla, scissor_circuit
from cvrepeater.optics import gain_to_splitting, nla_success_estimate

# %%
ket = FockKet(np.array([1, 1, 0, 0]) / np.sqrt(2))
out = apply_nla(ket, 0, NlaSpec(gain=2.0))
print("amplified amplitudes:", np.round(out.amplitudes, 5))
print("success probability :", round(out.norm2, 5))

# %% [markdown]
# The physical circuit: a single photon split on a beamsplitter of
# reflectivity xi = 1/(g^2+1), one arm interfered with the input on a 50:50
# beamsplitter, success when the two detectors see one photon and none. Both
# detector patterns herald; the mirrored one needs a phase flip on |1>.

# %%
for g in (0.5, 1.0, 2.0, 5.0):
    rng = np.random.default_rng(int(g * 10))
    amps = rng.normal(size=4) + 1j * rng.normal(size=4)
    amps[3] = 0
    ket = FockKet(amps / np.linalg.norm(amps))
    circuit = scissor_circuit(ket, 0, g)
    ideal = apply_nla(ket, 0, NlaSpec(g))
    overlap = abs(np.vdot(circuit.amplitudes, ideal.amplitudes)) / np.sqrt(circuit.norm2 * ideal.norm2)
    print(f"g={g:<4} xi={gain_to_splitting(g):.3f} overlap={overlap:.12f} "
          f"P={circuit.norm2:.5f} (ideal {ideal.norm2:.5f}, rough estimate {nla_success_estimate(NlaSpec(g)):.5f})")

# %% [markdown]
# Keeping only one detector pattern halves the success probability.

# %%
single = scissor_circuit(FockKet(np.array([1.0, 0, 0])), 0, 1.0, patterns="single")
print("vacuum, g=1, one pattern:", single.norm2)
