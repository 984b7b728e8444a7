r"""Working in a truncated Fock space
====================================

Every state in ghostfock is a dense array of amplitudes indexed by photon
numbers, one axis per mode. This demo builds a few states by hand, passes
them through a beam splitter and a two-mode squeezer, and shows how the
library keeps track of probability that falls past the cutoff.

Run with ``python3 demos/01_fock_engine.py``.
"""

import math

import numpy as np

from ghostfock import fock
from ghostfock.errors import TruncationOverflow
from ghostfock.fock import FockConfig
from ghostfock.sources import build_tmss

######################################################################
# Building states
# ---------------
# ``fock_state`` places all amplitude on one occupation pattern, and
# ``superposition`` normalizes a dictionary of patterns.

one_one = fock.fock_state((1, 1), cutoff=4)
bell = fock.superposition({(1, 0): 1.0, (0, 1): 1.0}, cutoff=4)
print("|1,1> mean photon numbers:", fock.number_expectation(one_one, 0), fock.number_expectation(one_one, 1))
print("Bell amplitudes on (1,0) and (0,1):", bell.amplitude(1, 0), bell.amplitude(0, 1))

######################################################################
# Hong-Ou-Mandel interference
# ---------------------------
# Two photons meeting on a balanced beam splitter never leave by different
# ports. The |1,1> amplitude of the output vanishes to machine precision.

half = 1 / math.sqrt(2)
hom = fock.apply_beam_splitter(one_one, 0, 1, half, half)
print("HOM output P(1,1) =", abs(hom.amplitude(1, 1)) ** 2)
print("HOM output P(2,0), P(0,2) =", abs(hom.amplitude(2, 0)) ** 2, abs(hom.amplitude(0, 2)) ** 2)

######################################################################
# Squeezing vacuum
# ----------------
# The two-mode squeezer acting on vacuum produces the twin-beam state whose
# amplitudes are tanh^k(s) / cosh(s). The exact closed form in
# ``build_tmss`` and the unitary evolution agree.

s = 0.35
evolved = fock.apply_two_mode_squeezer(fock.vacuum(2, 40), 0, 1, s)
closed = build_tmss(s)
print(f"fidelity(unitary, closed form) at s={s}: {fock.fidelity(fock.normalize(evolved), closed):.15f}")
print(f"mean photons per arm: {fock.number_expectation(closed, 0):.6f} (sinh^2 s = {math.sinh(s) ** 2:.6f})")
print(f"probability beyond the cutoff: {closed.leaked_norm:.3e}")

######################################################################
# When the cutoff is too small
# ----------------------------
# Unitaries are exponentiated on a buffered space and then cut back. If the
# discarded tail exceeds the leak tolerance the library refuses to continue
# rather than silently returning a wrong state.

tight = FockConfig(cutoff=8, buffer=10, leak_tolerance=1e-10)
try:
    fock.apply_two_mode_squeezer(fock.vacuum(2, 8), 0, 1, 0.75, config=tight)
except TruncationOverflow as exc:
    print("as expected:", exc)

######################################################################
# Joint photon statistics
# -----------------------
# ``joint_pnd`` gives the photon-number distribution over both modes, and
# ``moment`` reads off <n_s^p n_i^q>. For the twin beam the counts are
# perfectly correlated, so the distribution sits on the diagonal.

pnd = fock.joint_pnd(closed).probabilities
print("mass off the diagonal:", pnd.sum() - np.trace(pnd))
print("<n_s n_i> =", fock.moment(closed, 1, 1))
