r"""Heralding a superposition of subtraction and addition
=====================================================

A weakly reflecting beam splitter removes a photon from the signal beam. A
weak parametric amplifier adds one. Sending both heralding paths through a
second beam splitter erases which of the two happened, and a single click
then heralds the coherent operation ``t a + r a^dag``.

This demo simulates the whole four-mode circuit exactly and compares the
conditional state with the ideal operation.
"""

import warnings

from ghostfock import fock
from ghostfock.sources import (CoherentOpParams, HeraldSpec, apply_coherent_op, build_tmss, herald_params,
                               simulate_herald_circuit)

######################################################################
# The (t, r) realized by a given setting
# --------------------------------------
# To first order in the weak squeezing ``s0`` and the beam-splitter
# reflectivity, each detector heralds a fixed (t, r).

spec = HeraldSpec(s0=0.05, t1=0.99, t2=0.8, detector="PD1")
p = herald_params(spec)
print(f"PD1 click heralds t={p.t:.5f}, r={p.r:.5f}")

######################################################################
# Exact conditional state
# -----------------------
# The input is a twin beam with s=0.1 on (signal, idler). Two vacuum
# ancillas are appended, the circuit is applied, and the ancillas are
# projected onto the click pattern.

source = build_tmss(0.1)
result = simulate_herald_circuit(source, spec)
print(f"success probability {result.success_probability:.4e}")
print(f"fidelity to (t a + r a^dag)|psi>: {result.fidelity_to_target:.7f}")

######################################################################
# Scanning the eraser
# -------------------
# With ``t2 = 1`` nothing is erased: PD1 heralds pure subtraction and PD2
# pure addition. Lowering ``t2`` mixes the two.

for t2 in (1.0, 0.9, 0.8, 0.6):
    for det in ("PD1", "PD2"):
        res = simulate_herald_circuit(source, HeraldSpec(0.05, 0.99, t2, det))
        tp = res.target_params
        print(f"t2={t2:.1f} {det}: (t, r)=({tp.t:+.4f}, {tp.r:.4f}) fidelity {res.fidelity_to_target:.6f}")

######################################################################
# Where the first-order picture breaks
# ------------------------------------
# Larger ``s0`` lets the amplifier emit two pairs, which the ideal map
# ignores. The settings object warns. On this weak input the fidelity
# only slips in the fourth decimal, because two-pair events stay rare.

with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter("always")
    strong = HeraldSpec(0.4, 0.99, 0.8, "PD1")
print("warning:", caught[0].message)
res = simulate_herald_circuit(source, strong, ancilla_cutoff=12)
print(f"fidelity at s0=0.4: {res.fidelity_to_target:.5f}")

######################################################################
# The ideal operation on its own
# ------------------------------
# ``apply_coherent_op`` returns the normalized image and its success
# weight, which on a twin beam equals sinh^2 s + r^2.

state, weight = apply_coherent_op(source, CoherentOpParams.from_r(0.3))
print(f"success weight {weight:.6f}, mean signal photons {fock.number_expectation(state, 0):.6f}")
