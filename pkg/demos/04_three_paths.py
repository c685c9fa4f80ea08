"""
Three paths: the duality becomes a strict inequality
====================================================

With N = 3 the optimal measurement has no closed form; the fixed-point
POVM optimiser supplies P_s.
"""

import numpy as np

from coherence_duality import build_path_detector_state, extract_ensemble, optimize_povm
from coherence_duality.measures import path_coherence
from coherence_duality.qmath import rand_haar_state

rng = np.random.default_rng(0)
lhs = []
for _ in range(200):
    psi = build_path_detector_state(rng.dirichlet(np.ones(3)),
                                    [rand_haar_state(3, rng) for _ in range(3)])
    c = path_coherence(psi, 3).c_normalized
    povm, ps = optimize_povm(extract_ensemble(psi, 3))
    lhs.append((ps - 1 / 3) ** 2 + c ** 2)
lhs = np.array(lhs)
print(f"(P_s-1/3)^2 + C^2 over 200 random states: min={lhs.min():.4f} max={lhs.max():.4f}"
      f"  bound={4 / 9:.4f}")

###############################################################################
# Symmetric trine detector states with uniform priors reach P_s = 2/3.

trine = [np.array([np.cos(k * np.pi / 3), np.sin(k * np.pi / 3)]) for k in range(3)]
psi = build_path_detector_state(np.full(3, 1 / 3), trine)
povm, ps = optimize_povm(extract_ensemble(psi, 3))
print(f"trine: P_s={ps:.10f}  C={path_coherence(psi, 3).c_normalized:.4f}  converged={povm.converged}")
