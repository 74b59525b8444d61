"""The half-normal law splits as |U| = |U|**alpha * X_alpha.

X_alpha has the Wright-function density
2**((alpha+1)/2) W_{-alpha,(1-alpha)/2}(-2**(alpha-1) t**2). The script also
iterates the functional equation behind the characterization: along the
orbit s -> alpha s + 1 - alpha the normalised transform h stays at 1/sqrt(pi).
"""

import math

import numpy as np

import selfdecomp as sd
from selfdecomp.verify import gaussian_residual_via_foxh

alpha = 0.5
t = np.geomspace(0.01, 6, 8)
wright = sd.gaussian_residual_density(t, alpha)
fox = gaussian_residual_via_foxh(t, alpha)
for ti, a, b in zip(t, wright, fox):
    print(f"t = {ti:7.4f}  Wright form {a:.14f}  Fox H form {b:.14f}")

# the half-normal can be drawn by folding a Gaussian or through U**2/2 ~ gamma(1/2)
for method in ("fold", "gamma"):
    rep = sd.verify_gaussian_decomposition(alpha, halfnormal_method=method)
    print(method, "pass" if rep.passed else "FAIL",
          {s.test_id: round(s.metric, 14) for s in rep.details["subchecks"]})

trace = sd.characterization_iteration("gaussian", {"alpha": 0.6}, 3.0, n_steps=30)
for k in (0, 1, 5, 10, 30):
    print(f"k = {k:2d}  s = {trace.orbit[k].real:.12f}  h = {trace.h_values[k].real:.15f}")
print(f"1/sqrt(pi) = {1 / math.sqrt(math.pi):.15f}")
