"""The exponential law splits as Y0 = Y0**beta * Y_beta.

Y_beta has the M-Wright density M_beta. This script walks through the three
ways the package sees that identity: closed-form Mellin transforms, the
density convolution, and a Monte Carlo product.
"""

import math

import numpy as np

import selfdecomp as sd
from selfdecomp import DistributionSpec as D

beta = 0.4

# The M-Wright density. At beta = 1/2 it is a half-Gaussian.
t = np.linspace(0, 6, 7)
print("t      M_0.4(t)       M_0.5(t)       exp(-t^2/4)/sqrt(pi)")
for ti, a, b in zip(t, sd.m_wright(t, beta), sd.m_wright(t, 0.5)):
    print(f"{ti:4.1f}  {a:.12f}  {b:.12f}  {math.exp(-ti * ti / 4) / math.sqrt(math.pi):.12f}")

# Mellin side: Gamma(beta(z-1)+1) * Gamma(z)/Gamma(beta(z-1)+1) = Gamma(z)
for z in (0.5, 2.0, 3.0 + 1j):
    w = sd.mellin_of_power(D.exponential(), beta, z).value
    m = sd.analytic_mellin(D.mwright(beta), z).value
    print(f"z = {z}:  product {w * m:.15g}   Gamma(z) {sd.analytic_mellin(D.exponential(), z).value:.15g}")

# Density side: (M_beta * g_beta)(x), g_beta the Weibull density of Y0**beta
m = lambda x: sd.pdf(D.mwright(beta), x)  # noqa: E731
g = sd.power_pdf(D.exponential(), beta)
x = np.geomspace(0.01, 10, 6)
conv = sd.mellin_convolve(m, g, x)
print("\nx        convolution        exp(-x)            difference")
for xi, c in zip(x, conv):
    print(f"{xi:7.3f}  {c:.15f}  {math.exp(-xi):.15f}  {abs(c - math.exp(-xi)):.1e}")

# Monte Carlo: Y_beta = S**-beta with S one-sided stable (Kanter's formula)
n = 200_000
prod = (sd.sample(D.exponential(), n, 7, stream=0).values ** beta
        * sd.sample(D.mwright(beta), n, 7, stream=1).values)
fresh = sd.sample(D.exponential(), n, 7, stream=2)
report = sd.ks_two_sample(prod, fresh)
print(f"\nKS D = {report.metric:.5f}, 1% threshold {report.threshold:.5f}, "
      f"p = {report.details['p_value']:.3f}")

# All of the above as one report
print(sd.verify_exponential_decomposition(beta).to_json(indent=None)[:200], "...")
