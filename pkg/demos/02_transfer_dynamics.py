"""Exact transfer amplitudes from the spectral propagator.

Evaluates gamma_n(t) curves for a perfect chain and the uniform control,
checks the closed form for the input-site amplitude of the closed-form
family, and writes a CSV of the arrival curve.
"""

import math

import numpy as np

from pstchain import analytic_chain, diagonalize, gamma, uniform_chain
from pstchain.serialize import write_csv

n = 12
sd = diagonalize(analytic_chain(n))
times = np.linspace(0.0, 2.0 * math.pi, 801)
arrival = gamma(sd, 1, n, times)

print(f"analytic chain n={n}: |gamma_N| peaks at "
      f"t = {times[np.argmax(np.abs(arrival))]:.4f} (t0 = pi)")

# input-site amplitude follows cos^(N-1)(t/2) exactly
start = gamma(sd, 1, 1, times)
law = np.cos(times / 2.0) ** (n - 1)
print("max |gamma_1 - cos^(N-1)(t/2)| =", float(np.max(np.abs(start - law))))

sd_u = diagonalize(uniform_chain(n))
arrival_u = gamma(sd_u, 1, n, times)
print(f"uniform chain n={n}: best |gamma_N|^2 on this window = "
      f"{float(np.max(np.abs(arrival_u) ** 2)):.4f} (never reaches 1)")

write_csv("transfer_curve.csv", ["t", "re", "im", "abs2"],
          [times, arrival.real, arrival.imag, np.abs(arrival) ** 2])
print("wrote transfer_curve.csv")
