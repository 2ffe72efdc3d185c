"""
Which powers of r are allowed
=============================

For ``psi = k r^s`` with a logarithmic potential, the radial system is
consistent only when ``s`` is ``1/2`` or ``1``.  Everywhere else one residual
grows like ``r^(2s - 1)``, and the fitted coefficient matches the predicted
one.
"""

# %%
# Scan a grid of exponents
# ------------------------

from fractions import Fraction

import numpy as np

from soliton_forge.classify import exponent_scan
from soliton_forge.systems import exponent_constraint

s_values = [Fraction(k, 20) for k in range(1, 40)]
records = exponent_scan(s_values)
ok = [str(r.s) for r in records if r.passed]
print("passing exponents:", ok)

# %%
# Residual law away from the two branches
# ---------------------------------------

for r in records[::6]:
    if r.law_coefficient is None:
        continue
    print(f"s={float(r.s):.2f} fitted {r.law_coefficient:+.6f} "
          f"predicted {r.expected_coefficient:+.6f}")

# %%
# The same answer from the constants alone
# ----------------------------------------
# With ``lambda~`` tied to the square-root family, only ``s = 1/2`` survives.

n, m = 3, 4
lam_t = -Fraction(m - n + 1) * (n - 2) / (2 * (n - 1))
verdict = exponent_constraint(n, m, n - 2, lam_t)
print(verdict.to_dict())
print("k2 implied:", verdict.k2_implied, "check", np.isclose(float(verdict.k2_implied), 1.0))
