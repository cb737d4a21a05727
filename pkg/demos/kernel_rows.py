"""The fractional derivative as a row of weights on nodal values.

On a Hermite-cubic mesh the fractional derivative of the interpolated
field is an exact linear functional of the nodal DOFs. This script shows
the weights and checks them on a few fields.
"""

import numpy as np

from fracbuckle.fem import Mesh1D
from fracbuckle.kernel import FracParams, LengthScale, frac_derivative_row

mesh = Mesh1D(1.0, 10)


def nodal(f, df):
    u = np.empty(mesh.n_dof)
    u[0::2], u[1::2] = f(mesh.nodes), df(mesh.nodes)
    return u


# %% Unit slope has unit derivative everywhere, even next to the ends
slope = nodal(lambda x: x, lambda x: np.ones_like(x))
for x in (0.0, 0.05, 0.5, 0.97):
    row = frac_derivative_row(mesh, FracParams(0.6, 0.3), x, 0)
    print(f"x={x:4.2f}  D^a[x] = {row.apply(slope):.12f}  nonzero weights: {len(row.entries)}")

# %% Constant prefactors no longer normalise the kernel near the ends
for x in (0.0, 0.1, 0.5):
    row = frac_derivative_row(mesh, FracParams(0.6, 0.3, LengthScale.CONSTANT), x, 0)
    print(f"constant prefactors, x={x:3.1f}: D^a[x] = {row.apply(slope):.4f}")

# %% Weights of the curvature row at mid-span: the horizon is visible
row = frac_derivative_row(mesh, FracParams(0.7, 0.3), 0.5, 1)
w = row.weights[0::2]
print("w-DOF weights of the curvature row at x = 0.5:")
print(np.array2string(w, precision=2, suppress_small=True))
