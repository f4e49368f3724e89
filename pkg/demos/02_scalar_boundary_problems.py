"""Scalar boundary problems: the index-0 freedom and the index-1 constraint.

Index 0 solves n+ + n- = m with a free additive constant; index 1 solves
w n+ + n- = m, where analyticity of n+ at z = i pins the constant instead.
For m = 1/(x+i) everything is explicit: m = (1-w)/(2i), so the index-1
solution is the constant pair n+ = i/2, n- = -i/2.
"""

import numpy as np

from whfactor import MobiusGrid, solve_scalar_index0, solve_scalar_index1

grid = MobiusGrid.build(512)
x = grid.x_nodes
w = grid.w_nodes

m = (1.0 / (x + 1j)).astype(complex)

sol0 = solve_scalar_index0(m, grid, c_free=0.25j)
print("index 0 with c_free = 0.25i:")
print(f"  boundary defect |n+ + n- - m| = {np.abs(sol0.n_plus + sol0.n_minus - m).max():.2e}")

sol1 = solve_scalar_index1(m, grid)
print("\nindex 1 (constant forced by analyticity at z = i):")
print(f"  boundary defect |w n+ + n- - m| = "
      f"{np.abs(w * sol1.n_plus + sol1.n_minus - m).max():.2e}")
print(f"  n+ spread around i/2:  {np.abs(sol1.n_plus - 0.5j).max():.2e}")
print(f"  n- spread around -i/2: {np.abs(sol1.n_minus + 0.5j).max():.2e}")

# at index 1 the constant is not a free parameter: any nonzero request
# would plant a pole at z = i and is rejected
try:
    solve_scalar_index1(m, grid, c_forced=0.1)
except Exception as exc:
    print(f"\nrequesting c = 0.1 at index 1: {type(exc).__name__}: {exc}")
