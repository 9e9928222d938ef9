r"""Sketch-and-solve low-rank approximation
===========================================

The core pipeline: compress an input matrix with a sparse sketching
matrix, solve the small problem in the sketched row space, and compare
the resulting rank-k approximation against the unrestricted optimum.

Two mathematically equivalent routes compute the same approximation,
one through the SVD of the sketched matrix and one through a row-space
projector assembled from characteristic-polynomial machinery; checking
them against each other is this demo's first stop.
"""

# %%
import numpy as np

import sketchlab as sl

rng = np.random.default_rng(0)

n, d, k = 40, 30, 4
a = rng.standard_normal((n, d))
a /= np.sqrt(sl.fro_sq(a))

# %%
# An oblivious sparse sketch: one +-1 entry per column, placed uniformly.
# Eight rows are enough to track a rank-4 target reasonably well.

sketch = sl.random_sparse_sketch(m=8, n=n, s=1, seed=7)
approx = sl.sketch_lowrank(a, k, sketch)

optimal_err = sl.fro_sq(a - sl.best_rank_k(a, k))
sketch_err = sl.sketch_loss(sketch, a, k)
print(f"optimal rank-{k} error:   {optimal_err:.5f}")
print(f"sketched rank-{k} error:  {sketch_err:.5f}")
print(f"overhead factor:          {sketch_err / optimal_err:.3f}")

# %%
# The projection form gives the same output: project the rows of A onto
# the row space of SA, then truncate.

alt = sl.sketch_lowrank_via_projection(a, k, sketch)
print("route disagreement:", abs(sl.fro_sq(a - alt) - sketch_err))

# %%
# For a single sketching vector and target rank 1 the loss collapses to a
# closed form.

w = rng.standard_normal(n)
closed = sl.rank1_closed_form_loss(a, w)
pipeline = sl.sketch_loss(w.reshape(1, -1), a, 1)
print(f"closed form {closed:.6f} vs pipeline {pipeline:.6f}")

# %%
# Stacking a second sketch under the first never hurts: the combined row
# space contains both, so the loss is bounded by the better of the two.

second = sl.random_sparse_sketch(m=4, n=n, s=1, seed=8)
combined = sl.safeguard(sketch, second)
print("loss(first)    =", sl.sketch_loss(sketch, a, k))
print("loss(second)   =", sl.sketch_loss(second, a, k))
print("loss(stacked)  =", sl.sketch_loss(combined, a, k))
