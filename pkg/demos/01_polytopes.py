"""Polyhedra in H-representation: sums, maps, projections.

Run with ``python3 demos/01_polytopes.py``.
"""
# %%
import numpy as np

from mpckit import (HPolyhedron, affine_image, affine_preimage, fourier_motzkin_project,
                    is_subset, minkowski_sum, remove_redundant, set_equal)
from mpckit.polytope import chebyshev_center, to_text

# %% [markdown]
# A box plus a diamond is an octagon. The sum is formed in the lifted space
# (x, q) and the q coordinates are eliminated.

# %%
box = HPolyhedron.symmetric_box([1.0, 1.0])
diamond = HPolyhedron([[1, 1], [1, -1], [-1, 1], [-1, -1]], [1, 1, 1, 1])
octagon = minkowski_sum(box, diamond)
print(to_text(octagon))

# %% [markdown]
# Images and preimages under linear maps. The input set [-20, 20] pushed
# through B = (0, 0.05) is a vertical segment of half-length 1.

# %%
B = np.array([[0.0], [0.05]])
seg = affine_image(B, HPolyhedron.symmetric_box([20.0]))
print("segment rows:", seg.n_rows, "| contains (0, 1):", (0.0, 1.0) in seg)

A = np.array([[1.0, 0.05], [0.0, 1.0]])
X = HPolyhedron.symmetric_box([10.0, 10.0])
pre = affine_preimage(X, A)
print("states that stay in X under x+ = A x:\n" + to_text(pre))

# %% [markdown]
# Projection by Fourier-Motzkin elimination, followed by LP-based pruning.

# %%
cube = HPolyhedron(np.vstack([np.eye(3), -np.eye(3), [[1, 1, 1]]]), np.r_[np.ones(6), 1.5])
shadow = fourier_motzkin_project(cube, [0, 1])
print("shadow of the cut cube:\n" + to_text(shadow))
print("Chebyshev ball:", chebyshev_center(shadow))

# %%
loose = HPolyhedron(np.vstack([X.normals, X.normals]), np.r_[X.offsets, 2 * X.offsets])
print("redundant rows dropped:", loose.n_rows, "->", remove_redundant(loose).n_rows)
print("box inside octagon:", is_subset(box, octagon), "| equal:", set_equal(box, octagon))
