# %% [markdown]
# # Sequences, subsequences and the LCS distance
#
# Paths are compared as label sequences. Two sequences that differ by one
# inserted label should be close, which a longest common *subsequence*
# captures and a longest common *substring* does not.

# %%
from fractions import Fraction
import random

from lcskernel import lcs_distance, lcs_length, lcstr_length, path_similarity

xa = (1, 1, 1, 1, 1)
xb = (1, 1, 1, 2, 1, 1)
xc = (1, 1, 1, 1, 1, 1)

for name, (u, v) in {"a-b": (xa, xb), "a-c": (xa, xc), "b-c": (xb, xc)}.items():
    print(f"{name}: subsequence {lcs_length(u, v)}, substring {lcstr_length(u, v)}")

# %% [markdown]
# The single `2` in `xb` cuts every common run in half, yet all three
# sequences share a subsequence of length 5. Normalizing by the longer
# length gives a similarity in `[0, 1]`, and one minus it a distance.

# %%
print(path_similarity(xa, xb), lcs_distance(xa, xb))

# %% [markdown]
# The distance is a metric. A quick empirical look with exact fractions:

# %%
rng = random.Random(0)


def rand_seq():
    return tuple(rng.randint(1, 4) for _ in range(rng.randint(1, 15)))


def d(u, v):
    return 1 - Fraction(lcs_length(u, v), max(len(u), len(v)))


worst = Fraction(0)
for _ in range(5000):
    x, y, z = rand_seq(), rand_seq(), rand_seq()
    worst = max(worst, d(x, z) - d(x, y) - d(y, z))
print("largest d(x,z) - d(x,y) - d(y,z):", worst)
