"""Dynamic (Delta+c)-edge-coloring of forests.

Maintains proper edge colorings of a dynamic forest under insertions and
deletions while counting recourse (recolorings of previously colored edges):
exact minimum-recourse greedy and its shift/path variants, the rooted
2*Delta-2 constant-amortized algorithm, the randomized uniform-distribution
maintainer, a sublinear worst-case scheme for kappa = delta, the adversarial
lower-bound constructions that force these algorithms' bounds, and a
benchmark harness that verifies the bounds at desk scale.
"""

from .colorful_path import cp_delete, cp_insert
from .dist_maint import (
    dm_update_rooted,
    dm_update_unrooted,
    recolor_probability,
    sample_uniform_coloring,
)
from .forest import ColoredForest, Palette, RecourseLedger, Update, edge_key
from .greedy import (
    TieBreaker,
    greedy_delete,
    greedy_insert,
    greedy_path_insert,
    greedy_shift_insert,
    smallest_subtree_path_insert,
)
from .rng import Rng
from .sublinear import LevelPlan, sublinear_insert

__all__ = [
    "ColoredForest",
    "Palette",
    "RecourseLedger",
    "Update",
    "edge_key",
    "Rng",
    "TieBreaker",
    "greedy_insert",
    "greedy_shift_insert",
    "greedy_path_insert",
    "smallest_subtree_path_insert",
    "greedy_delete",
    "cp_insert",
    "cp_delete",
    "dm_update_rooted",
    "dm_update_unrooted",
    "sample_uniform_coloring",
    "recolor_probability",
    "sublinear_insert",
    "LevelPlan",
]

__version__ = "0.1.0"
