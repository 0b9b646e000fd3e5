from .values import value_at, extract_action, values_at_points
from .partition import (
    ZeroMeanDensities,
    classify,
    region_counts,
    estimate_partition_probs,
    estimate_partition_table,
)
from .backup import backup, candidate_alphas
from .pbvi import pbvi, initial_alphas, DEFAULT_MC_SAMPLES
from .beliefs import select_belief_points
from .density import belief_set_density, simplex_grid, max_min_distance
from .oracles import (
    mdp_upper_bound,
    quadrature_partition_probs,
    quadrature_partition_table,
    quadrature_pbvi,
    quadrature_backup_value,
)
