from .likelihood import (
    EPS_FLOOR, Mode, AffinityCache, PairIndex, delta, edge_probability, gradient_eta,
    gradient_F, gradient_F_u, log_likelihood, naive_gradient_eta, naive_gradient_F,
    naive_gradient_F_u,
    naive_log_likelihood, pair_index,
)
from .init import conductance, init_affiliations, init_interactions, locally_minimal_seeds
from .membership import community_thresholds, extract_cover
from .optimize import FitConfig, FittedModel, fit, line_search_step
from .sampling import planted_network, sample_network
from .selection import auc, choose_K
