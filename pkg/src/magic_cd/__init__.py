"""Overlapping community detection in temporal text networks.

The generative model lets communities interact: a link u -> v appears with
probability ``1 - exp(-F_u^T eta F_v)`` when u precedes v in time, where ``F``
holds nonnegative node-community affiliations and ``eta`` nonnegative
community-community interaction strengths.
"""
from .graph import (
    Directedness, NodeKind, NodeRecord, TemporalTextNetwork, Temporality, TimeOrderedIndex,
    build_network, classify_temporality, time_ordered_view,
)
from .projection import ProjectionConfig, project, tokenize
from .model import (
    FitConfig, FittedModel, Mode, choose_K, community_thresholds, conductance, delta,
    edge_probability, extract_cover, fit, gradient_eta, gradient_F_u, init_affiliations,
    init_interactions, line_search_step, log_likelihood, planted_network, sample_network,
)
from .metrics import (
    CommunityCover, MetricReport, composite_score, coverage_ratio, evaluate, f1_score,
    omega_index, overlapping_modularity,
)
from .analytics import (
    InteractionScores, community_jaccard_study, ic_ec_scores, interaction_edge_ratio,
    jaccard_similarity,
)

__version__ = "0.1.0"
