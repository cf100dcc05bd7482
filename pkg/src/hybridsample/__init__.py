"""Indirect graph sampling on hybrid social-affiliation networks."""

from .estimators import (
    EstimateReport,
    nrmse,
    vsa_estimate_n,
    vsa_theta_known_n,
    vsa_theta_unknown_n,
    walk_theta,
)
from .geo import NYC_REGION, Region, RrziDraw, Venue, VenueIndex, rrzi_draw, rrzi_vsa_estimate
from .graphs import (
    BipartiteGraph,
    Graph,
    HybridNetwork,
    LabelDistribution,
    bip_neighbors,
    constant_labels,
    degree_labels,
    ground_truth_theta,
    in_degree_labels,
    out_degree_labels,
    undirected_view,
)
from .ingest import CheckinRecord, build_hybrid_from_lbsn, load_checkins, load_edge_list
from .samplers import (
    AuxDistribution,
    SampleTrace,
    VsaSample,
    WeightSystem,
    closed_form_weights,
    compute_qu,
    default_desired_distribution,
    fixed_weight_scheme,
    mh_step,
    run_mh_chain,
    rwt_rwa_run,
    rwt_vsa_run,
    rwt_vsa_transition_matrix,
    simple_rw_run,
    stationary_rwt_vsa,
    vs_a_collect,
)
from .synth import SynthConfig, build_synthetic_hybrid, generate_ba, orient_edges

__version__ = "0.1.0"
