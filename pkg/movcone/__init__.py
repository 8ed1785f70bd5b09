from .movcone import MovConeDashboard
from .utils.cones import (
    Cone,
    LinearMap,
    apply_map,
    cone_from_generators,
    cone_from_inequalities,
    contains,
    dual_cone,
    intersect,
)
from .utils.documents import load_graph, save_graph
from .utils.equations import eq_for_variety, moving_cone, moving_cone_threefold
from .utils.flips import enumerate_pmc_sequences, verify_flip, verify_graph
from .utils.models import ModelGraph, VarietyModel, validate_model
