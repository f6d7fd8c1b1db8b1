from . import measures, semantic, strings
from .measures import SimilarityConfig, align, sim_attr, sim_joint, sim_rel, sim_sem
from .strings import STRING_METRICS, get_metric

__all__ = ["measures", "semantic", "strings", "SimilarityConfig", "align", "sim_attr",
           "sim_joint", "sim_rel", "sim_sem", "STRING_METRICS", "get_metric"]
