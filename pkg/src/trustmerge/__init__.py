"""Trust-aware entity resolution and redundancy elimination for knowledge chunks."""

from .model import (Axiom, Context, Edge, JointContext, KnowledgeChunk, Network, Ontology, Pair,
                    apply_context, chunks_from_network, chunks_from_ontology,
                    infer_network_from_ontology, infer_ontology_from_network, make_chunk)
from .trust import InconsistencyRule, TrustModel, evaluate_chunks
from .similarity import SimilarityConfig, sim_attr, sim_joint, sim_rel, sim_sem
from .resolution.blocking import BlockingConfig, block
from .resolution.clusters import Cluster, ClusterSet
from .resolution.engine import (CollectiveEntityResolver, SimilarityQueue, bootstrap, resolve,
                                stale_entry_sweep)
from .redundancy import (CorpusHitCounter, HitCountProvider, MergeStrategy, RedundancyEliminator,
                         inject_noise, merge_clusters, select_bayes, select_naive,
                         select_naive_plus, select_trust)
from .attributes import (AttributeMapping, AttributeResolver, DomainProfile, domain_match,
                         exact_match, ontology_match, resolve_attributes, similarity_match,
                         similarity_match_plus)
from .evaluation import EvalReport, noise_experiment, pairwise_scores, sweep
from .ingestion import DatasetDescriptor, load

__version__ = "0.1.0"

__all__ = [
    "Axiom", "Context", "Edge", "JointContext", "KnowledgeChunk", "Network", "Ontology", "Pair",
    "apply_context", "chunks_from_network", "chunks_from_ontology", "infer_network_from_ontology",
    "infer_ontology_from_network", "make_chunk", "InconsistencyRule", "TrustModel",
    "evaluate_chunks", "SimilarityConfig", "sim_attr", "sim_joint", "sim_rel", "sim_sem",
    "BlockingConfig", "block", "Cluster", "ClusterSet", "CollectiveEntityResolver",
    "SimilarityQueue", "bootstrap", "resolve", "stale_entry_sweep", "CorpusHitCounter",
    "HitCountProvider", "MergeStrategy", "RedundancyEliminator", "inject_noise", "merge_clusters",
    "select_bayes", "select_naive", "select_naive_plus", "select_trust", "AttributeMapping",
    "AttributeResolver", "DomainProfile", "domain_match", "exact_match", "ontology_match",
    "resolve_attributes", "similarity_match", "similarity_match_plus", "EvalReport",
    "noise_experiment", "pairwise_scores", "sweep", "DatasetDescriptor", "load",
]
