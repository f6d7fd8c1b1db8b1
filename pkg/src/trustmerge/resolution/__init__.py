# engine is imported lazily by the package root; similarity.measures needs
# clusters at import time and engine needs similarity.measures.
from .clusters import Cluster, ClusterSet

__all__ = ["Cluster", "ClusterSet"]
