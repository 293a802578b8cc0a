from .tree import MeshConfig, IncompleteOctree, build_octree, corner_offsets
from .classify import (Marker, classify_elements, in_surrogate,
                       SurrogateFaces, extract_surrogate_boundary,
                       attach_distance_vectors)

__all__ = [
    "MeshConfig", "IncompleteOctree", "build_octree", "corner_offsets",
    "Marker", "classify_elements", "in_surrogate", "SurrogateFaces",
    "extract_surrogate_boundary", "attach_distance_vectors",
]
