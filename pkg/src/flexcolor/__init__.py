"""Flexible list coloring of complete multipartite graphs."""

__version__ = "0.1.0"

from .graphcore import (
    Coloring,
    InputError,
    ListAssignment,
    MultipartiteGraph,
    Request,
)

__all__ = ["Coloring", "InputError", "ListAssignment", "MultipartiteGraph", "Request", "__version__"]
