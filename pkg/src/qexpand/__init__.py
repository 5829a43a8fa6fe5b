"""Query expansion and ad hoc retrieval experiments over TREC-style collections."""

__version__ = "0.1.0"
