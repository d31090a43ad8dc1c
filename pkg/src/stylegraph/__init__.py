"""Sentence-reuse similarity networks for comparing writing style across
news outlets: match sentences by embedding + sentiment, encode articles
as symbol strings, compare them by edit distance or overlap, and analyze
the induced article/domain networks against known bias labels."""

__version__ = "0.1.0"
