"""Sentence-embedding sidecar: a small HTTP service (POST /embed,
GET /health) around a pretrained sentence encoder, plus a precompute
utility that writes vector files the stylegraph file provider can load
for fully offline runs."""

__version__ = "0.1.0"
