"""Exact Witt vector, delta-ring, jet-space and canonical-lift toolkit."""
