"""Exact boundary measure theory of free groups."""
