"""Keeps the tests directory importable (shared corpus helpers)."""
