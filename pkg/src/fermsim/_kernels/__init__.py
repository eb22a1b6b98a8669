"""Kernel backends: compiled extension (core) and numpy fallback."""
