"""Exact arithmetic for hom-Lie algebroids, their connections and para-Kähler structures."""

__version__ = '1.0.0'
