"""Flag complexes, splitting complexes and enriched Tits buildings over small finite rings."""

__version__ = "0.1.0"
