"""Mod-2 Hecke algebras at prime level: dimensions of dihedral and reducible
eigenspaces, checked against class groups of Q(sqrt N) and Q(sqrt -N)."""

__version__ = "0.1.0"
