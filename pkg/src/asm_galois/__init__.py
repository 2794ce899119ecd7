"""Galois lines of the Artin-Schreier-Mumford curve (x^q-x)(y^q-y)=c in P^3."""

__version__ = "0.1.0"
