"""Desk-scale hybrid homomorphic encryption: Pasta, toy BFV, transciphering."""

__version__ = "0.1.0"
