"""Deformation families of zero mean curvature surfaces and graph certificates."""

from . import catalog, holofn, univalence, weierstrass

__version__ = "0.1.0"
