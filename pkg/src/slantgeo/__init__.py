"""Verification toolkit for slant and semi-slant submanifold geometry.

The package evaluates almost contact metric structures on coordinate
charts, classifies them (cosymplectic, Sasakian, Kenmotsu), computes
slant and semi-slant angle functions of immersed submanifolds, and
checks the structural identities, warped-product relations, and
curvature inequalities that govern them, all numerically on sampled
grids with explicit tolerances.
"""

__version__ = "0.1.0"
