"""Sphere Chords

Distance and chord-length distributions of convex bodies on the unit sphere,
with closed forms for spherical caps and Monte Carlo checks of the spherical
Crofton and Blaschke-Petkantschin identities.
"""

__version__ = "0.1.0"
__author__ = "Sphere Chords Team"
__description__ = "Spherical chord-length and distance distributions"
