"""
lie-eigenlab: eigenfamilies, harmonic morphisms and minimal submanifolds of
the compact classical groups SU(n), SO(n) and Sp(n)
"""
