"""Numerical core: function spaces, phase trees, geometry, construction, quadrature, search"""
