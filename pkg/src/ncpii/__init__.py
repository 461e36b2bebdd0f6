"""Matrix Painleve II hierarchy toolkit.

Exact noncommutative differential algebra (Lenard polynomials, hierarchy
members, isomonodromic Lax coefficients) together with the numerics that tie
the hierarchy to Fredholm determinants of matrix Airy Hankel operators:
contour quadrature for the generalized Airy functions, Nystrom determinants,
and the diagonal-flow ODE integrator.
"""

__version__ = "0.1.0"
