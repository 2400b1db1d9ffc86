"""Numerical laboratory for low moments of twisted Hecke eigenvalue sums.

Modules: coefficients (tau and lambda for Delta), chargroup (character sums
mod a prime), randmult (Steinhaus model), eulerprod (random Euler products),
analytics (prime and coefficient sums), cli (experiment harness).
"""

__version__ = "0.1.0"
