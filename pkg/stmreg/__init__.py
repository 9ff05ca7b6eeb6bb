"""
Numerics for regularized zero-range (TMS) quadratic forms of N bosons
interacting with an impurity.
"""
