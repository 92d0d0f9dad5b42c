"""Quadrature, closed-form solvers, the incomplete Gamma function and the numerical oracle."""
