"""Cauchy problem for the Helmholtz equation: spectral truncation, quasi-boundary and nonlinear solvers."""
