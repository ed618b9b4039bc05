"""Exact and numerical tools for open lattice integrable systems.

Modules
-------
exactnum
    Gaussian-rational scalars, formal-hbar coefficients, sparse
    commutative (Laurent) polynomials.
ncalg
    Exact normal-ordering engine for noncommutative algebras.
phase
    Poisson structures, Hamiltonian systems, chart maps.
lax
    Matrix pair builders, isospectral right sides, invariants.
flow
    Fixed-step and adaptive integrators, drift reports, CSV output.
spectral
    Operator-to-ODE extraction and eigensolves on Dirichlet boxes.
liepoisson
    Linear bracket structure constants, star products, reductions.
verify
    Named consistency checks grouped into suites.
cli
    Command-line entry points (flow, spectrum, star, verify).
"""

__version__ = "0.1.0"

__all__ = [
    "exactnum",
    "ncalg",
    "phase",
    "lax",
    "flow",
    "spectral",
    "liepoisson",
    "verify",
    "plots",
    "cli",
    "__version__",
]
