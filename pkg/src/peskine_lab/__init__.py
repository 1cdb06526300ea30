"""Exact computational lab for trivector geometry over prime fields.

Everything here works over F_p for an odd prime p and is exact: no floating
point leaks into results (float64 is used internally only as a fast integer
container where products provably stay below 2**53).

Layout:
    rng        deterministic seeded randomness (SplitMix64)
    linalg     dense exact linear algebra mod p
    subspaces  row-space representatives, meets/joins, flags
    trivector  alternating 3-forms, contractions, Pfaffians
    scan       batched exhaustive scans over F_p^n and P^n(F_p)
    polynomial sparse multivariate polynomials mod p
    divisors   structured trivector samplers and flag recovery
    loci       degeneracy loci: membership tests, interpolated equations
    orbits     coordinate models for the small orbit closures
    fibration  the rank-4 fibration attached to a flagged trivector
    estimators dimension estimation by random slicing / Jacobians
    storage    JSON (de)serialization of trivectors
    report     check reports with byte-stable serialization
    checks     the named verification checks behind the CLI
    cli        `peskine-lab` entry point
"""

from __future__ import annotations

__all__ = ["__version__"]

__version__ = "0.1.0"
