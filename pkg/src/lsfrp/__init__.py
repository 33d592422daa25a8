"""Exact solvers for the liner ship fleet repositioning problem with cargo flows.

Five cross-validating methods over one instance model: a reduced arc-flow
MIP, its tightened and per-ship disaggregated revisions, column generation
over ship-path columns, column generation with compact lazy-constraint
pricing, and a brute-force oracle for desk-scale ground truth.
"""

__version__ = "0.1.0"
