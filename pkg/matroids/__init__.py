"""
Matroid analysis engine.

Provides:
- Rank-oracle matroid handles (graphic, uniform, explicit, dual, minor, truncation, sum)
- Submodular minimization, weighted strength and fractional arboricity
- Universal density and principal partition
- Truncation spectra, MKL solver, base-pmf tools and applications
"""

__version__ = "0.1.0"
