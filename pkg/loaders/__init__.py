"""
Input layer for the matroid analysis tools.

This package provides:
- JSON matroid descriptors and whitespace edge lists
- Element weight files and base pmf files
- SHA256 input fingerprints for reproducible reports
- Built-in demo graphs
"""

__version__ = "0.1.0"
