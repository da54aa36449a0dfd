"""
Application layer for the matroid analysis tools.

Provides the density-cli command line, runtime settings, output formatting
and the service layer that turns engine results into reports.
"""

__version__ = "0.1.0"
