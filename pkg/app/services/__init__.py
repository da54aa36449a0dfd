"""
Service layer: analysis reports and the verification harness.
"""

__version__ = "0.1.0"
