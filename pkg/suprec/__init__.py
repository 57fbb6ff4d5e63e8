"""
suprec: sparse support recovery toolkit
"""

__version__ = "0.1.0"
