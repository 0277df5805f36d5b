# src/__init__.py
"""Adams Tower Engine"""

__version__ = "1.0.0"
__author__ = "Adams Tower Engine Team"

# src/models/__init__.py
"""Exact linear algebra, free algebras, simplicial objects and report records"""

# src/services/__init__.py
"""Bar construction, tower, spectral sequence checks, fixtures and campaigns"""

# config/__init__.py
"""Configuration management"""
