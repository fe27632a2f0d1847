"""
Top-level package initialiser for **cellscope**.

cellscope reads Jupyter notebooks and plain Python scripts into one cell-based
model, computes structural metrics and style findings per document, stores them,
and compares the two corpora statistically.
"""

__version__ = "0.1.0"

__all__ = ["__version__"]
