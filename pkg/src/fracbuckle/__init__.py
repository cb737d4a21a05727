"""Critical buckling loads of fractional-order nonlocal beams and plates."""

__version__ = "0.1.0"
