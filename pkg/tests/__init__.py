# tests/__init__.py
"""Tests package for the PBGA registration project."""
