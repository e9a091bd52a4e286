"""Exact arithmetic toolkit for cyclotomic series constructions and bound certificates."""

from __future__ import annotations

__version__ = "0.1.0"
