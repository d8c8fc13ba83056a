"""Framed cohomological Hall algebras and shuffle-formula stable envelopes."""

from __future__ import annotations

__version__ = "0.1.0"
