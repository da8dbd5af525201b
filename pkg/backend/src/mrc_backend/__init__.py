"""Extractive span-reader service for query/context answer extraction."""

__version__ = "0.1.0"
