"""Achievable-rate evaluation for relay and cooperative broadcast channels."""

__version__ = "0.1.0"
