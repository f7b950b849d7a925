"""Parsers for configuration values."""
