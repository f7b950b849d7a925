"""Command line interface and experiment runner."""
