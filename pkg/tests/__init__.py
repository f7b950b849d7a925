"""Test package for the rough Kuramoto toolkit."""
