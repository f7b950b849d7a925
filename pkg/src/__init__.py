"""
Rough Kuramoto - synchronisation of phase oscillators driven by fractional noise,
integrated as rough differential equations.
"""

__version__ = "0.1.0"
