"""Monte Carlo radiative transfer on signed distance function geometry."""
__version__ = "0.1.0"
