"""Base-station placement at minimum-interference points."""
__version__ = "0.1.0"
