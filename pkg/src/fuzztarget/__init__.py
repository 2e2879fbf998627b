"""Generate small, high-coverage sets of fuzz targets from a library's API surface."""

__version__ = "0.1.0"
