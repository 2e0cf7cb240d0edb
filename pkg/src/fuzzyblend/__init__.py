"""Multi-region wind turbine control with a fuzzy coupling filter."""

__version__ = "0.1.0"
