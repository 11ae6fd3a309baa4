"""Post-processing figures for sipsticky CSV output."""

__version__ = "0.1.0"

STYLE_VERSION = "1"
