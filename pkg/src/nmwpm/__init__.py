"""Surface-code decoding toolkit with learned matching weights."""

__version__ = "0.1.0"
