"""Financial news volatility toolkit: embeddings, HAR and CNN forecasters,
bootstrap model comparison, and token-level attribution."""

__version__ = "0.1.0"
