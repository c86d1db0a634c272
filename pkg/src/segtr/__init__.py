"""Segmentation methods and sentence-level sentiment classification for Turkish reviews."""

__version__ = "0.1.0"
