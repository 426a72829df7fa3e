"""Few-shot video object detection with tube proposals and temporal matching."""

__version__ = "0.1.0"
