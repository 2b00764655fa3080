"""HTTP service wrapping the harness; the CLI drives the same operations in-process."""

from .app import create_app

__all__ = ["create_app"]
