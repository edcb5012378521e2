"""Background analysis job service."""
