"""Shared exception types with CLI exit-code significance."""


class ConfigError(ValueError):
    """Invalid or inconsistent configuration (CLI exit code 4)."""
