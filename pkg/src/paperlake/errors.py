class ConfigError(Exception):
    """Bad or inconsistent pipeline configuration (CLI exit code 2)."""


class LakeError(Exception):
    """Missing or malformed lake inputs discovered at run time (exit code 1)."""
