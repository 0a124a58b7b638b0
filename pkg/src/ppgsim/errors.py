"""Exception types shared across the simulator."""


class ConfigError(ValueError):
    """A configuration value is missing, malformed, or physically impossible."""


class LinkBusyError(RuntimeError):
    """A power link reservation overlaps an existing one."""


class TraceFormatError(ValueError):
    """A trace file violates its schema; the message names the offending row."""
