"""Python bindings for the rudder foot-controller core."""

from ._core import (
    MappingConfig,
    Mapper,
    RudderError,
    analyze,
    arena_names,
    arena_text,
    config_hash,
    day_profile,
    drive,
    format_effort,
    integrate,
    map_to_twist,
    normalize_axis,
    parse_message,
    replay,
    rig_advance,
    settle_time,
)

__all__ = [
    "MappingConfig",
    "Mapper",
    "RudderError",
    "analyze",
    "arena_names",
    "arena_text",
    "config_hash",
    "day_profile",
    "drive",
    "format_effort",
    "integrate",
    "map_to_twist",
    "normalize_axis",
    "parse_message",
    "replay",
    "rig_advance",
    "settle_time",
]
