from .registry import (
    CommandInvocation,
    CommandRegistry,
    CommandSpec,
    instantiate,
    load_command_file,
    serialize_specs,
)

__all__ = [
    "CommandInvocation",
    "CommandRegistry",
    "CommandSpec",
    "instantiate",
    "load_command_file",
    "serialize_specs",
]
