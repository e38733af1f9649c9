"""Analysis command definitions loaded from external text files.

File format, one command per blank-line-separated block:

    name line
    integer parameter-count line
    one description line per parameter
    command code until the next blank line

Placeholders in code are exactly ``$PAR<k>$`` with 1-based ``k``.  Blank
lines are the block separator, so command code cannot contain them.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from ..errors import CommandError

_PLACEHOLDER = re.compile(r"\$PAR(\d+)\$")


def split_blocks(text: str) -> list[list[str]]:
    """Blank-line-separated blocks as lists of lines, blanks dropped."""
    blocks: list[list[str]] = []
    current: list[str] = []
    for line in text.splitlines():
        if line.strip() == "":
            if current:
                blocks.append(current)
                current = []
        else:
            current.append(line)
    if current:
        blocks.append(current)
    return blocks


@dataclass(frozen=True)
class CommandSpec:
    name: str
    param_count: int
    param_descriptions: tuple[str, ...]
    template: str

    def __post_init__(self):
        if len(self.param_descriptions) != self.param_count:
            raise CommandError(
                f"command {self.name!r}: {self.param_count} parameters but "
                f"{len(self.param_descriptions)} description lines"
            )
        for match in _PLACEHOLDER.finditer(self.template):
            k = int(match.group(1))
            if not 1 <= k <= self.param_count:
                raise CommandError(
                    f"command {self.name!r}: placeholder {match.group(0)} out of "
                    f"range for {self.param_count} parameters"
                )

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "param_count": self.param_count,
            "param_descriptions": list(self.param_descriptions),
            "template": self.template,
        }


@dataclass(frozen=True)
class CommandInvocation:
    spec: CommandSpec
    args: tuple[str, ...]
    rendered: str


def parse_command_block(lines: list[str]) -> CommandSpec:
    name = lines[0].strip()
    if not name:
        raise CommandError("empty command name")
    if len(lines) < 2:
        raise CommandError(f"command {name!r}: missing parameter-count line")
    try:
        count = int(lines[1].strip())
    except ValueError:
        raise CommandError(
            f"command {name!r}: parameter-count line {lines[1]!r} is not an integer"
        ) from None
    if count < 0:
        raise CommandError(f"command {name!r}: negative parameter count")
    descriptions = tuple(line.strip() for line in lines[2 : 2 + count])
    if len(descriptions) != count:
        raise CommandError(
            f"command {name!r}: expected {count} description lines, "
            f"found {len(descriptions)}"
        )
    code_lines = lines[2 + count :]
    if not code_lines:
        raise CommandError(f"command {name!r}: missing command code")
    return CommandSpec(name, count, descriptions, "\n".join(code_lines))


def default_command_file() -> Path:
    """The command set bundled with the package."""
    return Path(__file__).resolve().parent.parent / "data" / "commands.txt"


def load_command_file(path) -> list[CommandSpec]:
    text = Path(path).read_text(encoding="utf-8")
    specs = []
    seen = set()
    for block in split_blocks(text):
        spec = parse_command_block(block)
        if spec.name in seen:
            raise CommandError(f"duplicate command name {spec.name!r}")
        seen.add(spec.name)
        specs.append(spec)
    return specs


def serialize_specs(specs) -> str:
    chunks = []
    for spec in specs:
        lines = [spec.name, str(spec.param_count)]
        lines.extend(spec.param_descriptions)
        lines.append(spec.template)
        chunks.append("\n".join(lines))
    return "\n\n".join(chunks) + "\n"


def instantiate(spec: CommandSpec, args) -> CommandInvocation:
    args = tuple(str(a) for a in args)
    if len(args) != spec.param_count:
        raise CommandError(
            f"command {spec.name!r} takes {spec.param_count} parameters, "
            f"got {len(args)}"
        )
    # single left-to-right pass: args containing placeholder text stay literal
    rendered = _PLACEHOLDER.sub(lambda m: args[int(m.group(1)) - 1], spec.template)
    return CommandInvocation(spec, args, rendered)


class CommandRegistry:
    """Immutable view over a command file; reload swaps the table atomically."""

    def __init__(self, specs, source=None):
        table = {}
        for spec in specs:
            if spec.name in table:
                raise CommandError(f"duplicate command name {spec.name!r}")
            table[spec.name] = spec
        self._table = table
        self.source = Path(source) if source is not None else None

    @classmethod
    def from_file(cls, path) -> "CommandRegistry":
        return cls(load_command_file(path), source=path)

    def reload(self) -> None:
        if self.source is None:
            raise CommandError("registry was not loaded from a file")
        specs = load_command_file(self.source)
        self._table = {s.name: s for s in specs}

    def get(self, name: str) -> CommandSpec:
        try:
            return self._table[name]
        except KeyError:
            raise CommandError(
                f"unknown command {name!r} (known: {', '.join(self.names())})"
            ) from None

    def names(self) -> list[str]:
        return sorted(self._table)

    def __contains__(self, name: str) -> bool:
        return name in self._table

    def __len__(self) -> int:
        return len(self._table)
