"""Helpers shared by the tab-separated file formats."""

from __future__ import annotations

import hashlib
import json
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field as dataclass_field
from pathlib import Path
from typing import Any

from .errors import DataError


# "#key=value" lines carry metadata; "# ..." lines (hash, space) are comments
METADATA_PREFIX = "#"
COMMENT_PREFIX = "# "


@dataclass(frozen=True)
class Provenance:
    """Config hash and seed list stamped on every output file."""

    config_hash: str = ""
    seeds: tuple[int, ...] = ()

    def comment_line(self) -> str:
        seeds = ",".join(str(s) for s in self.seeds)
        return f"{COMMENT_PREFIX}config={self.config_hash} seeds={seeds}"


@dataclass
class Preamble:
    """Metadata and comment lines read from the top of a file."""

    metadata: dict[str, str] = dataclass_field(default_factory=dict)
    comments: list[str] = dataclass_field(default_factory=list)
    # 1-based number of the first line after the preamble
    body_start: int = 1


def config_hash(payload: Any) -> str:
    """Stable short hash of a JSON-serializable payload."""
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]


def format_float(value: float) -> str:
    """Shortest text that parses back to exactly the same float."""
    return repr(float(value))


def parse_float(
    text: str,
    *,
    error: type[DataError] = DataError,
    path: str | Path | None = None,
    line: int | None = None,
    column: str | None = None,
) -> float:
    """Parse a finite float, raising `error` with the location on failure."""
    try:
        value = float(text)
    except ValueError:
        raise error(
            "non-numeric value", path=path, line=line, column=column, detail=repr(text)
        ) from None
    if not math.isfinite(value):
        raise error(
            "non-finite value", path=path, line=line, column=column, detail=repr(text)
        )
    return value


def split_preamble(lines: Sequence[str]) -> Preamble:
    """Collect leading metadata/comment lines."""
    preamble = Preamble()
    for index, raw in enumerate(lines):
        line = raw.rstrip("\r\n")
        if line.startswith(METADATA_PREFIX):
            key, sep, value = line[1:].partition("=")
            if sep and not line.startswith(COMMENT_PREFIX):
                preamble.metadata[key.strip()] = value.strip()
            else:
                preamble.comments.append(line[1:].strip())
            continue
        preamble.body_start = index + 1
        return preamble
    preamble.body_start = len(lines) + 1
    return preamble


def write_lines(path: str | Path, lines: Iterable[str]) -> None:
    """Write lines with '\\n' endings, UTF-8, no trailing blank line."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for line in lines:
            f.write(line)
            f.write("\n")


def read_lines(path: str | Path) -> list[str]:
    """Read a UTF-8 file into lines without their endings."""
    with open(path, "r", encoding="utf-8") as f:
        return f.read().splitlines()


SIDECAR_SUFFIX = ".provenance"


def write_sidecar(path: str | Path, provenance: Provenance) -> Path:
    """Stamp a file whose format has no comment lines.

    The sidecar holds the provenance line and a '#sha256=' line with the
    digest of the file's bytes.
    """
    target = Path(path)
    digest = hashlib.sha256(target.read_bytes()).hexdigest()
    sidecar = target.with_name(target.name + SIDECAR_SUFFIX)
    write_lines(sidecar, [provenance.comment_line(), f"{METADATA_PREFIX}sha256={digest}"])
    return sidecar
