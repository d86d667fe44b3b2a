"""OEIS b-file reading and writing.

A b-file is plain text with one ``index value`` pair per line and ``#``
comment lines.  Comments are kept with their position so a well-formed
file serializes back byte for byte (blank lines and trailing whitespace
are normalized away).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional


class BFileError(ValueError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class MalformedLine(BFileError):
    pass


class NonContiguousIndex(BFileError):
    pass


@dataclass(frozen=True)
class BFile:
    entries: tuple[tuple[int, int], ...]
    # (number of entries preceding the comment, comment text including '#')
    comments: tuple[tuple[int, str], ...] = field(default=())

    @property
    def offset(self) -> Optional[int]:
        return self.entries[0][0] if self.entries else None

    def values(self, low: int = 1, high: Optional[int] = None) -> list[int]:
        """Values for indices ``low..high`` (default: from ``low`` to the end)."""
        if not self.entries:
            return []
        first, last = self.entries[0][0], self.entries[-1][0]
        high = last if high is None else high
        if low < first or high > last:
            raise IndexError(f"b-file covers [{first}, {last}], asked for [{low}, {high}]")
        return [v for _, v in self.entries[low - first : high - first + 1]]

    @classmethod
    def from_terms(cls, terms: Iterable[int], offset: int = 1, header: Iterable[str] = ()):
        entries = tuple((i, int(v)) for i, v in enumerate(terms, offset))
        return cls(entries, tuple((0, h if h.startswith("#") else f"# {h}") for h in header))


def parse_bfile(text: str) -> BFile:
    entries: list[tuple[int, int]] = []
    comments: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            comments.append((len(entries), line))
            continue
        parts = line.split()
        if len(parts) != 2:
            raise MalformedLine(lineno, f"expected 'index value', got {raw!r}")
        try:
            index, value = int(parts[0]), int(parts[1])
        except ValueError:
            raise MalformedLine(lineno, f"non-integer field in {raw!r}") from None
        if index < 0 or value < 0:
            raise MalformedLine(lineno, f"negative index or value in {raw!r}")
        if entries and index != entries[-1][0] + 1:
            raise NonContiguousIndex(
                lineno, f"index {index} follows {entries[-1][0]}"
            )
        entries.append((index, value))
    return BFile(tuple(entries), tuple(comments))


def serialize_bfile(bfile: BFile) -> str:
    out = []
    pending = list(bfile.comments)
    for pos, (i, v) in enumerate(bfile.entries):
        while pending and pending[0][0] <= pos:
            out.append(pending.pop(0)[1])
        out.append(f"{i} {v}")
    out.extend(c for _, c in pending)
    return "".join(line + "\n" for line in out)


def read_bfile(path) -> BFile:
    with open(path, encoding="utf-8") as fh:
        return parse_bfile(fh.read())
