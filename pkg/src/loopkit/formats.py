"""Plain-text loop, map and automorphism-list files.

::

    LOOP v1            SIGMA v1            AUTS v1
    order: 3           order: 3            order: 3
    0 1 2              0 2 1               count: 2
    1 2 0                                  0 1 2
    2 0 1                                  0 2 1

Canonical loop files have identity 0; ``normalize=True`` relabels any valid
table so that it does.  ``PERM v1`` is accepted as a synonym of ``SIGMA v1``.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .core import CayleyLoop, load_loop, normalize as normalize_loop
from .errors import FormatError, LoopError
from .perm import Perm, SelfMap


def _lines(text: str) -> list[str]:
    return [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]


def _header(lines: list[str], magic: tuple[str, ...], path) -> int:
    if not lines or lines[0] not in magic:
        raise FormatError(f"{path}: expected header {' or '.join(magic)}")
    if len(lines) < 2 or not lines[1].startswith("order:"):
        raise FormatError(f"{path}: expected 'order: n' on line 2")
    try:
        n = int(lines[1].split(":", 1)[1])
    except ValueError:
        raise FormatError(f"{path}: bad order line {lines[1]!r}") from None
    if n < 1:
        raise FormatError(f"{path}: order must be positive")
    return n


def _ints(line: str, path) -> list[int]:
    try:
        return [int(t) for t in line.split()]
    except ValueError:
        raise FormatError(f"{path}: non-integer entry in {line!r}") from None


def parse_loop(text: str, normalize: bool = False, path="<text>", name: str | None = None) -> CayleyLoop:
    lines = _lines(text)
    n = _header(lines, ("LOOP v1",), path)
    rows = [_ints(ln, path) for ln in lines[2:]]
    if len(rows) != n or any(len(r) != n for r in rows):
        raise FormatError(f"{path}: expected {n} rows of {n} entries")
    try:
        L = load_loop(rows, name=name or Path(str(path)).stem)
    except LoopError as exc:
        raise FormatError(f"{path}: {exc}") from exc
    if L.identity != 0:
        if not normalize:
            raise FormatError(f"{path}: identity is {L.identity}, canonical files need 0 (use --normalize)")
        L = normalize_loop(L)
    return L


def format_loop(L: CayleyLoop) -> str:
    out = ["LOOP v1", f"order: {L.order}"]
    out += [" ".join(str(int(v)) for v in row) for row in L.table]
    return "\n".join(out) + "\n"


def parse_map(text: str, path="<text>") -> SelfMap:
    lines = _lines(text)
    n = _header(lines, ("SIGMA v1", "PERM v1"), path)
    if len(lines) != 3:
        raise FormatError(f"{path}: expected one line of images")
    imgs = _ints(lines[2], path)
    if len(imgs) != n or any(not 0 <= v < n for v in imgs):
        raise FormatError(f"{path}: expected {n} images in 0..{n - 1}")
    return SelfMap(imgs)


def parse_perm(text: str, path="<text>") -> Perm:
    m = parse_map(text, path)
    if not m.is_bijective():
        raise FormatError(f"{path}: map is not a permutation")
    return Perm(m.images)


def format_map(m: SelfMap, header: str = "SIGMA v1") -> str:
    return f"{header}\norder: {m.n}\n{' '.join(map(str, m.images))}\n"


def parse_auts(text: str, path="<text>") -> list[Perm]:
    lines = _lines(text)
    n = _header(lines, ("AUTS v1",), path)
    if len(lines) < 3 or not lines[2].startswith("count:"):
        raise FormatError(f"{path}: expected 'count: k' on line 3")
    k = int(lines[2].split(":", 1)[1])
    rows = [_ints(ln, path) for ln in lines[3:]]
    if len(rows) != k or any(len(r) != n or sorted(r) != list(range(n)) for r in rows):
        raise FormatError(f"{path}: expected {k} permutations of 0..{n - 1}")
    return [Perm(r) for r in rows]


def format_auts(perms: list[Perm]) -> str:
    n = perms[0].n if perms else 0
    body = "\n".join(" ".join(map(str, p.images)) for p in perms)
    return f"AUTS v1\norder: {n}\ncount: {len(perms)}\n{body}\n"


def read_loop(path, normalize: bool = False) -> CayleyLoop:
    return parse_loop(Path(path).read_text(), normalize=normalize, path=path)


def write_loop(path, L: CayleyLoop) -> None:
    Path(path).write_text(format_loop(L))


def table_bytes(L) -> bytes:
    return np.ascontiguousarray(L.table, dtype=np.int64).tobytes()
