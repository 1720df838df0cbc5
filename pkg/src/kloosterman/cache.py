"""On-disk cache of field models keyed by (p, f).

One text file per field, ``field_<p>_<f>.txt``::

    kloosterman-field-cache 1
    p <p>
    f <f>
    modulus <c_0> <c_1> ... <c_f>
    generator <encoding>

The cache only saves the modulus search and the generator search.  Loaded
entries are re-verified by the caller, so a corrupt file cannot change any
result; disabling the cache gives identical output.
"""

from __future__ import annotations

import os
from pathlib import Path

FORMAT_HEADER = "kloosterman-field-cache 1"
ENV_CACHE_DIR = "KLOOSTERMAN_CACHE_DIR"

_cache_dir: Path | None = Path(os.environ[ENV_CACHE_DIR]) if os.environ.get(ENV_CACHE_DIR) else None


def set_cache_dir(path: str | os.PathLike | None) -> None:
    global _cache_dir
    _cache_dir = Path(path) if path else None


def get_cache_dir() -> Path | None:
    return _cache_dir


def _path(p: int, f: int) -> Path | None:
    if _cache_dir is None:
        return None
    return _cache_dir / f"field_{p}_{f}.txt"


def load_field(p: int, f: int) -> tuple[tuple[int, ...], int] | None:
    path = _path(p, f)
    if path is None or not path.exists():
        return None
    try:
        lines = path.read_text().splitlines()
        if lines[0].strip() != FORMAT_HEADER:
            return None
        entries = dict(line.split(" ", 1) for line in lines[1:] if line.strip())
        if int(entries["p"]) != p or int(entries["f"]) != f:
            return None
        modulus = tuple(int(c) for c in entries["modulus"].split())
        return modulus, int(entries["generator"])
    except (OSError, KeyError, ValueError, IndexError):
        return None


def store_field(p: int, f: int, modulus, generator: int) -> None:
    path = _path(p, f)
    if path is None:
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    body = "\n".join(
        [
            FORMAT_HEADER,
            f"p {p}",
            f"f {f}",
            "modulus " + " ".join(str(c) for c in modulus),
            f"generator {generator}",
        ]
    )
    tmp = path.with_suffix(".tmp")
    tmp.write_text(body + "\n")
    tmp.replace(path)


def info() -> dict:
    if _cache_dir is None:
        return {"cache_dir": None, "entries": 0}
    files = sorted(_cache_dir.glob("field_*.txt")) if _cache_dir.exists() else []
    return {"cache_dir": str(_cache_dir), "entries": len(files), "files": [f.name for f in files]}


def clear() -> int:
    if _cache_dir is None or not _cache_dir.exists():
        return 0
    n = 0
    for f in _cache_dir.glob("field_*.txt"):
        f.unlink()
        n += 1
    return n
