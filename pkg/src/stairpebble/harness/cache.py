"""On-disk cache of solvable distributions, keyed by staircase and ``k``.

Entries are re-verified when loaded: a cache can only ever supply upper
bounds that hold.  ``exhaustive`` marks entries whose size was proven optimal
by search; ``derived`` marks entries produced by a construction rather than
by search.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ..grid import StaircaseSpec, build_staircase
from ..pebble import Distribution, first_unreachable
from ..search import ENGINE_VERSION

CACHE_FORMAT = 1


class CacheError(ValueError):
    pass


@dataclass(frozen=True)
class CacheEntry:
    spec: StaircaseSpec
    k: int
    witness: Distribution
    exhaustive: bool
    derived: bool = False
    engine: str = ENGINE_VERSION

    @property
    def size(self) -> int:
        return self.witness.size

    @property
    def key(self) -> tuple[str, int]:
        return str(self.spec), self.k

    def to_json(self) -> dict:
        return {
            "spec": str(self.spec),
            "k": self.k,
            "size": self.size,
            "pebbles": [[v, c] for v, c in self.witness.pebbles()],
            "exhaustive": self.exhaustive,
            "derived": self.derived,
            "engine": self.engine,
        }

    @classmethod
    def from_json(cls, data: dict) -> CacheEntry:
        spec = StaircaseSpec.parse(data["spec"])
        graph = build_staircase(spec)
        wit = Distribution.from_pairs(len(graph), [(int(v), int(c)) for v, c in data["pebbles"]])
        if "size" in data and int(data["size"]) != wit.size:
            raise CacheError(f"{spec}: recorded size {data['size']} but witness has {wit.size} pebbles")
        return cls(spec, int(data.get("k", 1)), wit, bool(data["exhaustive"]),
                   bool(data.get("derived", False)), str(data.get("engine", ENGINE_VERSION)))


def default_cache_path() -> Path:
    return Path(str(resources.files("stairpebble") / "data" / "witnesses.json"))


class WitnessCache:
    """Mapping ``(spec, k) -> CacheEntry``, smallest witness wins."""

    def __init__(self, entries=(), path: Path | str | None = None):
        self.path = Path(path) if path else None
        self._entries: dict[tuple[str, int], CacheEntry] = {}
        for e in entries:
            self.put(e)

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self):
        return iter(sorted(self._entries.values(), key=lambda e: (e.spec, e.k)))

    def get(self, spec: StaircaseSpec, k: int = 1) -> CacheEntry | None:
        return self._entries.get((str(spec), k))

    def put(self, entry: CacheEntry) -> bool:
        """Insert unless an entry at least as good is present; returns whether stored."""
        old = self._entries.get(entry.key)
        if old is not None:
            better = entry.size < old.size or (entry.size == old.size and entry.exhaustive and not old.exhaustive)
            if not better:
                return False
        self._entries[entry.key] = entry
        return True

    @classmethod
    def load(cls, path: Path | str | None = None, verify: bool = True) -> WitnessCache:
        """Read a cache file; a missing file gives an empty cache."""
        path = Path(path) if path else default_cache_path()
        cache = cls(path=path)
        if not path.exists():
            return cache
        data = json.loads(path.read_text())
        if data.get("format") != CACHE_FORMAT:
            raise CacheError(f"{path}: unsupported cache format {data.get('format')!r}")
        for raw in data["entries"]:
            entry = CacheEntry.from_json(raw)
            if verify:
                bad = first_unreachable(build_staircase(entry.spec), entry.witness, entry.k)
                if bad is not None:
                    raise CacheError(f"{path}: cached witness for {entry.spec} misses vertex {bad}")
            cache.put(entry)
        return cache

    def save(self, path: Path | str | None = None) -> Path:
        path = Path(path) if path else self.path
        if path is None:
            raise CacheError("no path to save the cache to")
        path.parent.mkdir(parents=True, exist_ok=True)
        body = {"format": CACHE_FORMAT, "entries": [e.to_json() for e in self]}
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_text(json.dumps(body, indent=1) + "\n")
        os.replace(tmp, path)
        return path


_DEFAULT: WitnessCache | None = None


def default_cache() -> WitnessCache:
    """The cache shipped with the package (loaded once, verified)."""
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = WitnessCache.load(default_cache_path())
    return _DEFAULT
