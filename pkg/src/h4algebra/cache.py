"""On-disk cache for expensive derived artifacts.

One artifact per file.  The first line is a header carrying the artifact
kind, the hash of the derivation inputs and the hash of the body; the body
is the canonical JSON serialization of the payload.  A load succeeds only on
an exact input-hash match, and the caller re-validates the payload with one
spot identity before trusting it.
"""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

__all__ = [
    "ARTIFACT_KINDS",
    "CacheCorrupted",
    "CacheEntry",
    "CacheStore",
    "canonical_json",
    "input_hash",
]

ARTIFACT_KINDS = ("group", "tau", "hamiltonian", "integral", "boundary")
FORMAT_VERSION = 1
_MAGIC = "h4algebra-cache"


class CacheCorrupted(ValueError):
    """A cache file failed its header, content-hash or spot-identity check."""


def canonical_json(obj: Any) -> str:
    """Deterministic JSON: sorted keys, no insignificant whitespace."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _sha256(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def input_hash(kind: str, inputs: Any) -> str:
    """Hash identifying a derivation: kind, cache format and its inputs."""
    return _sha256(canonical_json({"kind": kind, "format": FORMAT_VERSION, "inputs": inputs}))


@dataclass(frozen=True)
class CacheEntry:
    kind: str
    input_hash: str
    payload: Any

    def body(self) -> str:
        return canonical_json(self.payload)

    def serialize(self) -> str:
        body = self.body()
        header = f"{_MAGIC} v{FORMAT_VERSION} kind={self.kind} input={self.input_hash} content={_sha256(body)}"
        return header + "\n" + body + "\n"

    @classmethod
    def parse(cls, text: str) -> CacheEntry:
        header, sep, rest = text.partition("\n")
        if not sep:
            raise CacheCorrupted("missing header line")
        fields = header.split()
        if len(fields) != 5 or fields[0] != _MAGIC or fields[1] != f"v{FORMAT_VERSION}":
            raise CacheCorrupted(f"bad header {header!r}")
        try:
            meta = dict(f.split("=", 1) for f in fields[2:])
            kind, ihash, chash = meta["kind"], meta["input"], meta["content"]
        except (KeyError, ValueError):
            raise CacheCorrupted(f"bad header {header!r}") from None
        body = rest[:-1] if rest.endswith("\n") else rest
        if _sha256(body) != chash:
            raise CacheCorrupted(f"content hash mismatch in {kind} artifact")
        try:
            payload = json.loads(body)
        except json.JSONDecodeError as exc:
            raise CacheCorrupted(f"unreadable {kind} artifact: {exc}") from None
        return cls(kind, ihash, payload)


class CacheStore:
    """A directory of cache files, one per artifact kind."""

    def __init__(self, directory: str | os.PathLike):
        self.directory = Path(directory)

    def path(self, kind: str) -> Path:
        if kind not in ARTIFACT_KINDS:
            raise ValueError(f"unknown artifact kind {kind!r}")
        return self.directory / f"{kind}.cache"

    def load(self, kind: str, ihash: str, validate: Callable[[Any], bool] | None = None) -> Any | None:
        """Payload for ``kind`` if present with input hash ``ihash``, else None.

        Raises :class:`CacheCorrupted` if the file is damaged or ``validate``
        rejects the payload.
        """
        path = self.path(kind)
        if not path.exists():
            return None
        entry = CacheEntry.parse(path.read_text(encoding="utf-8"))
        if entry.kind != kind:
            raise CacheCorrupted(f"{path.name} holds a {entry.kind} artifact")
        if entry.input_hash != ihash:
            return None
        if validate is not None and not validate(entry.payload):
            raise CacheCorrupted(f"{kind} artifact fails its spot identity")
        return entry.payload

    def save(self, kind: str, ihash: str, payload: Any) -> Path:
        """Write atomically (temporary file plus rename)."""
        path = self.path(kind)
        self.directory.mkdir(parents=True, exist_ok=True)
        text = CacheEntry(kind, ihash, payload).serialize()
        fd, tmp = tempfile.mkstemp(dir=self.directory, prefix=f".{kind}.")
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
        return path
