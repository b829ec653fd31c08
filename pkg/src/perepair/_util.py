"""Small shared plumbing: canonical JSON, digests, atomic file writes."""

import hashlib
import json
import os
import tempfile


def canonical_json(payload) -> str:
    """Deterministic JSON used for digests and on-disk files."""
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def digest_of(payload) -> str:
    """SHA-256 hex digest of the canonical JSON serialization."""
    return hashlib.sha256(canonical_json(payload).encode("ascii")).hexdigest()


def atomic_write_text(path, text: str) -> None:
    """Write a file via temp-and-rename so readers never see partial output."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
