"""Share-by-URL codec: program + config + options packed into a fragment.

The fragment is `s=` followed by unpadded base64url of the UTF-8 JSON
serialization with sorted keys, so encoding is deterministic and the
round-trip is exact.
"""
from __future__ import annotations

import base64
import json

VERSION = 1
KNOWN_LANGUAGES = ("universal",)


class ShareError(Exception):
    pass


def encode_share(payload: dict) -> str:
    record = {
        "v": VERSION,
        "language": payload["language"],
        "program": payload["program"],
        "config": payload["config"],
        "options": payload.get("options", {}),
    }
    raw = json.dumps(record, sort_keys=True, separators=(",", ":")).encode("utf-8")
    encoded = base64.urlsafe_b64encode(raw).decode("ascii").rstrip("=")
    return f"s={encoded}"


def decode_share(fragment: str) -> dict:
    if fragment.startswith("#"):
        fragment = fragment[1:]
    if not fragment.startswith("s="):
        raise ShareError("fragment does not carry a shared state")
    data = fragment[2:]
    pad = "=" * (-len(data) % 4)
    try:
        raw = base64.urlsafe_b64decode(data + pad)
    except (ValueError, base64.binascii.Error) as exc:  # type: ignore[attr-defined]
        raise ShareError(f"malformed base64: {exc}") from exc
    try:
        record = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ShareError(f"malformed payload: {exc}") from exc
    if not isinstance(record, dict):
        raise ShareError("payload is not an object")
    if record.get("v") != VERSION:
        raise ShareError(f"unsupported share version {record.get('v')!r}")
    if record.get("language") not in KNOWN_LANGUAGES:
        raise ShareError(f"unsupported language {record.get('language')!r}")
    for key in ("program", "config"):
        if key not in record:
            raise ShareError(f"payload misses {key!r}")
    record.setdefault("options", {})
    if not isinstance(record["options"], dict):
        raise ShareError("options must be an object")
    return record
