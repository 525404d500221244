"""Canonical JSON rendering shared by the model file, reports, and the API.

One serialization everywhere keeps file bytes and HTTP responses
deterministic: UTF-8, no whitespace, insertion-ordered keys, and no bare
NaN/Infinity literals (callers must map non-finite values explicitly).
"""

from __future__ import annotations

import json
from typing import Any


def canon_dumps(obj: Any) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"), allow_nan=False)


def canon_bytes(obj: Any) -> bytes:
    return canon_dumps(obj).encode("utf-8")
