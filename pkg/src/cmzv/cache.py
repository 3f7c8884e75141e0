"""Disk cache for evaluated quantities, keyed by (spec hash, working digits).

Values are stored with hex-encoded significands (sign, mantissa, binary
exponent), so a cache hit reproduces the original mpf bit for bit on any
platform.  The cache is a single JSON file per directory; corruption or
version mismatch simply drops the cache.
"""

from __future__ import annotations

import hashlib
import json
import os
from typing import Optional

import mpmath as mp

_CACHE_VERSION = 1
_FILENAME = "cmzv-cache.json"


def _mpf_to_hex(x) -> str:
    sign, man, exp, _ = mp.mpf(x)._mpf_
    return f"{'-' if sign else '+'}{hex(man)}p{exp}"


def _hex_to_mpf(s: str):
    sign = 1 if s[0] == "-" else 0
    man_s, exp_s = s[1:].split("p")
    return mp.mpf(mp.libmp.from_man_exp((-1 if sign else 1) * int(man_s, 16),
                                        int(exp_s)))


def spec_key(kind: str, payload: dict, working_digits: int) -> str:
    blob = json.dumps({"kind": kind, "payload": payload}, sort_keys=True,
                      separators=(",", ":"))
    digest = hashlib.sha256(blob.encode()).hexdigest()[:32]
    return f"{digest}-{working_digits}"


class ResultCache:
    def __init__(self, directory: str):
        self.directory = directory
        self.path = os.path.join(directory, _FILENAME)
        self._data = None

    def _load(self) -> dict:
        if self._data is None:
            try:
                with open(self.path, "r", encoding="utf-8") as fh:
                    raw = json.load(fh)
                if raw.get("version") == _CACHE_VERSION:
                    self._data = raw.get("entries", {})
                else:
                    self._data = {}
            except (OSError, json.JSONDecodeError):
                self._data = {}
        return self._data

    def get(self, key: str):
        entry = self._load().get(key)
        if entry is None:
            return None
        return mp.mpc(_hex_to_mpf(entry["re"]), _hex_to_mpf(entry["im"]))

    def put(self, key: str, value) -> None:
        value = mp.mpc(value)
        data = self._load()
        data[key] = {"re": _mpf_to_hex(mp.re(value)), "im": _mpf_to_hex(mp.im(value))}
        os.makedirs(self.directory, exist_ok=True)
        tmp = self.path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump({"version": _CACHE_VERSION, "entries": data}, fh)
        os.replace(tmp, self.path)

    def stats(self) -> dict:
        data = self._load()
        size = os.path.getsize(self.path) if os.path.exists(self.path) else 0
        return {"entries": len(data), "file": self.path, "bytes": size}

    def clear(self) -> int:
        n = len(self._load())
        self._data = {}
        if os.path.exists(self.path):
            os.remove(self.path)
        return n
