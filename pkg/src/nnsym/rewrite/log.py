"""Line-delimited JSON records of applied rewrites."""
from __future__ import annotations

import hashlib
import json
from typing import Any

from ..network import Network


def _hash(x: Any) -> str:
    if isinstance(x, Network):
        return x.content_hash()
    if hasattr(x, "to_dict"):
        x = x.to_dict()
    return hashlib.sha256(json.dumps(x, sort_keys=True, default=str).encode()).hexdigest()


def record(op: str, inputs: list, result: Any) -> dict:
    return {"op": op, "inputs": [_hash(x) for x in inputs], "result-hash": _hash(result)}


class RewriteLog:
    def __init__(self, path=None):
        self.path = path
        self.records: list[dict] = []

    def add(self, op: str, inputs: list, result: Any) -> dict:
        rec = record(op, inputs, result)
        self.records.append(rec)
        if self.path is not None:
            with open(self.path, "a") as fh:
                fh.write(json.dumps(rec, sort_keys=True) + "\n")
        return rec

    @staticmethod
    def read(path) -> list[dict]:
        with open(path) as fh:
            return [json.loads(line) for line in fh if line.strip()]
