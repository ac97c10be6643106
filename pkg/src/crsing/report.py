"""Deterministic text and JSON reports."""

import hashlib
import json

from . import __version__


def _plain(value):
    """Evidence values become strings, lists, or dicts of those."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, bool) or value is None:
        return "true" if value else ("false" if value is False else "none")
    return str(value)


class Report:
    def __init__(self, kind, input_bytes=b"", seed=None):
        self.kind = kind
        self.verdict = None
        self.evidence = []
        self.provenance = {
            "input_sha256": hashlib.sha256(input_bytes).hexdigest(),
            "seed": "none" if seed is None else str(seed),
            "version": __version__,
        }

    def add(self, name, value):
        self.evidence.append((name, _plain(value)))
        return self

    def text(self):
        out = [f"task: {self.kind}", f"verdict: {self.verdict}"]
        for name, value in self.evidence:
            out.extend(_render(name, value, 0))
        out.append("provenance:")
        for k, v in self.provenance.items():
            out.append(f"  {k}: {v}")
        return "\n".join(out) + "\n"

    def as_dict(self):
        return {
            "task": self.kind,
            "verdict": self.verdict,
            "evidence": {name: value for name, value in self.evidence},
            "provenance": dict(self.provenance),
        }

    def json(self):
        return json.dumps(self.as_dict(), indent=2, sort_keys=False) + "\n"


def _render(name, value, depth):
    pad = "  " * depth
    if isinstance(value, dict):
        lines = [f"{pad}{name}:"]
        for k, v in value.items():
            lines.extend(_render(k, v, depth + 1))
        return lines
    if isinstance(value, list):
        lines = [f"{pad}{name}:"]
        for v in value:
            if isinstance(v, (dict, list)):
                lines.extend(_render("-", v, depth + 1))
            else:
                lines.append(f"{pad}  - {v}")
        return lines
    return [f"{pad}{name}: {value}"]
