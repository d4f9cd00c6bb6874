"""JSON and DOT serialization of posets.

JSON poset format::

    {"n": 3, "labels": ["a", "b", "c"], "covers": [[0, 1], [1, 2]]}

``labels`` is optional. The order is the reflexive-transitive closure of
``covers``.
"""
from __future__ import annotations

import json
from typing import Any, Sequence

from .poset import FinitePoset, PosetError, rank_function


class FormatError(ValueError):
    pass


def poset_to_json(p: FinitePoset) -> dict[str, Any]:
    out: dict[str, Any] = {"n": p.size}
    if p.labels is not None:
        out["labels"] = list(p.labels)
    out["covers"] = [list(c) for c in p.cover_pairs()]
    return out


def poset_from_json(data: Any) -> FinitePoset:
    if not isinstance(data, dict):
        raise FormatError("poset JSON must be an object")
    n = data.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise FormatError("'n' must be a non-negative integer")
    covers = data.get("covers", [])
    if not isinstance(covers, list) or not all(
            isinstance(c, list) and len(c) == 2 and all(isinstance(v, int) for v in c) for c in covers):
        raise FormatError("'covers' must be a list of [lower, upper] integer pairs")
    labels = data.get("labels")
    if labels is not None and (not isinstance(labels, list) or len(labels) != n):
        raise FormatError(f"'labels' must be a list of {n} strings")
    try:
        return FinitePoset.from_covers(n, covers, labels)
    except PosetError as exc:
        raise FormatError(str(exc)) from None


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2) + "\n"


def dumps_poset(p: FinitePoset) -> str:
    # one cover per line keeps large files diffable
    lines = ["{", f'  "n": {p.size},']
    if p.labels is not None:
        lines.append(f'  "labels": {json.dumps(list(p.labels))},')
    covers = ",\n    ".join(json.dumps(list(c)) for c in p.cover_pairs())
    lines.append(f'  "covers": [\n    {covers}\n  ]' if covers else '  "covers": []')
    lines.append("}")
    return "\n".join(lines) + "\n"


def read_poset(path: str) -> FinitePoset:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: malformed JSON ({exc})") from None
    return poset_from_json(data)


def to_dot(p: FinitePoset, ranks: Sequence[int] | None = None, with_ranks: bool = True,
           name: str = "hasse") -> str:
    """Hasse diagram, edges pointing upward; graded posets are drawn in rank layers."""
    if ranks is None and with_ranks:
        ranks = rank_function(p)
    lines = [f"digraph {name} {{", "  rankdir=BT;", "  node [shape=box, fontsize=10];"]
    for i in range(p.size):
        text = p.label(i)
        if ranks is not None and with_ranks:
            text = f"{text}\\nrank {ranks[i]}"
        lines.append(f'  n{i} [label="{_escape(text)}"];')
    for a, b in p.cover_pairs():
        lines.append(f"  n{a} -> n{b};")
    if ranks is not None:
        layers: dict[int, list[int]] = {}
        for i, r in enumerate(ranks):
            layers.setdefault(r, []).append(i)
        for r in sorted(layers):
            members = " ".join(f"n{i};" for i in layers[r])
            lines.append(f"  {{ rank=same; {members} }}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _escape(s: str) -> str:
    return s.replace('"', '\\"')
