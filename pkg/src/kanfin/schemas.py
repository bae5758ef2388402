"""JSON schemas for the input files and the run report."""

from __future__ import annotations

FORMAT_VERSION = 1

_nat = {"type": "integer", "minimum": 0}
_table = {"type": "array", "items": _nat}

CATEGORY = {
    "type": "object",
    "required": ["objects", "morphisms", "identities", "compose"],
    "properties": {
        "objects": {"oneOf": [_nat, {"type": "array"}]},
        "morphisms": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "dom", "cod"],
                "properties": {"id": _nat, "dom": _nat, "cod": _nat},
            },
        },
        "identities": _table,
        "compose": {"type": "array", "items": {"type": "array", "items": _nat, "minItems": 3, "maxItems": 3}},
        "name": {"type": "string"},
    },
}

FUNCTOR = {
    "type": "object",
    "required": ["obj_map", "mor_map"],
    "properties": {"obj_map": _table, "mor_map": _table},
}

MONOID = {
    "type": "object",
    "required": ["size", "unit", "table"],
    "properties": {"size": _nat, "unit": _nat, "table": {"type": "array", "items": _table}, "name": {"type": "string"}},
}

DIAGRAM = {
    "type": "object",
    "required": ["shape", "on_objects", "on_morphisms"],
    "properties": {
        "shape": CATEGORY,
        "on_objects": _table,
        "on_morphisms": {"type": "array", "items": _table},
    },
}

REPORT = {
    "type": "object",
    "required": ["format_version", "command", "verdicts", "result", "witnesses", "stats"],
    "properties": {
        "format_version": {"const": FORMAT_VERSION},
        "command": {"type": "array", "items": {"type": "string"}},
        "verdicts": {
            "type": "object",
            "additionalProperties": {"enum": ["pass", "fail", "resource"]},
        },
        "result": {"type": "object"},
        "witnesses": {"type": "object"},
        "stats": {"type": "object"},
        "timestamp": {"type": "string"},
        "error": {"type": "string"},
    },
}

SCHEMAS = {"category": CATEGORY, "functor": FUNCTOR, "monoid": MONOID, "diagram": DIAGRAM, "report": REPORT}
