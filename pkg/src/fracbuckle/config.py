"""Study configuration files.

A configuration is a sequence of ``[section]`` headers and ``key = value``
lines; ``#`` starts a comment. Values are numbers, bare or quoted words, or
bracketed comma-separated lists of those. The grammar is documented in
``docs/config.md``. Errors carry the offending line number.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable

from fracbuckle.beam import NonlocalityMode
from fracbuckle.errors import ConfigError
from fracbuckle.fem import BC
from fracbuckle.kernel import LengthScale
from fracbuckle.plate import LoadCase
from fracbuckle.study import StudyKind, StudySpec, Structure

_SECTION = re.compile(r"^\[\s*([A-Za-z_]+)\s*\]$")
_ASSIGN = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.*)$")


@dataclass(frozen=True)
class _Key:
    field: str
    convert: Callable
    many: bool = False
    required: bool = False


def _alpha(v):
    v = float(v)
    if not 0.0 < v <= 1.0:
        raise ValueError(f"alpha = {v} outside (0, 1]")
    return v


def _ratio(v):
    v = float(v)
    if not 0.0 < v <= 1.0:
        raise ValueError(f"lf_ratio = {v} outside (0, 1]")
    return v


def _positive_int(v):
    f = float(v)
    if f != int(f) or f < 1:
        raise ValueError(f"expected a positive integer, got {v}")
    return int(f)


def _positive(v):
    v = float(v)
    if not v > 0:
        raise ValueError(f"expected a positive number, got {v}")
    return v


def _enum(cls):
    def convert(v):
        try:
            return cls(str(v).lower() if cls is not BC else str(v).upper())
        except ValueError:
            choices = ", ".join(m.value for m in cls)
            raise ValueError(f"{v!r} is not one of: {choices}") from None

    return convert


SCHEMA: dict[str, dict[str, _Key]] = {
    "structure": {
        "type": _Key("structure", _enum(Structure), required=True),
        "slenderness": _Key("slenderness", _positive),
        "E": _Key("E", _positive),
        "nu": _Key("nu", float),
    },
    "fractional": {
        "alpha": _Key("alphas", _alpha, many=True, required=True),
        "lf_ratio": _Key("lf_ratios", _ratio, many=True, required=True),
        "length_scale": _Key("length_scale", _enum(LengthScale)),
    },
    "mesh": {
        "n_inf": _Key("n_infs", _positive_int, many=True),
        "n_samples": _Key("n_samples", _positive_int),
    },
    "bc": {
        "bc": _Key("bc", _enum(BC), required=True),
        "load": _Key("load", _enum(LoadCase)),
    },
    "study": {
        "kind": _Key("kind", _enum(StudyKind)),
        "modes": _Key("modes", _enum(NonlocalityMode), many=True),
    },
}


def _scalar(text: str):
    text = text.strip()
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "\"'":
        return text[1:-1]
    if not text:
        raise ValueError("empty value")
    return text


def _value(text: str):
    text = text.strip()
    if text.startswith("["):
        if not text.endswith("]"):
            raise ValueError("unterminated list")
        body = text[1:-1].strip()
        if not body:
            raise ValueError("empty list")
        return [_scalar(item) for item in body.split(",")]
    return _scalar(text)


def _strip_comment(line: str) -> str:
    out, quote = [], None
    for ch in line:
        if quote:
            if ch == quote:
                quote = None
        elif ch in "\"'":
            quote = ch
        elif ch == "#":
            break
        out.append(ch)
    return "".join(out).strip()


def parse_config(text: str) -> StudySpec:
    """Parse and validate a configuration document into a :class:`StudySpec`."""
    fields: dict = {}
    seen: dict[tuple[str, str], int] = {}
    headers: dict[str, int] = {}
    section = None
    lineno = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue
        m = _SECTION.match(line)
        if m:
            section = m.group(1)
            if section not in SCHEMA:
                raise ConfigError(f"unknown section [{section}]", lineno)
            if section in headers:
                raise ConfigError(f"section [{section}] repeated", lineno)
            headers[section] = lineno
            continue
        m = _ASSIGN.match(line)
        if not m:
            raise ConfigError(f"cannot parse {raw.strip()!r}", lineno)
        if section is None:
            raise ConfigError("key outside of any section", lineno)
        name, rhs = m.groups()
        spec = SCHEMA[section].get(name)
        if spec is None:
            raise ConfigError(f"unknown key {name!r} in [{section}]", lineno)
        if (section, name) in seen:
            raise ConfigError(f"key {name!r} repeated", lineno)
        seen[(section, name)] = lineno
        try:
            value = _value(rhs)
            if isinstance(value, list):
                if not spec.many:
                    raise ValueError(f"{name} takes a single value")
                value = tuple(spec.convert(v) for v in value)
            else:
                value = spec.convert(value)
                if spec.many:
                    value = (value,)
        except ValueError as exc:
            raise ConfigError(f"{name}: {exc}", lineno) from None
        fields[spec.field] = value

    for sec, keys in SCHEMA.items():
        for name, spec in keys.items():
            if spec.required and (sec, name) not in seen:
                where = headers.get(sec, lineno)
                raise ConfigError(f"missing required key {name!r} in [{sec}]", where)

    kind = fields.get("kind", StudyKind.SINGLE)
    if "modes" not in fields and kind is StudyKind.PARAMETRIC:
        fields["modes"] = (NonlocalityMode.MATERIAL, NonlocalityMode.GEOMETRIC)
    try:
        return StudySpec(**fields)
    except ConfigError as exc:
        raise ConfigError(str(exc), _blame(str(exc), seen)) from None


def _blame(message: str, seen: dict[tuple[str, str], int]):
    """Best-effort line for a cross-field error: the first key it mentions."""
    for (_, name), line in seen.items():
        if name in message:
            return line
    return None


def _fmt(v) -> str:
    if isinstance(v, tuple):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    if hasattr(v, "value"):
        return str(v.value)
    return repr(v) if isinstance(v, float) else str(v)


def format_config(spec: StudySpec) -> str:
    """Canonical text form; :func:`parse_config` maps it back to an equal spec."""
    lines = []
    for sec, keys in SCHEMA.items():
        lines.append(f"[{sec}]")
        for name, key in keys.items():
            v = getattr(spec, key.field)
            if v is None:
                continue
            lines.append(f"{name} = {_fmt(v)}")
        lines.append("")
    return "\n".join(lines)


def load_config(path) -> StudySpec:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
