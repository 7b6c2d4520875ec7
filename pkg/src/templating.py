"""
Jinja2 environment for the text artifacts: the effective-configuration echo
and the key=value reports.

Values pass through one of two filters so that numbers survive a round trip:
`toml` renders TOML literals, `kv` renders report values. Floats use `repr`.
"""

from enum import Enum
from pathlib import Path
from typing import Any

import orjson
from jinja2 import Environment, FileSystemLoader, StrictUndefined


def toml_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Enum):
        value = value.value
    if isinstance(value, str):
        return orjson.dumps(value).decode()
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(toml_value(item) for item in value) + "]"
    raise TypeError(f"cannot render {type(value).__name__} as TOML")


def kv_value(value: Any) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ",".join(kv_value(item) for item in value)
    return str(value)


templates = Environment(
    loader=FileSystemLoader(Path(__file__).parent / "templates"),
    undefined=StrictUndefined,
    keep_trailing_newline=True,
    trim_blocks=True,
    lstrip_blocks=True,
    autoescape=False,
)
templates.filters["toml"] = toml_value
templates.filters["kv"] = kv_value


def render(name: str, **context: Any) -> str:
    return templates.get_template(name).render(**context)
