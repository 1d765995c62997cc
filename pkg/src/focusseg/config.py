"""INI-style configuration: ``[section]`` headers and ``key = value`` lines.

Every key is optional; anything not given keeps the library default.
Unknown sections or keys, and values that do not parse, raise
:class:`ConfigError` carrying the offending line number.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .dct import BlurMapConfig, DcrParams, RefineParams
from .errors import ConfigError, FocusSegError
from .evaluation import ALPHA_SQ
from .pcnn import PcnnParams
from .segmentation import PipelineConfig


def _bool(text):
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _optional(parse):
    def inner(text):
        return None if text.lower() in ("none", "auto") else parse(text)

    inner.__name__ = f"optional {parse.__name__}"
    return inner


def _int(text):
    value = float(text)
    if not value.is_integer():
        raise ValueError(f"expected an integer, got {text!r}")
    return int(value)


def _choice(*options):
    def inner(text):
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}, got {text!r}")
        return text

    inner.__name__ = "|".join(options)
    return inner


def _real(text):
    return math.e if text.strip() == "e" else float(text)


def _weights(text):
    vals = [float(v) for v in text.replace(",", " ").split()]
    if len(vals) != 9:
        raise ValueError("weight matrix needs 9 numbers (row-major 3x3)")
    return np.array(vals).reshape(3, 3)


@dataclass(frozen=True)
class Settings:
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)
    alpha_sq: float = ALPHA_SQ
    empty: str = "one"
    edas_mode: str = "shortfall"


# section -> (default object, {key: parser}); keys are dataclass field names
SCHEMA = {
    "blurmap": (
        BlurMapConfig(),
        {
            "patch": _int,
            "sigma_blr": float,
            "blur_radius": _optional(_int),
            "ratio_floor": float,
            "dcr_input": _choice("ratio", "vector"),
            "bilateral": _bool,
            "bilateral_sigma_spatial": float,
            "bilateral_sigma_range": float,
            "refine": _bool,
            "threshold": _bool,
            "th1": float,
            "th2": _optional(float),
        },
    ),
    "dcr": (
        DcrParams(),
        {"l": _optional(_int), "h": _optional(_int), "a": float, "b": float, "y": float,
         "map_b": float, "map_base": _real},
    ),
    "refine": (
        RefineParams(),
        {"min_window": _int, "max_window": _int, "f_dct": float, "alpha_w": float,
         "beta_w": float, "descriptor_order": _int},
    ),
    "pcnn": (
        PcnnParams(),
        {"beta": float, "v_q": float, "d_q": float, "v_theta": float, "d_theta": float,
         "w": _weights, "max_iters": _int},
    ),
    "segment": (
        PipelineConfig(),
        {"area_threshold": _optional(float), "area_fraction": float, "wave_level": float},
    ),
    "eval": (Settings(), {"alpha_sq": float, "empty": _choice("one", "nan")}),
    "edas": (Settings(), {"edas_mode": _choice("shortfall", "canonical")}),
}


def _format_default(value):
    if value is None:
        return "auto"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, np.ndarray):
        return " ".join(f"{v:g}" for v in value.ravel())
    if isinstance(value, float):
        return "e" if value == math.e else repr(value)
    return str(value)


def defaults() -> list[tuple[str, str, str]]:
    """``(section, key, default)`` for every configurable key."""
    out = []
    for section, (obj, keys) in SCHEMA.items():
        for key in keys:
            out.append((section, key, _format_default(getattr(obj, key))))
    return out


def describe() -> str:
    lines = ["configuration keys (section.key = default):"]
    lines += [f"  {s}.{k} = {v}" for s, k, v in defaults()]
    return "\n".join(lines)


def parse_config(text: str) -> Settings:
    values: dict[str, dict[str, object]] = {s: {} for s in SCHEMA}
    lines_of: dict[tuple[str, str], int] = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line[0] in "#;":
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"malformed section header {line!r}", lineno)
            section = line[1:-1].strip()
            if section not in SCHEMA:
                raise ConfigError(f"unknown section [{section}]", lineno)
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", lineno)
        if section is None:
            raise ConfigError("key outside of any [section]", lineno)
        key, _, value = (part.strip() for part in line.partition("="))
        parsers = SCHEMA[section][1]
        if key not in parsers:
            raise ConfigError(f"unknown key {key!r} in [{section}]", lineno)
        if key in values[section]:
            raise ConfigError(f"duplicate key {key!r} in [{section}]", lineno)
        try:
            values[section][key] = parsers[key](value)
        except ValueError as exc:
            raise ConfigError(f"{section}.{key}: {exc}", lineno) from None
        lines_of[(section, key)] = lineno

    def build(section, base):
        try:
            return replace(base, **values[section])
        except (FocusSegError, ValueError) as exc:
            first = min((n for (s, _), n in lines_of.items() if s == section), default=None)
            raise ConfigError(f"[{section}]: {exc}", first) from None

    dcr = build("dcr", DcrParams())
    refine = build("refine", RefineParams())
    blur = build("blurmap", replace(BlurMapConfig(), dcr=dcr, refine_params=refine))
    pcnn = build("pcnn", PcnnParams())
    pipeline = build("segment", replace(PipelineConfig(), dct=blur, pcnn=pcnn))
    settings = Settings(pipeline=pipeline)
    settings = build("eval", settings)
    return build("edas", settings)


def load_config(path) -> Settings:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())

