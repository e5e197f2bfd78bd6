"""Run configuration: parsing, validation and round-tripping.

Config files are flat TOML. Outcome vectors are never positional: states
are given under ``states`` together with an explicit ``orientation`` of
``"mortality"`` or ``"success"``, and mortality inputs are converted to
success probabilities as soon as they are parsed::

    command = "scenario"
    design = [100, 99]
    rules = ["ttest", "es"]
    orientation = "mortality"
    states = [[0.25, 0.40], [0.25, 0.20]]

Errors point at the offending line of the file where possible.
"""

from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from .exceptions import ValidationError
from .montecarlo import DEFAULT_SEED
from .rules import RULE_NAMES
from .search import PRESETS, PipelineConfig
from .trial import complement

COMMANDS = ("scenario", "near-optimality", "bounds", "plan", "reproduce")
FORMATS = ("csv", "json", "markdown")
EVALUATORS = ("auto", "exact", "mc")
SEARCHES = ("auto", "full", "coarse-to-fine", "pipeline")
ORIENTATIONS = ("mortality", "success")
PIPELINE_KEYS = tuple(f.name for f in fields(PipelineConfig))


class ConfigError(ValidationError):
    """Invalid configuration, with the source location when known."""


@dataclass
class RunConfig:
    """Everything a CLI command needs.

    ``states`` always holds success probabilities; ``input_orientation``
    records how they were supplied.
    """

    command: str
    designs: list[tuple[int, ...]] = field(default_factory=list)
    rules: tuple[str, ...] = ("ttest", "es")
    alpha: float = 0.05
    input_orientation: str | None = None
    states: list[tuple[float, ...]] = field(default_factory=list)
    evaluator: str = "auto"
    n_sims: int = 1_000_000
    seed: int = DEFAULT_SEED
    search: str = "auto"
    grid_points: int = 1000
    pipeline: str = "desk"
    pipeline_overrides: dict[str, Any] = field(default_factory=dict)
    V: float = 1.0
    L: tuple[int, ...] = ()
    n: tuple[int, ...] = ()
    target: float | None = None
    shape: tuple[int, ...] = (1, 1)
    n_max: int = 20000
    decimals: int | None = None
    table: int | None = None
    budget: str = "desk"
    format: str = "markdown"
    out: str | None = None
    threads: int = 1
    checkpoint: str | None = None

    def pipeline_config(self) -> PipelineConfig:
        base = asdict(PRESETS[self.pipeline])
        base.update(self.pipeline_overrides)
        return PipelineConfig(**base)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["designs"] = [list(x) for x in self.designs]
        d["states"] = [list(x) for x in self.states]
        d["orientation"] = "success" if self.states else self.input_orientation
        for key in ("rules", "L", "n", "shape"):
            d[key] = list(d[key])
        return d

    @classmethod
    def from_dict(cls, data: dict, source: str = "<dict>", text: str | None = None) -> "RunConfig":
        return _parse(dict(data), source, text)


# parsing ---------------------------------------------------------------------


def _line_of(text: str | None, key: str) -> int | None:
    if not text:
        return None
    pat = re.compile(rf'^\s*"?{re.escape(key)}"?\s*[=:]')
    for i, line in enumerate(text.splitlines(), 1):
        if pat.search(line):
            return i
    return None


def _fail(msg, key, source, text):
    line = _line_of(text, key) if key else None
    where = f"{source}:{line}" if line else source
    raise ConfigError(f"{where}: {msg}")


def _int(v, key, source, text, lo=None):
    if isinstance(v, bool) or not isinstance(v, int):
        _fail(f"{key} must be an integer, got {v!r}", key, source, text)
    if lo is not None and v < lo:
        _fail(f"{key} must be >= {lo}, got {v}", key, source, text)
    return v


def _float(v, key, source, text):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        _fail(f"{key} must be a number, got {v!r}", key, source, text)
    return float(v)


def _choice(v, key, options, source, text):
    if v not in options:
        _fail(f"{key} must be one of {', '.join(options)}; got {v!r}", key, source, text)
    return v


def _int_list(v, key, source, text, lo=1, allow_empty=False):
    if not isinstance(v, (list, tuple)) or not (v or allow_empty):
        _fail(f"{key} must be a non-empty list of integers", key, source, text)
    return tuple(_int(x, key, source, text, lo) for x in v)


def _parse(raw: dict, source: str, text: str | None) -> RunConfig:
    known = {f.name for f in fields(RunConfig)} | {"design", "orientation", "rule"} \
        | set(PIPELINE_KEYS)
    for key in raw:
        if key not in known:
            _fail(f"unknown key {key!r}", key, source, text)
    if "command" not in raw:
        raise ConfigError(f"{source}: missing required key 'command'")
    kw: dict[str, Any] = {"command": _choice(raw.pop("command"), "command", COMMANDS, source, text)}

    if "design" in raw and "designs" in raw:
        _fail("give either design or designs, not both", "designs", source, text)
    if "design" in raw:
        kw["designs"] = [_int_list(raw.pop("design"), "design", source, text)]
    if "designs" in raw:
        ds = raw.pop("designs")
        if not isinstance(ds, list):
            _fail("designs must be a list of designs", "designs", source, text)
        kw["designs"] = [_int_list(d, "designs", source, text) for d in ds]
    for d in kw.get("designs", []):
        if len(d) < 2:
            _fail(f"a design needs at least two arms, got {list(d)}", "design", source, text)

    if "rule" in raw and "rules" in raw:
        _fail("give either rule or rules, not both", "rules", source, text)
    rules = raw.pop("rules", None) or ([raw.pop("rule")] if "rule" in raw else None)
    if rules is not None:
        if isinstance(rules, str):
            rules = [rules]
        kw["rules"] = tuple(_choice(r, "rules", RULE_NAMES, source, text) for r in rules)

    if "alpha" in raw:
        a = _float(raw.pop("alpha"), "alpha", source, text)
        if not 0 < a < 1:
            _fail(f"alpha must lie in (0, 1), got {a}", "alpha", source, text)
        kw["alpha"] = a

    orient = raw.pop("orientation", None)
    declared = raw.pop("input_orientation", None)
    if raw.get("states") == []:
        raw.pop("states")
    if "states" in raw:
        if orient is None:
            _fail("states need an explicit orientation = \"mortality\" or \"success\"",
                  "states", source, text)
        _choice(orient, "orientation", ORIENTATIONS, source, text)
        states = raw.pop("states")
        if not isinstance(states, list):
            _fail("states must be a list of probability vectors", "states", source, text)
        parsed = []
        for s in states:
            if not isinstance(s, list) or not s:
                _fail(f"each state must be a list of probabilities, got {s!r}", "states", source,
                      text)
            vec = tuple(_float(x, "states", source, text) for x in s)
            if any(not 0.0 <= x <= 1.0 for x in vec):
                _fail(f"probabilities must lie in [0, 1], got {list(vec)}", "states", source, text)
            parsed.append(tuple(complement(x) for x in vec) if orient == "mortality" else vec)
        kw["states"] = parsed
        kw["input_orientation"] = declared or orient
    elif orient is not None and declared is None:
        kw["input_orientation"] = _choice(orient, "orientation", ORIENTATIONS, source, text)
    elif declared is not None:
        kw["input_orientation"] = declared

    for key, options in (("evaluator", EVALUATORS), ("search", SEARCHES),
                         ("pipeline", tuple(PRESETS)), ("budget", ("desk", "full")),
                         ("format", FORMATS)):
        if key in raw:
            kw[key] = _choice(raw.pop(key), key, options, source, text)
    for key, lo in (("n_sims", 1), ("seed", 0), ("grid_points", 2), ("n_max", 1),
                    ("threads", 1)):
        if key in raw:
            kw[key] = _int(raw.pop(key), key, source, text, lo)
    if kw.get("seed", 0) >= 2 ** 64:
        _fail("seed must fit in 64 bits", "seed", source, text)
    if "decimals" in raw:
        d = raw.pop("decimals")
        kw["decimals"] = None if d is None else _int(d, "decimals", source, text, 0)
    if "table" in raw:
        t = raw.pop("table")
        kw["table"] = None if t is None else _int(t, "table", source, text, 1)
        if kw["table"] is not None and kw["table"] > 4:
            _fail("table must be 1, 2, 3 or 4", "table", source, text)
    if "V" in raw:
        v = _float(raw.pop("V"), "V", source, text)
        if v < 0:
            _fail(f"V must be >= 0, got {v}", "V", source, text)
        kw["V"] = v
    for key, lo in (("L", 2), ("n", 1)):
        if key in raw:
            v = raw.pop(key)
            kw[key] = _int_list(v if isinstance(v, list) else [v], key, source, text, lo,
                                allow_empty=True)
    if "shape" in raw:
        kw["shape"] = _int_list(raw.pop("shape"), "shape", source, text)
    if "target" in raw:
        t = raw.pop("target")
        kw["target"] = None if t is None else _float(t, "target", source, text)
        if kw["target"] is not None and kw["target"] <= 0:
            _fail("target must be positive", "target", source, text)
    for key in ("out", "checkpoint"):
        if key in raw:
            v = raw.pop(key)
            if v is not None and not isinstance(v, str):
                _fail(f"{key} must be a path string", key, source, text)
            kw[key] = v

    overrides = dict(raw.pop("pipeline_overrides", None) or {})
    for key in PIPELINE_KEYS:
        if key in raw:
            overrides[key] = raw.pop(key)
    for key, v in overrides.items():
        if key not in PIPELINE_KEYS:
            _fail(f"unknown pipeline setting {key!r}", key, source, text)
        if key in ("step1", "step2_exact_es"):
            if not isinstance(v, bool):
                _fail(f"{key} must be true or false", key, source, text)
        else:
            _int(v, key, source, text, 1)
    kw["pipeline_overrides"] = overrides
    cfg = RunConfig(**kw)
    try:
        cfg.pipeline_config()
    except ValidationError as exc:
        raise ConfigError(f"{source}: {exc}") from None
    return cfg


def load_config(path: str | Path) -> RunConfig:
    """Read a TOML (or JSON, by extension) config file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    if path.suffix.lower() == ".json":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{exc.lineno}: {exc.msg}") from None
        if isinstance(raw, dict) and "config" in raw and "schema_version" in raw:
            raw = raw["config"]  # a result document
    else:
        try:
            raw = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            msg = str(exc)
            m = re.search(r"\(at line (\d+), column (\d+)\)", msg)
            if m:
                msg = msg[: m.start()].strip()
                raise ConfigError(f"{path}:{m.group(1)}:{m.group(2)}: {msg}") from None
            raise ConfigError(f"{path}: {msg}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a table of keys")
    return _parse(raw, str(path), text)
