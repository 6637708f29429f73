"""JSON scenario files.

Layout::

    {
      "signal": {"mean_dbm": 0},
      "threshold": {"beta_db": 0},
      "groups": [
        {"name": "macro", "dependent": false, "sources": [
            {"type": "exponential", "mean_dbm": -3},
            {"type": "lognormal_db", "mu_dbm": -10, "sigma_db": 8},
            {"type": "deterministic", "power_dbm": -20},
            {"type": "lognormal_exp_fading", "mu_dbm": -12, "sigma_db": 6},
            {"type": "empirical", "samples_dbm": [-20, -18.5, -25]}
        ]},
        {"name": "measured", "partial_outage": 0.01}
      ]
    }

Powers are in dBm and the threshold in dB; they are converted to linear
units here and nowhere else. Unknown keys are rejected. ``dependent``
defaults to false and ``sources`` may be omitted only when the group
supplies a measured ``partial_outage``.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Union

from .dist import (
    Deterministic,
    Empirical,
    Exponential,
    LognormalDb,
    LognormalTimesExpFading,
    PowerDistribution,
    dbm_to_mw,
    mw_to_dbm,
)
from .errors import DomainError, OutageError
from .model import InterferenceGroup, Scenario, SignalModel, Threshold

__all__ = ["ScenarioFileError", "load_scenario", "parse_scenario", "scenario_to_dict", "dump_scenario"]

_SOURCE_KEYS = {
    "exponential": ("mean_dbm",),
    "lognormal_db": ("mu_dbm", "sigma_db"),
    "deterministic": ("power_dbm",),
    "lognormal_exp_fading": ("mu_dbm", "sigma_db"),
    "empirical": ("samples_dbm",),
}


class ScenarioFileError(OutageError, ValueError):
    """Schema violation, carrying the offending key path and source line."""

    def __init__(self, message, path=(), line=None, filename=None):
        self.message = message
        self.path = tuple(path)
        self.line = line
        self.filename = filename
        super().__init__(str(self))

    @property
    def key_path(self) -> str:
        return format_path(self.path)

    def __str__(self):
        where = self.filename or "<scenario>"
        if self.line is not None:
            where = f"{where}:{self.line}"
        if self.path:
            return f"{where}: {self.key_path}: {self.message}"
        return f"{where}: {self.message}"


def format_path(path) -> str:
    out = ""
    for part in path:
        if isinstance(part, int):
            out += f"[{part}]"
        else:
            out += f".{part}" if out else str(part)
    return out or "<root>"


class _Invalid(Exception):
    def __init__(self, path, message):
        self.path = tuple(path)
        self.message = message


def _obj(value, path, required, optional=()):
    if not isinstance(value, dict):
        raise _Invalid(path, f"expected an object, got {_kind(value)}")
    for key in value:
        if key not in required and key not in optional:
            raise _Invalid((*path, key), "unknown key")
    for key in required:
        if key not in value:
            raise _Invalid((*path, key), "missing required key")
    return value


def _kind(value):
    return {dict: "object", list: "array", str: "string", bool: "boolean", type(None): "null"}.get(
        type(value), "number"
    )


def _number(value, path, *, allow_neg_inf=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise _Invalid(path, f"expected a number, got {_kind(value)}")
    if math.isnan(value) or (math.isinf(value) and not (allow_neg_inf and value < 0)):
        raise _Invalid(path, f"expected a finite number, got {value!r}")
    return float(value)


def _source(raw, path) -> PowerDistribution:
    if not isinstance(raw, dict):
        raise _Invalid(path, f"expected an object, got {_kind(raw)}")
    if "type" not in raw:
        raise _Invalid((*path, "type"), "missing required key")
    kind = raw["type"]
    if kind not in _SOURCE_KEYS:
        raise _Invalid((*path, "type"), f"unknown source type {kind!r}; expected one of {sorted(_SOURCE_KEYS)}")
    _obj(raw, path, ("type", *_SOURCE_KEYS[kind]))
    if kind == "exponential":
        return Exponential(dbm_to_mw(_number(raw["mean_dbm"], (*path, "mean_dbm"))))
    if kind == "deterministic":
        return Deterministic(dbm_to_mw(_number(raw["power_dbm"], (*path, "power_dbm"), allow_neg_inf=True)))
    if kind == "empirical":
        samples = raw["samples_dbm"]
        spath = (*path, "samples_dbm")
        if not isinstance(samples, list):
            raise _Invalid(spath, f"expected an array, got {_kind(samples)}")
        if not samples:
            raise _Invalid(spath, "must be nonempty")
        values = [_number(v, (*spath, i), allow_neg_inf=True) for i, v in enumerate(samples)]
        return Empirical(tuple(dbm_to_mw(v) for v in values))
    mu = _number(raw["mu_dbm"], (*path, "mu_dbm"))
    sigma = _number(raw["sigma_db"], (*path, "sigma_db"))
    if sigma < 0:
        raise _Invalid((*path, "sigma_db"), "must be >= 0")
    cls = LognormalDb if kind == "lognormal_db" else LognormalTimesExpFading
    return cls(mu, sigma)


def _group(raw, path, seen) -> InterferenceGroup:
    _obj(raw, path, ("name",), ("dependent", "sources", "partial_outage"))
    name = raw["name"]
    if not isinstance(name, str) or not name:
        raise _Invalid((*path, "name"), "expected a nonempty string")
    if name in seen:
        raise _Invalid((*path, "name"), f"duplicate group name {name!r}")
    seen.add(name)
    dependent = raw.get("dependent", False)
    if not isinstance(dependent, bool):
        raise _Invalid((*path, "dependent"), f"expected a boolean, got {_kind(dependent)}")
    measured = None
    if "partial_outage" in raw:
        measured = _number(raw["partial_outage"], (*path, "partial_outage"))
        if not 0.0 <= measured <= 1.0:
            raise _Invalid((*path, "partial_outage"), "must lie in [0, 1]")
    if "sources" not in raw:
        if measured is None:
            raise _Invalid((*path, "sources"), "missing required key")
        sources = []
    else:
        sources = raw["sources"]
    spath = (*path, "sources")
    if not isinstance(sources, list):
        raise _Invalid(spath, f"expected an array, got {_kind(sources)}")
    if not sources and measured is None:
        raise _Invalid(spath, "must be nonempty")
    dists = []
    for i, s in enumerate(sources):
        try:
            dists.append(_source(s, (*spath, i)))
        except DomainError as exc:
            raise _Invalid((*spath, i), str(exc)) from None
    return InterferenceGroup(name, tuple(dists), dependent, measured)


def _scenario(raw) -> Scenario:
    _obj(raw, (), ("signal", "threshold", "groups"))
    sig = _obj(raw["signal"], ("signal",), ("mean_dbm",))
    th = _obj(raw["threshold"], ("threshold",), ("beta_db",))
    mean_dbm = _number(sig["mean_dbm"], ("signal", "mean_dbm"))
    beta_db = _number(th["beta_db"], ("threshold", "beta_db"))
    groups = raw["groups"]
    if not isinstance(groups, list):
        raise _Invalid(("groups",), f"expected an array, got {_kind(groups)}")
    seen: set = set()
    parsed = [_group(g, ("groups", i), seen) for i, g in enumerate(groups)]
    try:
        signal = SignalModel(dbm_to_mw(mean_dbm))
    except DomainError as exc:
        raise _Invalid(("signal", "mean_dbm"), str(exc)) from None
    try:
        threshold = Threshold(dbm_to_mw(beta_db))
    except DomainError as exc:
        raise _Invalid(("threshold", "beta_db"), str(exc)) from None
    return Scenario(signal, threshold, tuple(parsed))


def parse_scenario(text: str, filename: str | None = None) -> Scenario:
    """Parse and validate scenario JSON text.

    Raises
    ------
    ScenarioFileError
        On malformed JSON or any schema violation; the error names the key
        path and the line it occurs on.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioFileError(f"invalid JSON: {exc.msg} (column {exc.colno})", line=exc.lineno, filename=filename) from None
    try:
        return _scenario(raw)
    except _Invalid as exc:
        raise ScenarioFileError(exc.message, exc.path, locate_line(text, exc.path), filename) from None
    except DomainError as exc:
        raise ScenarioFileError(str(exc), filename=filename) from None


def load_scenario(path: Union[str, Path]) -> Scenario:
    """Read a scenario file; unreadable files raise :class:`ScenarioFileError`."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ScenarioFileError(f"cannot read file: {exc}", filename=str(path)) from None
    return parse_scenario(text, str(path))


def _source_to_dict(d: PowerDistribution) -> dict:
    if isinstance(d, Exponential):
        return {"type": "exponential", "mean_dbm": mw_to_dbm(d.mean_mw)}
    if isinstance(d, Deterministic):
        return {"type": "deterministic", "power_dbm": mw_to_dbm(d.power_mw)}
    if isinstance(d, LognormalTimesExpFading):
        return {"type": "lognormal_exp_fading", "mu_dbm": d.mu_dbm, "sigma_db": d.sigma_db}
    if isinstance(d, LognormalDb):
        return {"type": "lognormal_db", "mu_dbm": d.mu_dbm, "sigma_db": d.sigma_db}
    if isinstance(d, Empirical):
        return {"type": "empirical", "samples_dbm": [mw_to_dbm(x) for x in d.samples_mw]}
    raise TypeError(f"cannot serialise {d!r}")


def scenario_to_dict(sc: Scenario) -> dict[str, Any]:
    """Inverse of :func:`parse_scenario` up to dB round-off."""
    groups = []
    for g in sc.groups:
        entry: dict[str, Any] = {"name": g.name, "dependent": g.dependent}
        if g.sources:
            entry["sources"] = [_source_to_dict(d) for d in g.sources]
        if g.measured_partial is not None:
            entry["partial_outage"] = g.measured_partial
        groups.append(entry)
    return {
        "signal": {"mean_dbm": mw_to_dbm(sc.signal.mean_power_mw)},
        "threshold": {"beta_db": mw_to_dbm(sc.threshold.beta_linear)},
        "groups": groups,
    }


def dump_scenario(sc: Scenario, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(sc), indent=2) + "\n", encoding="utf-8")


# --- line lookup -----------------------------------------------------------

def locate_line(text: str, path) -> int | None:
    """1-based line of the value (or key) addressed by ``path`` in ``text``.

    Walks the raw JSON text, so it works on documents that parsed but failed
    validation. Returns the line of the deepest component it could reach.
    """
    pos = _skip_ws(text, 0)
    for part in path:
        found = _find_key(text, pos, part) if isinstance(part, str) else _find_index(text, pos, part)
        if found is None:
            break
        pos = found
    return text.count("\n", 0, pos) + 1


def _skip_ws(text, i):
    while i < len(text) and text[i] in " \t\r\n":
        i += 1
    return i


def _skip_string(text, i):
    # text[i] == '"'; returns index after the closing quote
    i += 1
    while i < len(text):
        c = text[i]
        if c == "\\":
            i += 2
            continue
        if c == '"':
            return i + 1
        i += 1
    return i


def _skip_value(text, i):
    i = _skip_ws(text, i)
    if i >= len(text):
        return i
    c = text[i]
    if c == '"':
        return _skip_string(text, i)
    if c in "{[":
        depth = 0
        while i < len(text):
            c = text[i]
            if c == '"':
                i = _skip_string(text, i)
                continue
            if c in "{[":
                depth += 1
            elif c in "}]":
                depth -= 1
                if depth == 0:
                    return i + 1
            i += 1
        return i
    while i < len(text) and text[i] not in ",}] \t\r\n":
        i += 1
    return i


def _find_key(text, pos, key):
    i = _skip_ws(text, pos)
    if i >= len(text) or text[i] != "{":
        return None
    i += 1
    while True:
        i = _skip_ws(text, i)
        if i >= len(text) or text[i] != '"':
            return None
        start = i
        i = _skip_string(text, i)
        try:
            name = json.loads(text[start:i])
        except json.JSONDecodeError:
            return None
        i = _skip_ws(text, i)
        if i >= len(text) or text[i] != ":":
            return None
        if name == key:
            value_start = _skip_ws(text, i + 1)
            return value_start if value_start < len(text) else start
        i = _skip_ws(text, _skip_value(text, i + 1))
        if i >= len(text) or text[i] != ",":
            return None
        i += 1


def _find_index(text, pos, index):
    i = _skip_ws(text, pos)
    if i >= len(text) or text[i] != "[":
        return None
    i += 1
    for _ in range(index):
        i = _skip_ws(text, _skip_value(text, i))
        if i >= len(text) or text[i] != ",":
            return None
        i += 1
    i = _skip_ws(text, i)
    return i if i < len(text) and text[i] != "]" else None
