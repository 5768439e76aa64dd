"""
JSON scenario files.

Schema::

    {
      "description": "...",                       # optional
      "curve":  {"type": "circle", "r": 1.0, "perimeter_mode": "exact"}
             or {"type": "ellipse", "a": 2.0, "b": 1.0, ...},
      "gains":  {"kc": 1.0, "k": 2.0, "delta": 1.0},
      "agents": [{"x": 1.5, "y": 0.0, "theta": {"pi": [1, 2]}}, ...],
      "sim":    {"dt": 0.001, "t_final": 100.0,
                 "sigma_mode": "direct", "log_decimation": 10, "grid_size": 1024}
    }

Angles are radians; ``{"pi": [p, q]}`` stands for p*pi/q. Unknown keys are
rejected. Structural problems raise :class:`ConfigError` carrying the line of
the offending value; range checks (positive gains, feasibility) belong to
:func:`phasebalance.sim.validate`.
"""

import json
import math
from importlib import resources
from pathlib import Path

from .control import ControlGains
from .curve import PERIMETER_MODES, CurveSpec
from .sim import AgentState, Scenario

__all__ = ["ConfigError", "parse_scenario", "load_scenario", "scenario_to_dict", "dump_scenario",
           "bundled_scenarios", "bundled_path"]

_TOP = {"description", "curve", "gains", "agents", "sim"}
_CURVE = {"circle": ({"type", "r"}, {"perimeter_mode"}), "ellipse": ({"type", "a", "b"}, {"perimeter_mode"})}
_GAINS = {"kc", "k", "delta"}
_AGENT = {"x", "y", "theta"}
_SIM_REQUIRED = {"dt", "t_final"}
_SIM_OPTIONAL = {"sigma_mode", "log_decimation", "grid_size"}


class ConfigError(ValueError):
    def __init__(self, message, path=(), line=None, source=None):
        self.path = tuple(path)
        self.line = line
        self.source = source
        self.message = message
        super().__init__(str(self))

    def __str__(self):
        where = self.source or "<scenario>"
        if self.line is not None:
            where += f":{self.line}"
        dotted = _dotted(self.path)
        return f"{where}: {dotted + ': ' if dotted else ''}{self.message}"


def _dotted(path):
    out = ""
    for p in path:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else p)
    return out


# ---------------------------------------------------------------------------
# Locating a value's line in the source text
# ---------------------------------------------------------------------------

_decoder = json.JSONDecoder()
_WS = " \t\r\n"


def _skip(text, pos):
    while pos < len(text) and text[pos] in _WS:
        pos += 1
    return pos


def _child_start(text, pos, key):
    """Start offset of ``key`` (str or int) inside the container at ``pos``."""
    pos = _skip(text, pos)
    opener = text[pos]
    pos += 1
    index = 0
    while True:
        pos = _skip(text, pos)
        if text[pos] in "]}":
            return None
        if opener == "{":
            name, pos = _decoder.raw_decode(text, pos)
            pos = _skip(text, pos) + 1  # ':'
            pos = _skip(text, pos)
            if name == key:
                return pos
        elif index == key:
            return pos
        _, pos = _decoder.raw_decode(text, pos)
        pos = _skip(text, pos)
        if text[pos] == ",":
            pos += 1
        index += 1


def _line_of(text, path):
    if text is None:
        return None
    pos = 0
    try:
        for key in path:
            nxt = _child_start(text, pos, key)
            if nxt is None:
                break
            pos = nxt
    except (ValueError, IndexError):
        return None
    return text.count("\n", 0, _skip(text, pos)) + 1


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

class _Reader:
    def __init__(self, text, source):
        self.text = text
        self.source = source

    def fail(self, message, path):
        raise ConfigError(message, path, _line_of(self.text, path), self.source)

    def obj(self, value, path, required, optional=frozenset()):
        if not isinstance(value, dict):
            self.fail("expected an object", path)
        unknown = sorted(set(value) - set(required) - set(optional))
        if unknown:
            self.fail(f"unknown key(s) {unknown}", path + (unknown[0],))
        missing = sorted(set(required) - set(value))
        if missing:
            self.fail(f"missing required key(s) {missing}", path)
        return value

    def number(self, value, path):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.fail(f"expected a number, got {json.dumps(value)}", path)
        if not math.isfinite(value):
            self.fail("expected a finite number", path)
        return float(value)

    def integer(self, value, path):
        if isinstance(value, bool) or not isinstance(value, int):
            self.fail(f"expected an integer, got {json.dumps(value)}", path)
        return value

    def angle(self, value, path):
        if isinstance(value, dict):
            self.obj(value, path, {"pi"})
            frac = value["pi"]
            if (not isinstance(frac, list) or len(frac) != 2
                    or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in frac)):
                self.fail('pi fraction must look like {"pi": [p, q]}', path + ("pi",))
            if frac[1] == 0:
                self.fail("pi fraction has zero denominator", path + ("pi",))
            return frac[0] * math.pi / frac[1]
        return self.number(value, path)

    def choice(self, value, path, options):
        if value not in options:
            self.fail(f"must be one of {list(options)}, got {json.dumps(value)}", path)
        return value


def parse_scenario(text, source=None):
    """Build a :class:`Scenario` from JSON text.

    Raises
    ------
    ConfigError
        On malformed JSON or a schema violation, with the source line.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg} (column {exc.colno})", (), exc.lineno, source) from None
    rd = _Reader(text, source)
    rd.obj(doc, (), _TOP - {"description"}, {"description"})

    c = doc["curve"]
    if not isinstance(c, dict):
        rd.fail("expected an object", ("curve",))
    kind = rd.choice(c.get("type"), ("curve", "type"), tuple(_CURVE))
    req, opt = _CURVE[kind]
    rd.obj(c, ("curve",), req, opt)
    mode = rd.choice(c.get("perimeter_mode", "exact"), ("curve", "perimeter_mode"), PERIMETER_MODES)
    try:
        if kind == "circle":
            curve = CurveSpec.circle(rd.number(c["r"], ("curve", "r")), mode)
        else:
            curve = CurveSpec.ellipse(rd.number(c["a"], ("curve", "a")), rd.number(c["b"], ("curve", "b")), mode)
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        rd.fail(str(exc), ("curve",))

    g = rd.obj(doc["gains"], ("gains",), _GAINS)
    gains = ControlGains(
        kc=rd.number(g["kc"], ("gains", "kc")),
        k_coupling=rd.number(g["k"], ("gains", "k")),
        delta=rd.number(g["delta"], ("gains", "delta")),
    )

    if not isinstance(doc["agents"], list):
        rd.fail("expected a list of agents", ("agents",))
    agents = []
    for i, a in enumerate(doc["agents"]):
        p = ("agents", i)
        rd.obj(a, p, _AGENT)
        agents.append(AgentState(rd.number(a["x"], p + ("x",)), rd.number(a["y"], p + ("y",)),
                                 rd.angle(a["theta"], p + ("theta",))))

    s = rd.obj(doc["sim"], ("sim",), _SIM_REQUIRED, _SIM_OPTIONAL)
    kwargs = dict(dt=rd.number(s["dt"], ("sim", "dt")), t_final=rd.number(s["t_final"], ("sim", "t_final")))
    if "sigma_mode" in s:
        kwargs["sigma_mode"] = rd.choice(s["sigma_mode"], ("sim", "sigma_mode"), ("direct", "interpolated"))
    if "log_decimation" in s:
        kwargs["log_decimation"] = rd.integer(s["log_decimation"], ("sim", "log_decimation"))
    if "grid_size" in s:
        kwargs["grid_size"] = rd.integer(s["grid_size"], ("sim", "grid_size"))
    return Scenario(curve, gains, tuple(agents), **kwargs)


def load_scenario(path):
    """Read and parse a scenario file. ``OSError`` propagates."""
    path = Path(path)
    return parse_scenario(path.read_text(), str(path))


def scenario_to_dict(scenario):
    c = scenario.curve
    curve = {"type": c.kind, "perimeter_mode": c.perimeter_mode}
    curve.update({"r": c.a} if c.is_circle else {"a": c.a, "b": c.b})
    g = scenario.gains
    return {
        "curve": curve,
        "gains": {"kc": g.kc, "k": g.k_coupling, "delta": g.delta},
        "agents": [{"x": a.x, "y": a.y, "theta": a.theta} for a in scenario.agents],
        "sim": {
            "dt": scenario.dt,
            "t_final": scenario.t_final,
            "sigma_mode": scenario.sigma_mode,
            "log_decimation": scenario.log_decimation,
            "grid_size": scenario.grid_size,
        },
    }


def dump_scenario(scenario, indent=2):
    return json.dumps(scenario_to_dict(scenario), indent=indent)


def bundled_scenarios():
    """Names of the scenario files shipped with the package."""
    root = resources.files(__package__) / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def bundled_path(name):
    """Filesystem path of a shipped scenario, e.g. ``bundled_path("exp-circle")``."""
    p = resources.files(__package__) / "scenarios" / f"{name}.json"
    if not p.is_file():
        raise FileNotFoundError(f"no bundled scenario {name!r}; have {bundled_scenarios()}")
    return Path(str(p))
