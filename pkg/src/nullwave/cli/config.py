"""Loading and validation of JSON experiment configurations.

A config is a single JSON object::

    {
      "experiment": "picard",
      "system": {"p": 2, "speeds": [1, -1], "coupling": [[1, 1, 2, -0.5], ...]},
      "data": [[[0, 0], [0.5, 0.25], [1, 0]], ...],
      "grid": {"dx": 1e-3, "dt": 1e-3, "horizon": null, "padding": 0},
      "tolerances": {...},
      "seed": 0
    }

plus optional per-experiment sections (``oracle``, ``expect``,
``estimates``, ``stability``, ``glue``, ``wave``, ``blowup``, ``output``).
Coupling indices are 1-based.  Every error is a ``ConfigError`` whose
message names the offending field, or the line and column for JSON syntax
errors.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ..exceptions import ConfigError, NullwaveError
from ..fields import InitialDatum
from ..system import SystemSpec

EXPERIMENTS = ("validate", "picard", "estimates", "stability", "glue", "wave-bridge", "blowup")

DEFAULT_TOLERANCES = {
    "tol": 1e-10,
    "max_iter": 60,
    "budget_slack": 1e-3,
    "ratio_slack": 0.05,
    "k1_slack": 1e-3,
    "quad_rel": 1e-3,
    "identity": 1e-12,
    "stability_slack": 0.1,
    "mismatch": 1e-6,
}

DEFAULT_SECTIONS = {
    "estimates": {"n_bilinear": 100, "n_lemma": 50, "indicator_tol": 0.01},
    "stability": {"component": 1, "l1": 1e-3, "horizon": None},
    "glue": {"partition": None, "horizon": None},
    "wave": {"control_beta": 2.0, "ratio_range": [0.4, 0.7], "control_floor": 0.5},
    "blowup": {"threshold": 1e6, "horizon_factor": 10.0, "record_every": 1},
    "output": {"field_stride": None},
}

_TOP_LEVEL = {"experiment", "system", "data", "grid", "tolerances", "seed", "oracle", "expect",
              "description"} | set(DEFAULT_SECTIONS)
_NEEDS_SYSTEM = set(EXPERIMENTS) - {"estimates"}


@dataclass
class ExperimentConfig:
    """A resolved configuration: the plain JSON dict plus parsed objects."""

    raw: dict
    spec: SystemSpec | None
    data: list

    @property
    def experiment(self):
        return self.raw["experiment"]

    def section(self, name):
        return self.raw[name]


def config_dir():
    return resources.files("nullwave") / "configs"


def shipped_configs():
    return sorted(p.name[:-5] for p in config_dir().iterdir() if p.name.endswith(".json"))


def _read(source):
    path = Path(source)
    if path.is_file():
        return path.read_text(), str(path)
    shipped = config_dir() / f"{source}.json"
    if shipped.is_file():
        return shipped.read_text(), f"<shipped:{source}>"
    raise ConfigError(f"config {source!r} is neither a file nor a shipped config "
                      f"({', '.join(shipped_configs())})")


def _number(value, where, positive=False, allow_none=False, integer=False):
    if value is None and allow_none:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    if integer and int(value) != value:
        raise ConfigError(f"{where}: expected an integer, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{where}: must be finite")
    if positive and not value > 0:
        raise ConfigError(f"{where}: must be > 0, got {value!r}")
    return int(value) if integer else float(value)


def _merge(defaults, given, where):
    if given is None:
        return copy.deepcopy(defaults)
    if not isinstance(given, dict):
        raise ConfigError(f"{where}: expected an object")
    unknown = set(given) - set(defaults)
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    out = copy.deepcopy(defaults)
    out.update(given)
    return out


def _parse_system(sys_cfg):
    if not isinstance(sys_cfg, dict):
        raise ConfigError("system: expected an object with p, speeds, coupling")
    unknown = set(sys_cfg) - {"p", "speeds", "coupling"}
    if unknown:
        raise ConfigError(f"system: unknown keys {sorted(unknown)}")
    p = _number(sys_cfg.get("p"), "system.p", positive=True, integer=True)
    speeds = sys_cfg.get("speeds")
    if not isinstance(speeds, list) or len(speeds) != p:
        raise ConfigError(f"system.speeds: expected a list of {p} numbers")
    speeds = [_number(c, f"system.speeds[{n}]") for n, c in enumerate(speeds)]
    coupling = sys_cfg.get("coupling", [])
    if not isinstance(coupling, list):
        raise ConfigError("system.coupling: expected a list of [i, j, k, value]")
    triplets = []
    for n, entry in enumerate(coupling):
        where = f"system.coupling[{n}]"
        if not isinstance(entry, list) or len(entry) != 4:
            raise ConfigError(f"{where}: expected [i, j, k, value], got {entry!r}")
        idx = [_number(v, f"{where}[{m}]", integer=True) for m, v in enumerate(entry[:3])]
        for name, v in zip("ijk", idx):
            if not 1 <= v <= p:
                raise ConfigError(f"{where}: index {name}={v} outside [1, {p}]")
        triplets.append((*idx, _number(entry[3], f"{where}[3]")))
    try:
        spec = SystemSpec.from_triplets(p, speeds, triplets)
    except NullwaveError as exc:
        raise ConfigError(f"system.coupling: {exc}") from exc
    return {"p": p, "speeds": speeds, "coupling": [list(t) for t in triplets]}, spec


def _parse_data(data_cfg, p):
    if not isinstance(data_cfg, list) or len(data_cfg) != p:
        raise ConfigError(f"data: expected a list of {p} breakpoint lists")
    data, raw = [], []
    for n, bps in enumerate(data_cfg):
        where = f"data[{n}]"
        if not isinstance(bps, list) or len(bps) < 2:
            raise ConfigError(f"{where}: expected at least two [x, value] breakpoints")
        pts = []
        for m, bp in enumerate(bps):
            if not isinstance(bp, list) or len(bp) != 2:
                raise ConfigError(f"{where}[{m}]: expected [x, value], got {bp!r}")
            pts.append([_number(bp[0], f"{where}[{m}][0]"), _number(bp[1], f"{where}[{m}][1]")])
        try:
            data.append(InitialDatum(pts))
        except NullwaveError as exc:
            raise ConfigError(f"{where}: {exc}") from exc
        raw.append(pts)
    return raw, data


def parse_config(obj, experiment=None):
    """Validate a decoded JSON object and fill in defaults.

    Parameters
    ----------
    obj : dict
    experiment : str, optional
        Overrides the ``experiment`` field (the CLI positional argument).
    """
    if not isinstance(obj, dict):
        raise ConfigError("top level: expected a JSON object")
    unknown = set(obj) - _TOP_LEVEL
    if unknown:
        raise ConfigError(f"top level: unknown keys {sorted(unknown)}")
    exp = experiment or obj.get("experiment")
    if exp not in EXPERIMENTS:
        raise ConfigError(f"experiment: expected one of {list(EXPERIMENTS)}, got {exp!r}")
    raw = {"experiment": exp}
    if "description" in obj:
        raw["description"] = str(obj["description"])

    spec, data = None, []
    if "system" in obj:
        raw["system"], spec = _parse_system(obj["system"])
        if "data" in obj:
            raw["data"], data = _parse_data(obj["data"], spec.p)
    elif "data" in obj:
        raise ConfigError("data: given without a system")
    if exp in _NEEDS_SYSTEM:
        if spec is None:
            raise ConfigError(f"system: required for experiment {exp!r}")
        if not data and exp != "validate":
            raise ConfigError(f"data: required for experiment {exp!r}")

    grid = _merge({"dx": 1e-3, "dt": 1e-3, "horizon": None, "padding": 0.0},
                  obj.get("grid"), "grid")
    grid["dx"] = _number(grid["dx"], "grid.dx", positive=True)
    grid["dt"] = _number(grid["dt"], "grid.dt", positive=True)
    grid["horizon"] = _number(grid["horizon"], "grid.horizon", positive=True, allow_none=True)
    grid["padding"] = _number(grid["padding"], "grid.padding")
    if grid["padding"] < 0:
        raise ConfigError("grid.padding: must be >= 0")
    raw["grid"] = grid

    tol = _merge(DEFAULT_TOLERANCES, obj.get("tolerances"), "tolerances")
    for key, value in tol.items():
        tol[key] = _number(value, f"tolerances.{key}", positive=key != "identity",
                           integer=key == "max_iter")
    raw["tolerances"] = tol
    raw["seed"] = _number(obj.get("seed", 0), "seed", integer=True)

    for name, defaults in DEFAULT_SECTIONS.items():
        raw[name] = _merge(defaults, obj.get(name), name)
    _check_sections(raw, spec)
    for name in ("oracle", "expect"):
        if name in obj:
            if not isinstance(obj[name], dict):
                raise ConfigError(f"{name}: expected an object")
            raw[name] = copy.deepcopy(obj[name])
    _check_oracle(raw.get("oracle"), spec)
    _check_expect(raw.get("expect"))
    return ExperimentConfig(raw, spec, data)


def _check_sections(raw, spec):
    est = raw["estimates"]
    est["n_bilinear"] = _number(est["n_bilinear"], "estimates.n_bilinear", integer=True)
    est["n_lemma"] = _number(est["n_lemma"], "estimates.n_lemma", integer=True)
    if est["n_bilinear"] < 0 or est["n_lemma"] < 0:
        raise ConfigError("estimates: sample counts must be >= 0")
    est["indicator_tol"] = _number(est["indicator_tol"], "estimates.indicator_tol", positive=True)

    st = raw["stability"]
    st["component"] = _number(st["component"], "stability.component", integer=True)
    if spec is not None and not 1 <= st["component"] <= spec.p:
        raise ConfigError(f"stability.component: outside [1, {spec.p}]")
    st["l1"] = _number(st["l1"], "stability.l1", positive=True)
    st["horizon"] = _number(st["horizon"], "stability.horizon", positive=True, allow_none=True)

    gl = raw["glue"]
    if gl["partition"] is not None:
        part = gl["partition"]
        if not isinstance(part, list) or not part:
            raise ConfigError("glue.partition: expected a non-empty list of [lo, hi]")
        for n, iv in enumerate(part):
            if not isinstance(iv, list) or len(iv) != 2:
                raise ConfigError(f"glue.partition[{n}]: expected [lo, hi]")
            lo = _number(iv[0], f"glue.partition[{n}][0]")
            hi = _number(iv[1], f"glue.partition[{n}][1]")
            if not hi > lo:
                raise ConfigError(f"glue.partition[{n}]: need lo < hi")
            part[n] = [lo, hi]
    gl["horizon"] = _number(gl["horizon"], "glue.horizon", positive=True, allow_none=True)

    wv = raw["wave"]
    wv["control_beta"] = _number(wv["control_beta"], "wave.control_beta")
    rr = wv["ratio_range"]
    if not isinstance(rr, list) or len(rr) != 2:
        raise ConfigError("wave.ratio_range: expected [lo, hi]")
    wv["ratio_range"] = [_number(v, f"wave.ratio_range[{n}]", positive=True)
                         for n, v in enumerate(rr)]
    wv["control_floor"] = _number(wv["control_floor"], "wave.control_floor", positive=True)

    bl = raw["blowup"]
    bl["threshold"] = _number(bl["threshold"], "blowup.threshold", positive=True)
    bl["horizon_factor"] = _number(bl["horizon_factor"], "blowup.horizon_factor", positive=True)
    bl["record_every"] = _number(bl["record_every"], "blowup.record_every", positive=True,
                                 integer=True)

    out = raw["output"]
    out["field_stride"] = _number(out["field_stride"], "output.field_stride", positive=True,
                                  allow_none=True, integer=True)


def _check_oracle(oracle, spec):
    if oracle is None:
        return
    if oracle.get("type") != "riccati":
        raise ConfigError("oracle.type: only 'riccati' is supported")
    unknown = set(oracle) - {"type", "lambda", "t", "max_error"}
    if unknown:
        raise ConfigError(f"oracle: unknown keys {sorted(unknown)}")
    if spec is not None and spec.p != 1:
        raise ConfigError("oracle: the Riccati oracle needs a scalar system (p = 1)")
    oracle["lambda"] = _number(oracle.get("lambda"), "oracle.lambda")
    oracle["t"] = _number(oracle.get("t"), "oracle.t", positive=True)
    oracle["max_error"] = _number(oracle.get("max_error", 1e-2), "oracle.max_error", positive=True)


def _check_expect(expect):
    if expect is None:
        return
    unknown = set(expect) - {"verdict", "admissible", "blew_up", "t_detect"}
    if unknown:
        raise ConfigError(f"expect: unknown keys {sorted(unknown)}")
    if "verdict" in expect and expect["verdict"] not in ("converged", "max_iter", "diverged"):
        raise ConfigError(f"expect.verdict: unknown verdict {expect['verdict']!r}")
    for key in ("admissible", "blew_up"):
        if key in expect and not isinstance(expect[key], bool):
            raise ConfigError(f"expect.{key}: expected true or false")
    if "t_detect" in expect:
        rng = expect["t_detect"]
        if not isinstance(rng, list) or len(rng) != 2:
            raise ConfigError("expect.t_detect: expected [lo, hi]")
        expect["t_detect"] = [_number(v, f"expect.t_detect[{n}]") for n, v in enumerate(rng)]


def load_config(source, experiment=None, overrides=None):
    """Read a config from a path or shipped name, apply CLI overrides, validate.

    ``overrides`` may hold ``dx``, ``dt`` and ``seed``; ``None`` values are
    ignored.
    """
    text, origin = _read(source)
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{origin}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if isinstance(obj, dict):
        for key, value in (overrides or {}).items():
            if value is None:
                continue
            if key == "seed":
                obj["seed"] = value
            else:
                obj.setdefault("grid", {})
                if not isinstance(obj["grid"], dict):
                    raise ConfigError(f"{origin}: grid: expected an object")
                obj["grid"][key] = value
    try:
        return parse_config(obj, experiment)
    except ConfigError as exc:
        raise ConfigError(f"{origin}: {exc}") from exc
