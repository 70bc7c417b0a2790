"""Run configuration: a JSON file describing the model and the suites to run.

Example::

    {
      "M": 2, "K": 3,
      "graph": [[1, 2]],
      "params": {"omega_P": [1, 1], "omega_A": [1, 1], "omega_I": [1, 1], "omega_H": 1},
      "suites": ["charge", "rank"],
      "tolerances": {"rank": 1e-9}
    }

``omega_H`` is either one number for every edge or a list aligned with
``graph``. Frequencies have no defaults.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

from .hilbert import DEFAULT_MAX_STATES
from .operators import ModelParams, parse_descriptor

SUITES = ("charge", "symmetry", "rank", "identities", "complementarity",
          "recurrence", "relative_bound", "graph_reduction")

DEFAULT_TOLERANCES = {
    "charge": 1e-12,
    "symmetry": 1e-12,
    "rank": 1e-9,
    "identities": 1e-12,
    "complementarity": 1e-12,
    "recurrence": 1e-2,
    "relative_bound": 1e-12,
    "graph_reduction": 1e-12,
}

DEFAULT_GENERATORS = ("drift", "sigma_z(*)", "hop_sum", "identity")

_KNOWN_KEYS = {"M", "K", "graph", "params", "suites", "tolerances", "output_path",
               "generators", "t_minus", "max_states"}


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


@dataclass(frozen=True)
class RunConfig:
    M: int
    K: int
    graph: tuple[tuple[int, int], ...]
    params: ModelParams
    suites: tuple[str, ...] = SUITES
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    output_path: str | None = None
    generators: tuple[str, ...] = DEFAULT_GENERATORS
    t_minus: float = -1.0
    max_states: int = DEFAULT_MAX_STATES

    def tol(self, suite: str) -> float:
        return float(self.tolerances.get(suite, DEFAULT_TOLERANCES[suite]))

    def generator_descriptors(self) -> list[str]:
        """Generators with ``name(*)`` expanded over all cavities."""
        out = []
        for g in self.generators:
            if g.endswith("(*)"):
                out += [f"{g[:-3]}({i})" for i in range(1, self.M + 1)]
            else:
                out.append(g)
        return out

    def ordered_suites(self) -> list[str]:
        return [s for s in SUITES if s in self.suites]

    def with_overrides(self, suites=None, tolerances=None, output_path=None) -> "RunConfig":
        tols = dict(self.tolerances)
        tols.update(tolerances or {})
        for name in tolerances or {}:
            if name not in SUITES:
                raise ConfigError(f"--tol: unknown suite {name!r}")
        new_suites = self.suites
        if suites:
            bad = [s for s in suites if s not in SUITES]
            if bad:
                raise ConfigError(f"--suite: unknown suite(s) {bad}; known: {', '.join(SUITES)}")
            new_suites = tuple(dict.fromkeys(suites))
        return replace(self, suites=new_suites, tolerances=tols,
                       output_path=output_path if output_path is not None else self.output_path)

    def to_dict(self) -> dict[str, Any]:
        return {
            "M": self.M,
            "K": self.K,
            "graph": [list(e) for e in self.graph],
            "params": {
                "omega_P": list(self.params.omega_P),
                "omega_A": list(self.params.omega_A),
                "omega_I": list(self.params.omega_I),
                "omega_H": [self.params.omega_H[e] for e in self.graph],
            },
            "suites": list(self.ordered_suites()),
            "tolerances": {k: self.tol(k) for k in sorted(self.tolerances)},
            "generators": list(self.generators),
            "t_minus": self.t_minus,
            "max_states": self.max_states,
        }


def _int(data, key, minimum):
    if key not in data:
        raise ConfigError(f"missing required field {key!r}")
    v = data[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"field {key!r} must be an integer, got {v!r}")
    if v < minimum:
        raise ConfigError(f"field {key!r} must be >= {minimum}, got {v}")
    return v


def _positive_list(params, key, M):
    if key not in params:
        raise ConfigError(f"missing required field 'params.{key}'")
    vals = params[key]
    if not isinstance(vals, list) or len(vals) != M:
        raise ConfigError(f"field 'params.{key}' must be a list of {M} numbers")
    for k, v in enumerate(vals):
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not v > 0:
            raise ConfigError(f"field 'params.{key}[{k}]' must be a positive number, got {v!r}")
    return tuple(float(v) for v in vals)


def config_from_dict(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("top level must be an object")
    unknown = sorted(set(data) - _KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"unknown field(s) {unknown}")
    M = _int(data, "M", 1)
    K = _int(data, "K", 0)

    raw_graph = data.get("graph", [])
    if not isinstance(raw_graph, list):
        raise ConfigError("field 'graph' must be a list of [i, j] pairs")
    graph = []
    for k, e in enumerate(raw_graph):
        if (not isinstance(e, list) or len(e) != 2
                or not all(isinstance(x, int) and not isinstance(x, bool) for x in e)):
            raise ConfigError(f"field 'graph[{k}]' must be a pair of integers, got {e!r}")
        i, j = e
        if i == j or not (1 <= i <= M and 1 <= j <= M):
            raise ConfigError(f"field 'graph[{k}]' = {e} is not an edge between distinct vertices 1..{M}")
        edge = (min(i, j), max(i, j))
        if edge in graph:
            raise ConfigError(f"field 'graph[{k}]' duplicates edge {edge}")
        graph.append(edge)

    params = data.get("params")
    if not isinstance(params, dict):
        raise ConfigError("missing required object 'params'")
    omega = {key: _positive_list(params, key, M) for key in ("omega_P", "omega_A", "omega_I")}
    raw_h = params.get("omega_H")
    if graph and raw_h is None:
        raise ConfigError("missing required field 'params.omega_H' (graph has edges)")
    if isinstance(raw_h, (int, float)) and not isinstance(raw_h, bool):
        hop = {e: float(raw_h) for e in graph}
    elif isinstance(raw_h, list) and len(raw_h) == len(graph):
        hop = {e: float(w) for e, w in zip(graph, raw_h)}
    elif raw_h is None:
        hop = {}
    else:
        raise ConfigError("field 'params.omega_H' must be a number or a list aligned with 'graph'")
    if any(not w > 0 for w in hop.values()):
        raise ConfigError("field 'params.omega_H' must be positive")
    model = ModelParams(omega["omega_P"], omega["omega_A"], omega["omega_I"], hop)

    suites = data.get("suites", list(SUITES))
    if not isinstance(suites, list) or not suites:
        raise ConfigError("field 'suites' must be a non-empty list")
    bad = [s for s in suites if s not in SUITES]
    if bad:
        raise ConfigError(f"field 'suites' has unknown entries {bad}; known: {', '.join(SUITES)}")

    tols = dict(DEFAULT_TOLERANCES)
    raw_tols = data.get("tolerances", {})
    if not isinstance(raw_tols, dict):
        raise ConfigError("field 'tolerances' must be an object")
    for name, v in raw_tols.items():
        if name not in SUITES:
            raise ConfigError(f"field 'tolerances.{name}' names an unknown suite")
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not v > 0:
            raise ConfigError(f"field 'tolerances.{name}' must be a positive number")
        tols[name] = float(v)

    gens = data.get("generators", list(DEFAULT_GENERATORS))
    if not isinstance(gens, list) or not gens:
        raise ConfigError("field 'generators' must be a non-empty list of descriptors")
    for k, gdesc in enumerate(gens):
        try:
            parse_descriptor(gdesc[:-3] + "(1)" if gdesc.endswith("(*)") else gdesc)
        except (ValueError, AttributeError) as exc:
            raise ConfigError(f"field 'generators[{k}]': {exc}") from None

    t_minus = data.get("t_minus", -1.0)
    if isinstance(t_minus, bool) or not isinstance(t_minus, (int, float)) or t_minus > 0:
        raise ConfigError("field 't_minus' must be a number <= 0")
    max_states = data.get("max_states", DEFAULT_MAX_STATES)
    if isinstance(max_states, bool) or not isinstance(max_states, int) or max_states < 1:
        raise ConfigError("field 'max_states' must be a positive integer")
    out = data.get("output_path")
    if out is not None and not isinstance(out, str):
        raise ConfigError("field 'output_path' must be a string")

    return RunConfig(M, K, tuple(graph), model, tuple(dict.fromkeys(suites)), tols, out,
                     tuple(gens), float(t_minus), max_states)


def load_config(path: str | Path) -> RunConfig:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    try:
        return config_from_dict(data)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None
