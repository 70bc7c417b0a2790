"""Run the certification suites for a configuration and serialize the report."""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import __version__
from .config import RunConfig
from .constructive import construct_E_generators, verify_identity
from .exceptions import PreconditionError
from .graph import (HoppingGraph, collective_reduction_check, is_connected, leaf_order,
                    spanning_tree)
from .hilbert import TruncatedSpace, enumerate_basis
from .lie import check_rank_condition
from .linalg import opnorm
from .operators import build
from .spectral import find_recurrence_time, relative_bound_check
from .symmetry import check_charge_type, check_commutes_with_N, check_complementarity

SCHEMA_VERSION = "1"

RECURRENCE_HAMILTONIANS = ("drift", "drift + sigma_z(1)", "drift + sigma_x(1)",
                           "drift + hop_sum", "drift + identity")


@dataclass
class SuiteResult:
    name: str
    status: str  # "pass", "fail" or "error"
    data: dict = field(default_factory=dict)
    message: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "pass"


@dataclass
class CertificationReport:
    config: dict
    suites: list[SuiteResult]
    timings: dict[str, float]

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.suites)

    @property
    def verdict(self) -> str:
        if self.passed:
            return f"consistent with strong operator controllability up to cutoff K={self.config['K']}"
        failed = [s.name for s in self.suites if not s.passed]
        return "failed: " + ", ".join(failed)

    def to_dict(self, with_timings: bool = True) -> dict[str, Any]:
        out = {
            "schema_version": SCHEMA_VERSION,
            "tool_version": __version__,
            "config": self.config,
            "suites": [{"name": s.name, "status": s.status, "message": s.message, "data": s.data}
                       for s in self.suites],
            "overall": {"passed": self.passed, "verdict": self.verdict},
        }
        if with_timings:
            out["timings"] = {k: round(v, 3) for k, v in self.timings.items()}
        return _jsonable(out)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        f = float(x)
        return f if math.isfinite(f) else str(f)
    return x


def _space(config: RunConfig) -> TruncatedSpace:
    return enumerate_basis(config.M, config.K, config.max_states)


def _suite_charge(config, space):
    rec = check_charge_type(space)
    data = {"eigenvalues": rec.eigenvalues, "multiplicities": rec.multiplicities,
            "bounds": rec.bounds, "block_dims": rec.block_dims,
            "integrality_residual": rec.integrality_residual}
    return rec.passed, data


def _build_sum(desc: str, config, space):
    total = None
    for part in desc.split("+"):
        op = build(part.strip(), config.params, space, edges=config.graph)
        total = op if total is None else total + op
    return total


def _suite_symmetry(config, space):
    tol = config.tol("symmetry")
    rows, ok = [], True
    for desc in config.generator_descriptors():
        op = _build_sum(desc, config, space)
        res = check_commutes_with_N(op)
        scale = max(1.0, opnorm(np.asarray(op.matrix)))
        good = op.commutes_with_N and res <= tol * scale
        ok &= good
        rows.append({"operator": op.name, "residual": res, "passed": good})
    breaking = check_commutes_with_N(build("sigma_x(1)", None, space)) if space.K >= 1 else 0.0
    return ok, {"generators": rows, "sigma_x(1)_residual": breaking,
                "check": "[A, N] for every symmetric generator"}


def _suite_rank(config, space):
    if config.K < 1:
        raise PreconditionError("rank suite needs K >= 1")
    if config.M > 1 and not is_connected(HoppingGraph(config.M, config.graph)):
        raise PreconditionError("rank suite needs a connected hopping graph")
    rep = check_rank_condition(space, config.generator_descriptors(), config.params,
                               tol=config.tol("rank"), edges=config.graph)
    blocks = [{"n": b.n, "d_n": b.d, "closure_dim": b.closure_dim,
               "traceless_dim": b.traceless_dim, "target": b.target,
               "contains_su": b.contains_su} for b in rep.blocks]
    return rep.passed, {"generators": rep.generators, "blocks": blocks}


def _identity_row(r):
    row = {"id": r.identity_id, "identity": r.description, "residual": r.residual,
           "relative_residual": r.relative_residual, "passed": r.passed}
    row.update(r.context)
    if r.scalar_factor is not None:
        row["scalar_factor"] = r.scalar_factor
    return row


def _suite_identities(config, space):
    tol = config.tol("identities")
    params = config.params
    results = []
    if config.M == 2:
        results += [verify_identity(i, space, params, tol=tol) for i in ("I1", "I2", "I3")]
        for n in range(1, config.K + 1):
            results += [verify_identity(i, space, params, n=n, tol=tol) for i in ("I4", "I5")]
    for e in config.graph:
        results.append(verify_identity("I6", space, params, edge=e, edges=config.graph, tol=tol))
    i7 = [verify_identity("I7", space, params, k=k, tol=tol) for k in range(1, config.M + 1)]
    results += i7
    scalars = [r.scalar_factor for r in i7]
    consistent = all(abs(c - scalars[0]) <= tol * abs(scalars[0]) for c in scalars)
    rows = [_identity_row(r) for r in results]

    constructions = []
    if config.M == 2:
        for n in range(2, config.K + 1):
            c = construct_E_generators(space, n)
            fail = c.failing_step
            constructions.append({
                "n": n, "passed": c.passed, "superdiagonal": len(c.superdiagonal()),
                "scalars": {f"E{s.target[0]},{s.target[1]}": s.scalar for s in c.superdiagonal()},
                "alphas": c.alphas,
                "max_off_target": max(s.off_target for s in c.steps),
                "failing_step": fail.label if fail else None,
            })
    ok = all(r.passed for r in results) and consistent and all(c["passed"] for c in constructions)
    return ok, {"identities": rows, "I7_scalar": scalars[0], "I7_consistent": consistent,
                "constructions": constructions}


def _suite_complementarity(config, space):
    rep = check_complementarity(space, "sigma_x(1)", tol=config.tol("complementarity"))

    def cond(c):
        return {"passed": c.passed, "residual": c.residual, "detail": c.detail}

    return rep.passed, {
        "candidate": rep.candidate, "split": rep.plus_minus_split,
        "condition_i": cond(rep.condition_i), "condition_ii": cond(rep.condition_ii),
        "condition_iii": cond(rep.condition_iii),
        "condition_iii_n_from_2": cond(rep.condition_iii_from_2),
        "condition_iv": cond(rep.condition_iv),
        "boundary_block_excluded": rep.boundary_block,
    }


def _suite_recurrence(config, space):
    eps = config.tol("recurrence")
    rows, ok = [], True
    for desc in RECURRENCE_HAMILTONIANS:
        if "hop_sum" in desc and not config.graph:
            continue
        op = _build_sum(desc, config, space)
        r = find_recurrence_time(op, config.t_minus, eps)
        ok &= r.found
        rows.append({"hamiltonian": desc, "found": r.found, "t_plus": r.t_plus_exact,
                     "achieved_error": r.achieved_error, "method": r.method,
                     "search_horizon": r.search_horizon,
                     "scope": "truncation only" if r.truncation_only else "exact on blocks"})
    return ok, {"t_minus": config.t_minus, "epsilon": eps, "hamiltonians": rows}


def _suite_relative_bound(config, space):
    if config.K < 1:
        raise PreconditionError("relative bound needs K >= 1")
    rb = relative_bound_check(space, config.params)
    rb = type(rb)(rb.M, rb.K, rb.sigma_max, rb.bound, config.tol("relative_bound"))
    return rb.passed, {"sigma_max": rb.sigma_max, "bound": rb.bound, "margin": rb.margin}


def _suite_graph(config, space):
    g = HoppingGraph(config.M, config.graph)
    if not is_connected(g):
        raise PreconditionError("hopping graph is not connected")
    tree = spanning_tree(g)
    order = leaf_order(tree)
    if config.M > 1:
        results = collective_reduction_check(space, g, tol=config.tol("graph_reduction"))
    else:
        results = []
    rows = [_identity_row(r) for r in results]
    return all(r.passed for r in results), {
        "spanning_tree": tree.sorted_edges(),
        "leaf_order": [[s.leaf, s.attached_to] for s in order.steps],
        "relabel": {str(k): v for k, v in sorted(order.relabel.items())},
        "edges": rows,
    }


SUITE_RUNNERS: dict[str, Callable] = {
    "charge": _suite_charge,
    "symmetry": _suite_symmetry,
    "rank": _suite_rank,
    "identities": _suite_identities,
    "complementarity": _suite_complementarity,
    "recurrence": _suite_recurrence,
    "relative_bound": _suite_relative_bound,
    "graph_reduction": _suite_graph,
}


def run(config: RunConfig) -> CertificationReport:
    """Run the selected suites in canonical order.

    A precondition violation marks that suite as ``error`` and the run goes
    on. Resource-guard errors from building the space propagate.
    """
    timings = {}
    t0 = time.perf_counter()
    space = _space(config)
    timings["basis"] = time.perf_counter() - t0
    suites = []
    for name in config.ordered_suites():
        t0 = time.perf_counter()
        try:
            passed, data = SUITE_RUNNERS[name](config, space)
            suites.append(SuiteResult(name, "pass" if passed else "fail", data))
        except PreconditionError as exc:
            suites.append(SuiteResult(name, "error", {}, f"precondition: {exc}"))
        timings[name] = time.perf_counter() - t0
    return CertificationReport(config.to_dict(), suites, timings)


def render_json(report: CertificationReport) -> str:
    return json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n"


def _fmt(x) -> str:
    return f"{x:.3g}" if isinstance(x, float) else str(x)


def render_text(report: CertificationReport) -> str:
    cfg = report.config
    lines = [f"jchcontrol {__version__}  M={cfg['M']} K={cfg['K']} graph={cfg['graph']}"]
    for s in report.suites:
        lines.append(f"[{s.status.upper()}] {s.name}" + (f": {s.message}" if s.message else ""))
        d = s.data
        if s.name == "charge" and d:
            lines.append(f"  multiplicities {d['multiplicities']} (bounds {d['bounds']})")
        elif s.name == "symmetry" and d:
            for row in d["generators"]:
                lines.append(f"  [{row['operator']}, N] = {_fmt(row['residual'])}")
        elif s.name == "rank" and d:
            for b in d["blocks"]:
                lines.append(f"  n={b['n']} d_n={b['d_n']} closure_dim={b['closure_dim']} "
                             f"traceless={b['traceless_dim']} target={b['target']} "
                             f"{'ok' if b['contains_su'] else 'MISSING'}")
        elif s.name == "identities" and d:
            for row in d["identities"]:
                where = "".join(f" {k}={row[k]}" for k in ("n", "edge", "k") if k in row)
                lines.append(f"  {row['id']}{where}: rel residual {_fmt(row['relative_residual'])}"
                             + (f", scalar {_fmt(row['scalar_factor'])}" if "scalar_factor" in row else ""))
            for c in d["constructions"]:
                lines.append(f"  construction n={c['n']}: {c['superdiagonal']} superdiagonal generators, "
                             f"max off-target {_fmt(c['max_off_target'])}")
        elif s.name == "complementarity" and d:
            for key in ("condition_i", "condition_ii", "condition_iii", "condition_iv"):
                c = d[key]
                lines.append(f"  {key}: {'ok' if c['passed'] else 'FAIL'} "
                             f"residual {_fmt(c['residual'])} ({c['detail']})")
        elif s.name == "recurrence" and d:
            for row in d["hamiltonians"]:
                lines.append(f"  {row['hamiltonian']}: t+ = {row['t_plus']} "
                             f"error {_fmt(row['achieved_error'])} ({row['method']}, {row['scope']})")
        elif s.name == "relative_bound" and d:
            lines.append(f"  sigma_max {d['sigma_max']:.12g} <= bound {d['bound']:.12g}")
        elif s.name == "graph_reduction" and d:
            lines.append(f"  spanning tree {d['spanning_tree']}, leaf order {d['leaf_order']}")
            for row in d["edges"]:
                lines.append(f"  edge {row['edge']}: rel residual {_fmt(row['relative_residual'])}")
    lines.append(f"overall: {'PASS' if report.passed else 'FAIL'} ({report.verdict})")
    return "\n".join(lines) + "\n"


def emit_report(report: CertificationReport, fmt: str = "text", path: str | Path | None = None) -> str:
    """Render the report; write it to ``path`` when given and return the text."""
    if fmt not in ("text", "json"):
        raise ValueError(f"unknown format {fmt!r}")
    text = render_json(report) if fmt == "json" else render_text(report)
    if path is not None:
        Path(path).write_text(text)
    return text
