"""JSON and CSV formats for instances, measures, chains, trees and results."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .errors import DimensionError, InputError
from .line import LineDistribution
from .measures import CostSpace, FiniteDistribution, SignedMeasure, TransportPlan, DualPotential
from .transport import TransportSolution, duality_gap


def _read_json(src):
    if isinstance(src, dict):
        return src
    try:
        return json.loads(Path(src).read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{src}: invalid JSON ({exc})") from exc
    except OSError as exc:
        raise InputError(f"{src}: {exc.strerror}") from exc


def _field(d: dict, key: str, src):
    if key not in d:
        raise InputError(f"{src}: missing field {key!r}")
    return d[key]


def read_cost(d: dict, src="instance") -> CostSpace:
    cost = np.asarray(_field(d, "cost", src), dtype=float)
    if "n" in d and cost.shape != (d["n"], d["n"]):
        raise DimensionError(f"{src}: cost shape {cost.shape} does not match n={d['n']}")
    return CostSpace.metric(cost) if d.get("metric", False) else CostSpace(cost)


def load_instance(src):
    """Returns ``(cost, mu, nu)`` from ``{"n", "cost", "mu", "nu", "metric"}``."""
    d = _read_json(src)
    cost = read_cost(d, src)
    mu = FiniteDistribution(_field(d, "mu", src))
    nu = FiniteDistribution(_field(d, "nu", src))
    return cost, mu, nu


def instance_to_dict(cost: CostSpace, mu, nu) -> dict:
    return {
        "n": cost.size,
        "cost": cost.costs.tolist(),
        "mu": np.asarray(getattr(mu, "weights", mu)).tolist(),
        "nu": np.asarray(getattr(nu, "weights", nu)).tolist(),
        "metric": bool(cost.is_metric),
    }


def solution_to_dict(sol: TransportSolution) -> dict:
    return {
        "value": sol.value,
        "plan": sol.plan.entries.tolist(),
        "potential": sol.potential.values.tolist(),
        "gap": duality_gap(sol),
        "target_potential": np.asarray(sol.target_potential).tolist(),
    }


def solution_from_dict(d: dict, mu: FiniteDistribution, nu: FiniteDistribution) -> TransportSolution:
    potential = np.asarray(_field(d, "potential", "solution"), dtype=float)
    target = d.get("target_potential")
    target = -potential if target is None else np.asarray(target, dtype=float)
    return TransportSolution(
        plan=TransportPlan(_field(d, "plan", "solution"), mu, nu),
        value=float(_field(d, "value", "solution")),
        potential=DualPotential(potential),
        target_potential=target,
        iterations=0,
    )


def load_solution(src, mu, nu) -> TransportSolution:
    return solution_from_dict(_read_json(src), mu, nu)


def load_signed(src) -> SignedMeasure:
    return SignedMeasure(_field(_read_json(src), "weights", src))


def load_cost_matrix(src) -> np.ndarray:
    """Square matrix from JSON (``{"cost": ...}`` or a bare list) or headerless CSV."""
    path = Path(src)
    if path.suffix.lower() == ".csv":
        try:
            rows = [r for r in csv.reader(path.read_text().splitlines()) if r]
            return np.array([[float(x) for x in r] for r in rows])
        except (OSError, ValueError) as exc:
            raise InputError(f"{src}: {exc}") from exc
    d = _read_json(src)
    return np.asarray(_field(d, "cost", src) if isinstance(d, dict) else d, dtype=float)


def read_line_csv(src) -> LineDistribution:
    """``position,weight`` rows; a non-numeric first row is taken as a header."""
    try:
        text = Path(src).read_text()
    except OSError as exc:
        raise InputError(f"{src}: {exc.strerror}") from exc
    pos, wts = [], []
    for k, row in enumerate(csv.reader(text.splitlines())):
        if not row:
            continue
        try:
            x, w = float(row[0]), float(row[1])
        except (ValueError, IndexError):
            if k == 0:
                continue
            raise InputError(f"{src}: bad row {k + 1}: {row}")
        pos.append(x)
        wts.append(w)
    return LineDistribution.from_atoms(pos, wts)


def write_line_csv(dist: LineDistribution) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["position", "weight"])
    for x, p in zip(dist.positions, dist.weights.weights):
        w.writerow([repr(float(x)), repr(float(p))])
    return buf.getvalue()


def plan_csv(sol: TransportSolution) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["source", "target", "mass"])
    for i, j in np.argwhere(sol.plan.entries > 0):
        w.writerow([int(i), int(j), repr(float(sol.plan.entries[i, j]))])
    return buf.getvalue()


def load_chain(src):
    from .dbar import MarkovChain

    d = _read_json(src)
    P = np.asarray(_field(d, "transition", src), dtype=float)
    if "states" in d and P.shape != (d["states"], d["states"]):
        raise DimensionError(f"{src}: transition shape does not match states={d['states']}")
    return MarkovChain(P, d.get("stationary"))


def load_tree(src):
    from .tower import PartitionTree

    d = _read_json(src)
    masses = _field(d, "masses", src)
    if "leaves" in d and len(masses) != d["leaves"]:
        raise DimensionError(f"{src}: masses do not match leaves={d['leaves']}")
    return PartitionTree(masses, _field(d, "base_cost", src), tuple(_field(d, "levels", src)))


def tree_to_dict(tree) -> dict:
    return {
        "leaves": int(tree.masses.size),
        "masses": tree.masses.tolist(),
        "base_cost": tree.base_cost.tolist(),
        "levels": [lv.tolist() for lv in tree.levels],
    }


def series_csv(header: tuple[str, str], keys, values) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for k, v in zip(keys, values):
        w.writerow([k, repr(float(v))])
    return buf.getvalue()


def dumps(payload) -> str:
    return json.dumps(payload, sort_keys=True) + "\n"
