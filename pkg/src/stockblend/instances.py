"""Instance and solution files, and the seeded synthetic instance generator.

Instance files are JSON documents (extension ``.sbp.json``) with the top-level
keys ``meta``, ``process``, ``stockpiles``, ``haul``, ``parcels`` and
``bounds``; see README.md for the schema. Grades are keyed by material name
and stockpiles are referred to by 0-based id.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .fitness import evaluate
from .model import (
    MATERIAL_NAMES,
    N_MATERIALS,
    Bounds,
    ContractError,
    Instance,
    Material,
    Solution,
    StockpileState,
)
from .process import ProcessParams

INSTANCE_FORMAT = "stockblend-instance"
SOLUTION_FORMAT = "stockblend-solution"
FORMAT_VERSION = 1
INSTANCE_SUFFIX = ".sbp.json"

DEFAULT_DURATION = 720.0
DEFAULT_CU_SPREAD = 0.005


class InstanceError(ValueError):
    """A file could not be parsed into a valid instance or solution."""


# -- serialization ---------------------------------------------------------


def _grades_dict(row) -> dict:
    return {name: float(v) for name, v in zip(MATERIAL_NAMES, row)}


def instance_to_dict(instance: Instance) -> dict:
    init = instance.initial_state
    return {
        "meta": {
            "format": INSTANCE_FORMAT,
            "version": FORMAT_VERSION,
            "name": instance.name,
            "seed": instance.seed,
            "months": instance.months,
            "stockpiles": instance.n_stockpiles,
            "available_duration": [float(d) for d in instance.available_duration],
        },
        "process": instance.process.to_dict(),
        "stockpiles": [
            {"id": s, "tonnage": float(init.tonnage[s]), "grades": _grades_dict(init.grades[s])}
            for s in range(instance.n_stockpiles)
        ],
        "haul": [
            {
                "month": m + 1,
                "stockpiles": [
                    {
                        "id": s,
                        "tonnage": float(instance.haul_tonnage[m, s]),
                        "grades": _grades_dict(instance.haul_grades[m, s]),
                    }
                    for s in range(instance.n_stockpiles)
                ],
            }
            for m in range(instance.months)
        ],
        "parcels": [
            {
                "month": m + 1,
                "parcels": [
                    {"target_concentrate": float(k), "stockpiles": list(acc)}
                    for k, acc in zip(instance.target_concentrate[m], instance.access[m])
                ],
            }
            for m in range(instance.months)
        ],
        "bounds": {
            "cu_grade": instance.bounds.cu_grade,
            "f_recovery": instance.bounds.f_recovery,
            "u_recovery": instance.bounds.u_recovery,
            "cu_spread": instance.bounds.cu_spread,
        },
    }


def dumps_instance(instance: Instance) -> str:
    return json.dumps(instance_to_dict(instance), indent=2) + "\n"


def save_instance(instance: Instance, path) -> None:
    Path(path).write_text(dumps_instance(instance))


class _Reader:
    """Field access with error messages that name the offending path."""

    def get(self, obj, key, path, kind=None):
        if not isinstance(obj, dict):
            raise InstanceError(f"{path}: expected an object")
        if key not in obj:
            raise InstanceError(f"{path}.{key}: missing")
        value = obj[key]
        where = f"{path}.{key}"
        if kind == "list" and not isinstance(value, list):
            raise InstanceError(f"{where}: expected a list")
        if kind == "number":
            return self.number(value, where)
        return value

    def number(self, value, where) -> float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise InstanceError(f"{where}: expected a number, got {value!r}")
        value = float(value)
        if not math.isfinite(value):
            raise InstanceError(f"{where}: must be finite")
        return value

    def nonneg(self, obj, key, path) -> float:
        value = self.get(obj, key, path, "number")
        if value < 0:
            raise InstanceError(f"{path}.{key}: must be >= 0, got {value}")
        return value

    def grades(self, obj, path) -> list:
        g = self.get(obj, "grades", path)
        where = f"{path}.grades"
        if not isinstance(g, dict):
            raise InstanceError(f"{where}: expected an object keyed by material")
        extra = set(g) - set(MATERIAL_NAMES)
        if extra:
            raise InstanceError(f"{where}: unknown materials {sorted(extra)}")
        row = []
        for name in MATERIAL_NAMES:
            v = self.get(g, name, where, "number")
            if not 0.0 <= v <= 1.0:
                raise InstanceError(f"{where}.{name}: grade must be in [0, 1], got {v}")
            row.append(v)
        return row


def instance_from_dict(doc: dict) -> Instance:
    r = _Reader()
    if not isinstance(doc, dict):
        raise InstanceError("$: expected a JSON object")
    meta = r.get(doc, "meta", "$")
    if meta.get("format") != INSTANCE_FORMAT:
        raise InstanceError(f"$.meta.format: expected {INSTANCE_FORMAT!r}")
    durations = r.get(meta, "available_duration", "$.meta", "list")
    months = len(durations)
    d = []
    for m, v in enumerate(durations):
        v = r.number(v, f"$.meta.available_duration[{m}]")
        if v <= 0:
            raise InstanceError(f"$.meta.available_duration[{m}]: must be > 0, got {v}")
        d.append(v)

    try:
        process = ProcessParams.from_dict(r.get(doc, "process", "$"))
    except (TypeError, ValueError) as exc:
        raise InstanceError(f"$.process: {exc}") from None

    piles = r.get(doc, "stockpiles", "$", "list")
    if not piles:
        raise InstanceError("$.stockpiles: needs at least one stockpile")
    tonnage, grades = [], []
    for s, pile in enumerate(piles):
        path = f"$.stockpiles[{s}]"
        if r.get(pile, "id", path) != s:
            raise InstanceError(f"{path}.id: expected {s}")
        tonnage.append(r.nonneg(pile, "tonnage", path))
        grades.append(r.grades(pile, path))
    n_s = len(piles)

    haul = r.get(doc, "haul", "$", "list")
    if len(haul) != months:
        raise InstanceError(f"$.haul: expected {months} months, got {len(haul)}")
    h = np.zeros((months, n_s))
    hg = np.zeros((months, n_s, N_MATERIALS))
    for m, entry in enumerate(haul):
        path = f"$.haul[{m}]"
        rows = r.get(entry, "stockpiles", path, "list")
        if len(rows) != n_s:
            raise InstanceError(f"{path}.stockpiles: expected {n_s} entries, got {len(rows)}")
        for s, row in enumerate(rows):
            rpath = f"{path}.stockpiles[{s}]"
            if r.get(row, "id", rpath) != s:
                raise InstanceError(f"{rpath}.id: expected {s}")
            h[m, s] = r.nonneg(row, "tonnage", rpath)
            hg[m, s] = r.grades(row, rpath)

    parcels = r.get(doc, "parcels", "$", "list")
    if len(parcels) != months:
        raise InstanceError(f"$.parcels: expected {months} months, got {len(parcels)}")
    targets, access = [], []
    for m, entry in enumerate(parcels):
        path = f"$.parcels[{m}]"
        rows = r.get(entry, "parcels", path, "list")
        if not rows:
            raise InstanceError(f"{path}.parcels: needs at least one parcel")
        ks, accs = [], []
        for p, row in enumerate(rows):
            ppath = f"{path}.parcels[{p}]"
            k = r.get(row, "target_concentrate", ppath, "number")
            if k <= 0:
                raise InstanceError(f"{ppath}.target_concentrate: must be > 0, got {k}")
            acc = r.get(row, "stockpiles", ppath, "list")
            if not acc:
                raise InstanceError(f"{ppath}.stockpiles: must not be empty")
            if any(isinstance(s, bool) or not isinstance(s, int) or not 0 <= s < n_s for s in acc):
                raise InstanceError(f"{ppath}.stockpiles: ids must be integers in [0, {n_s})")
            if acc != sorted(set(acc)):
                raise InstanceError(f"{ppath}.stockpiles: ids must be ascending and distinct")
            ks.append(k)
            accs.append(tuple(acc))
        targets.append(ks)
        access.append(tuple(accs))

    b = r.get(doc, "bounds", "$")
    bvals = {}
    for key in ("cu_grade", "f_recovery", "u_recovery", "cu_spread"):
        v = r.get(b, key, "$.bounds", "number")
        if not 0.0 <= v <= 1.0:
            raise InstanceError(f"$.bounds.{key}: must be in [0, 1], got {v}")
        bvals[key] = v

    seed = meta.get("seed")
    try:
        return Instance(
            available_duration=np.array(d),
            haul_tonnage=h,
            haul_grades=hg,
            initial_state=StockpileState(np.array(tonnage), np.array(grades)),
            target_concentrate=tuple(targets),
            access=tuple(access),
            bounds=Bounds(**bvals),
            process=process,
            name=str(meta.get("name", "instance")),
            seed=None if seed is None else int(seed),
        )
    except ContractError as exc:
        raise InstanceError(str(exc)) from None


def loads_instance(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"not valid JSON: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return instance_from_dict(doc)


def load_instance(path) -> Instance:
    return loads_instance(Path(path).read_text())


def solution_to_dict(solution: Solution, instance: Instance) -> dict:
    return {
        "format": SOLUTION_FORMAT,
        "version": FORMAT_VERSION,
        "instance": instance.name,
        "months": [
            {
                "month": m + 1,
                "parcels": [
                    {
                        "fractions": {str(s): float(x) for s, x in zip(acc, xs)},
                        "duration": float(t),
                    }
                    for acc, xs, t in zip(
                        instance.access[m], solution.fractions[m], solution.durations[m]
                    )
                ],
            }
            for m in range(solution.months)
        ],
    }


def save_solution(solution: Solution, instance: Instance, path) -> None:
    Path(path).write_text(json.dumps(solution_to_dict(solution, instance), indent=2) + "\n")


def solution_from_dict(doc: dict, instance: Instance) -> Solution:
    r = _Reader()
    if not isinstance(doc, dict) or doc.get("format") != SOLUTION_FORMAT:
        raise InstanceError(f"$.format: expected {SOLUTION_FORMAT!r}")
    months = r.get(doc, "months", "$", "list")
    if len(months) > instance.months:
        raise InstanceError(f"$.months: {len(months)} months for a {instance.months}-month instance")
    fractions, durations = [], []
    for m, entry in enumerate(months):
        path = f"$.months[{m}]"
        rows = r.get(entry, "parcels", path, "list")
        acc = instance.access[m]
        if len(rows) != len(acc):
            raise InstanceError(f"{path}.parcels: expected {len(acc)} parcels, got {len(rows)}")
        month_x, month_t = [], []
        for p, row in enumerate(rows):
            ppath = f"{path}.parcels[{p}]"
            fr = r.get(row, "fractions", ppath)
            if not isinstance(fr, dict) or set(fr) != {str(s) for s in acc[p]}:
                raise InstanceError(f"{ppath}.fractions: keys must be the parcel's stockpiles {list(acc[p])}")
            month_x.append(np.array([r.number(fr[str(s)], f"{ppath}.fractions.{s}") for s in acc[p]]))
            month_t.append(r.get(row, "duration", ppath, "number"))
        fractions.append(month_x)
        durations.append(np.array(month_t))
    return Solution(fractions, durations)


def load_solution(path, instance: Instance) -> Solution:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InstanceError(f"not valid JSON: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return solution_from_dict(doc, instance)


# -- generator -------------------------------------------------------------


def _expand_shape(months: int, parcels, stockpiles) -> list[list[int]]:
    """Stockpile count of every parcel, per month."""
    if months < 1:
        raise ValueError("months must be >= 1")
    per_month = [int(parcels)] * months if np.ndim(parcels) == 0 else [int(p) for p in parcels]
    if len(per_month) != months or min(per_month) < 1:
        raise ValueError(f"parcels: need {months} counts >= 1, got {parcels!r}")
    if np.ndim(stockpiles) == 0:
        counts = [[int(stockpiles)] * p for p in per_month]
    else:
        flat = [int(s) for s in stockpiles]
        if len(set(per_month)) == 1 and len(flat) == per_month[0]:
            counts = [list(flat) for _ in per_month]
        elif len(flat) == sum(per_month):
            edges = np.cumsum([0] + per_month)
            counts = [flat[a:b] for a, b in zip(edges[:-1], edges[1:])]
        else:
            raise ValueError(
                f"stockpiles: give one count, one per parcel of a month, or one per parcel "
                f"of the plan; got {len(flat)} for {per_month} parcels"
            )
    if min(min(c) for c in counts) < 1:
        raise ValueError("stockpile counts must be >= 1")
    return counts


def _draw_grades(rng: np.random.Generator, shape) -> np.ndarray:
    g = rng.uniform(0.0, 0.01, (*shape, N_MATERIALS))
    g[..., Material.Cu] = rng.uniform(0.01, 0.04, shape)
    g[..., Material.Fe] = rng.uniform(0.05, 0.3, shape)
    return g


def probe_solution(instance: Instance) -> Solution:
    """Equal split over each parcel's stockpiles, month duration shared equally."""
    fractions, durations = [], []
    for m, acc in enumerate(instance.access):
        fractions.append([np.full(len(a), 1.0 / len(a)) for a in acc])
        durations.append(np.full(len(acc), float(instance.available_duration[m]) / len(acc)))
    return Solution(fractions, durations)


def generate_instance(
    months: int = 1,
    parcels=2,
    stockpiles=(6, 7),
    seed: int = 1,
    params: ProcessParams | None = None,
    dominant_grade: float | None = None,
    name: str | None = None,
) -> Instance:
    """Seeded synthetic instance.

    Parameters
    ----------
    months : int
    parcels : int or sequence of int
        Parcels per month (one count for all months, or one per month).
    stockpiles : int or sequence of int
        Stockpiles each parcel may draw from: one count for every parcel, one
        per parcel of a month (reused each month), or one per parcel of the
        plan. Parcel ``p`` draws from stockpiles ``0 .. n_p - 1``.
    seed : int
    params : ProcessParams, optional
    dominant_grade : float, optional
        Cu grade forced on stockpile 0 (initial inventory and haul), making it
        the richest stockpile.
    name : str, optional

    Notes
    -----
    Targets and bounds are calibrated on :func:`probe_solution`, which is
    therefore feasible: every target equals the probe's concentrate, the Cu
    bound is 0.9 times the lowest probe Cu grade and the F/U bounds are 1.2
    times the highest probe recoveries (capped at 1). Initial inventories are
    topped up if the probe would overdraw a stockpile.
    """
    counts = _expand_shape(months, parcels, stockpiles)
    params = ProcessParams() if params is None else params
    n_s = max(max(c) for c in counts)
    rng = np.random.default_rng(seed)
    init_grades = _draw_grades(rng, (n_s,))
    init_tonnage = rng.uniform(1e5, 5e5, n_s)
    haul_tonnage = rng.uniform(2e4, 1e5, (months, n_s))
    haul_grades = _draw_grades(rng, (months, n_s))
    if dominant_grade is not None:
        init_grades[0, Material.Cu] = dominant_grade
        haul_grades[:, 0, Material.Cu] = dominant_grade

    access = tuple(tuple(tuple(range(n)) for n in month) for month in counts)
    durations = np.full(months, DEFAULT_DURATION)
    name = name or f"synthetic-m{months}-s{seed}"

    def build(tonnage, targets, bounds):
        return Instance(
            available_duration=durations,
            haul_tonnage=haul_tonnage,
            haul_grades=haul_grades,
            initial_state=StockpileState(tonnage, init_grades),
            target_concentrate=targets,
            access=access,
            bounds=bounds,
            process=params,
            name=name,
            seed=seed,
        )

    placeholder = tuple(np.ones(len(a)) for a in access)
    loose = Bounds(0.0, 1.0, 1.0, 1.0)
    for _ in range(100):
        draft = build(init_tonnage, placeholder, loose)
        _, outcomes, states = evaluate(probe_solution(draft), draft)
        lowest = np.min([s.tonnage for s in states[1:]], axis=0)
        if np.all(lowest >= 0):
            break
        init_tonnage = init_tonnage + np.where(lowest < 0, 1.5 * -lowest, 0.0)
    else:  # pragma: no cover - the top-up shrinks the deficit geometrically
        raise RuntimeError("could not size initial inventories for the probe plan")

    targets = tuple(np.array([o.concentrate for o in month]) for month in outcomes)
    flat = [o for month in outcomes for o in month]
    bounds = Bounds(
        cu_grade=0.9 * min(o.cu_grade for o in flat),
        f_recovery=min(1.0, 1.2 * max(o.f_recovery for o in flat)),
        u_recovery=min(1.0, 1.2 * max(o.u_recovery for o in flat)),
        cu_spread=DEFAULT_CU_SPREAD,
    )
    return build(init_tonnage, targets, bounds)


def shape_label(instance: Instance) -> str:
    """Compact shape, e.g. ``1x2 {6,7}`` (months x parcels, stockpiles per parcel)."""
    counts = ",".join(str(len(a)) for month in instance.access for a in month)
    return f"{instance.months}x{instance.total_parcels} {{{counts}}}"

