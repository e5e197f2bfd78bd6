"""Command implementations behind the CLI.

Each ``cmd_*`` function takes a :class:`RunConfig` and returns a
:class:`CommandResult` of plain records (JSON-ready dicts). Rendering is
left to :mod:`nearopt.reporting`.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from importlib import resources

import numpy as np

from .bounds import BoundInput, bound_best
from .config import ConfigError, RunConfig
from .exact import exact_probs
from .exceptions import BudgetExceeded
from .montecarlo import mc_probs
from .planning import plan_sample_size
from .regret import regret_at_state
from .rules import EmpiricalSuccess, Rule, rule_from_name
from .search import (PRESETS, Exact, GridSpec, MonteCarlo, PipelineConfig,
                     coarse_to_fine_two_arm, exchangeable_classes, max_regret_grid,
                     max_regret_multiarm_pipeline, midpoints, uniform_points)
from .trial import BinaryState, TrialDesign, complement, make_design

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1


@dataclass
class CommandResult:
    command: str
    config: RunConfig
    records: list[dict]
    comparisons: list[dict] = field(default_factory=list)
    seconds: list[float] = field(default_factory=list)  # per record, markdown only

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.comparisons)


def _floats(x) -> list[float]:
    return [float(v) for v in np.asarray(x, dtype=float).ravel()]


def _rules(cfg: RunConfig) -> list[tuple[str, Rule]]:
    return [(name, rule_from_name(name, cfg.alpha)) for name in cfg.rules]


# scenario ------------------------------------------------------------------


def scenario_record(name: str, rule: Rule, design: TrialDesign, state: BinaryState,
                    evaluator: str = "auto", n_sims: int = 1_000_000, seed: int = 0,
                    state_index: int = 0) -> dict:
    """Prescription probabilities and losses of one rule at one state."""
    if evaluator == "auto":
        evaluator = "exact" if design.n_arms == 2 or isinstance(rule, EmpiricalSuccess) else "mc"
    if evaluator == "exact":
        probs = exact_probs(rule, design, state)
    else:
        probs = mc_probs(rule, design, state, n_sims, seed, state_index)
    rep = regret_at_state(probs, state)
    mc = probs.method == "monte-carlo"
    return {
        "schema_version": SCHEMA_VERSION,
        "design": list(design.arm_sizes),
        "rule": name,
        "rule_label": rule.label(design),
        "success": list(state.success_probs),
        "mortality": list(state.mortality()),
        "prescription": _floats(probs.probs),
        "prescription_se": _floats(probs.std_errors) if mc else None,
        "per_arm_loss": _floats(rep.per_arm_loss),
        "weighted_loss": _floats(rep.per_arm_loss * probs.probs),
        "expected_loss": float(rep.expected_loss),
        "expected_loss_se": float(rep.std_error) if mc else None,
        "error_probability": rep.error_probability,
        "method": probs.method,
        "n_sims": probs.n_sims if mc else None,
        "seed": probs.seed if mc else None,
        "state_index": probs.state_index if mc else None,
    }


def cmd_scenario(cfg: RunConfig) -> CommandResult:
    if not cfg.designs:
        raise ConfigError("scenario needs a design")
    if not cfg.states:
        raise ConfigError("scenario needs at least one state")
    records = []
    for design_sizes in cfg.designs:
        design = make_design(design_sizes)
        for i, p in enumerate(cfg.states):
            if len(p) != design.n_arms:
                raise ConfigError(
                    f"state {list(p)} has {len(p)} arms but design {list(design_sizes)} has "
                    f"{design.n_arms}")
            for name, rule in _rules(cfg):
                records.append(scenario_record(name, rule, design, BinaryState(p), cfg.evaluator,
                                               cfg.n_sims, cfg.seed, i))
    return CommandResult("scenario", cfg, records)


# near-optimality -------------------------------------------------------------


def near_optimality_record(name: str, rule: Rule, design: TrialDesign, cfg: RunConfig,
                           pipeline: PipelineConfig | None = None, checkpoint=None):
    """Maximum regret of one rule on one design, routed by ``cfg``."""
    two = design.n_arms == 2
    search = cfg.search
    if search == "auto":
        if not two:
            search = "pipeline" if cfg.evaluator != "exact" else "full"
        elif cfg.evaluator == "mc":
            search = "full"
        else:
            search = "full" if max(design.arm_sizes) <= 1000 else "coarse-to-fine"
    if search == "coarse-to-fine":
        if not two:
            raise ConfigError("coarse-to-fine search needs a two-arm design")
        if cfg.evaluator == "mc":
            raise ConfigError("coarse-to-fine search is exact only")
        res = coarse_to_fine_two_arm(rule, design, resolution=cfg.grid_points)
    elif search == "pipeline":
        if two:
            raise ConfigError("the multi-arm pipeline needs at least three arms")
        if cfg.evaluator == "exact":
            raise ConfigError("the multi-arm pipeline is Monte Carlo only")
        res = max_regret_multiarm_pipeline(rule, design, pipeline or cfg.pipeline_config(),
                                           seed=cfg.seed, workers=cfg.threads,
                                           checkpoint=checkpoint)
    else:
        evaluator = MonteCarlo(cfg.n_sims, cfg.seed) if cfg.evaluator == "mc" else Exact()
        if two:
            grid = GridSpec.full(midpoints(cfg.grid_points), 2)
        else:
            grid = GridSpec.full(uniform_points(cfg.grid_points), design.n_arms,
                                 exchangeable_classes(rule, design))
        res = max_regret_grid(rule, design, grid, evaluator, workers=cfg.threads)
    mc = "monte-carlo" in res.method
    return {
        "schema_version": SCHEMA_VERSION,
        "design": list(design.arm_sizes),
        "rule": name,
        "rule_label": rule.label(design),
        "value": float(res.value),
        "argmax_success": list(res.argmax_state),
        "argmax_mortality": list(res.argmax_mortality()),
        "argmax_ties": [list(s) for s in res.argmax_states],
        "error_probability": res.error_probability,
        "std_error": res.std_error if mc else None,
        "method": res.method,
        "n_evaluated": int(res.n_evaluated),
        "seed": cfg.seed if mc else None,
        "stages": [{k: v for k, v in s.items() if k != "seconds"} for s in res.stages],
    }


def cmd_near_optimality(cfg: RunConfig) -> CommandResult:
    if not cfg.designs:
        raise ConfigError("near-optimality needs at least one design")
    records, seconds = [], []
    for sizes in cfg.designs:
        design = make_design(sizes)
        for name, rule in _rules(cfg):
            t0 = time.perf_counter()
            ck = None
            if cfg.checkpoint:
                ck = f"{cfg.checkpoint}.{'-'.join(map(str, sizes))}.{name}.json"
            records.append(near_optimality_record(name, rule, design, cfg, checkpoint=ck))
            seconds.append(time.perf_counter() - t0)
    return CommandResult("near-optimality", cfg, records, seconds=seconds)


# bounds ----------------------------------------------------------------------


def cmd_bounds(cfg: RunConfig) -> CommandResult:
    if not cfg.L or not cfg.n:
        raise ConfigError("bounds needs L and n")
    records = []
    for L in cfg.L:
        for n in cfg.n:
            b = bound_best(BoundInput(cfg.V, L, n))
            records.append({"schema_version": SCHEMA_VERSION, "V": cfg.V, "L": L, "n": n,
                            **b.to_dict()})
    return CommandResult("bounds", cfg, records)


# plan ----------------------------------------------------------------------------


def cmd_plan(cfg: RunConfig) -> CommandResult:
    if cfg.target is None:
        raise ConfigError("plan needs a target")
    records = []
    for name, rule in _rules(cfg):
        def evaluate(design, name=name, rule=rule):
            return near_optimality_record(name, rule, design, cfg)["value"]

        res = plan_sample_size(rule, cfg.shape, cfg.target, cfg.n_max, cfg.decimals, evaluate)
        records.append({"schema_version": SCHEMA_VERSION, "rule": name, "shape": list(cfg.shape),
                        **res.to_dict()})
    return CommandResult("plan", cfg, records)


# reproduce -----------------------------------------------------------------------


@lru_cache(maxsize=1)
def reference_tables() -> dict:
    """Embedded reference values for tables 1 to 4."""
    path = resources.files("nearopt") / "data" / "reference_tables.json"
    return json.loads(path.read_text())


def _compare(table, cell, reference, computed, tol) -> dict:
    dev = float(computed) - float(reference)
    return {"schema_version": SCHEMA_VERSION, "table": table, "cell": cell,
            "reference": float(reference), "computed": float(computed), "deviation": dev,
            "tolerance": float(tol), "passed": bool(abs(dev) <= tol)}


def _table1(cfg):
    ref = reference_tables()["table1"]
    design = make_design(ref["design"])
    tol = ref["tolerance"]
    records, comps = [], []
    for name in ("ttest", "es"):
        rule = rule_from_name(name, ref["alpha"])
        r = ref[name]
        for j, m in enumerate(ref["new_mortality"]):
            state = BinaryState((complement(ref["standard_mortality"]), complement(m)))
            rec = scenario_record(name, rule, design, state, "exact")
            records.append(rec)
            tag = f"{name} new mortality {m}"
            comps.append(_compare(1, f"{tag}: % standard care", r["standard_pct"][j],
                                  100 * rec["prescription"][0], tol["pct"]))
            comps.append(_compare(1, f"{tag}: % new treatment", r["new_pct"][j],
                                  100 * rec["prescription"][1], tol["pct"]))
            comps.append(_compare(1, f"{tag}: expected loss", r["expected_loss"][j],
                                  rec["expected_loss"], tol["expected_loss"]))
    return records, comps


def _table2(cfg):
    ref = reference_tables()["table2"]
    tol = ref["tolerance"]
    records, comps, secs = [], [], []
    for n, v_test, v_es in ref["rows"]:
        if cfg.budget == "desk" and n > ref["desk_max_n"]:
            continue
        design = make_design([n, n])
        for name, v in (("ttest", v_test), ("es", v_es)):
            t0 = time.perf_counter()
            rec = near_optimality_record(name, rule_from_name(name, cfg.alpha), design,
                                         _two_arm_cfg(cfg, n))
            secs.append(time.perf_counter() - t0)
            records.append(rec)
            t = tol["full_grid"] if n <= ref["desk_max_n"] else tol["coarse_to_fine"]
            comps.append(_compare(2, f"n={n} {name}", v, rec["value"], t))
    return records, comps, secs


def _two_arm_cfg(cfg, n):
    c = RunConfig(**{**asdict(cfg), "evaluator": "exact", "grid_points": 1000,
                     "search": "full" if n <= 1000 else "coarse-to-fine"})
    return c


def _table3(cfg):
    ref = reference_tables()["table3"]
    tol = ref["tolerance"]
    design = make_design(ref["design"])
    state = BinaryState(tuple(complement(m) for m in ref["mortality"]))
    n_sims = 1_000_000 if cfg.budget == "desk" else 100_000_000
    records, comps = [], []
    for name in ("dunnett", "es"):
        rec = scenario_record(name, rule_from_name(name, cfg.alpha), design, state, "mc",
                              n_sims, cfg.seed, 0)
        records.append(rec)
        for t, label in enumerate(["standard care", "A", "B", "C", "D"]):
            comps.append(_compare(3, f"{name} % {label}", ref[name]["pct"][t],
                                  100 * rec["prescription"][t], tol["pct"]))
        comps.append(_compare(3, f"{name} expected loss", ref[name]["expected_loss"],
                              rec["expected_loss"], tol["expected_loss"]))
    return records, comps


def _table4(cfg):
    ref = reference_tables()["table4"]
    tol = ref["tolerance"]
    rows = ref["rows"][: ref["desk_rows"]] if cfg.budget == "desk" else ref["rows"]
    base = asdict(PRESETS["desk" if cfg.budget == "desk" else "paper"])
    base.update(cfg.pipeline_overrides)
    pipeline = PipelineConfig(**base)
    records, comps, secs = [], [], []
    for sizes, v_test, v_es in rows:
        design = make_design(sizes)
        for name, v in (("dunnett", v_test), ("es", v_es)):
            t0 = time.perf_counter()
            ck = None
            if cfg.checkpoint:
                ck = f"{cfg.checkpoint}.{'-'.join(map(str, sizes))}.{name}.json"
            pcfg = RunConfig(**{**asdict(cfg), "search": "pipeline", "evaluator": "mc"})
            rec = near_optimality_record(name, rule_from_name(name, cfg.alpha), design, pcfg,
                                         pipeline, ck)
            secs.append(time.perf_counter() - t0)
            records.append(rec)
            comps.append(_compare(4, f"{':'.join(map(str, sizes))} {name}", v, rec["value"],
                                  tol[name]))
    return records, comps, secs


def cmd_reproduce(cfg: RunConfig) -> CommandResult:
    if cfg.table not in (1, 2, 3, 4):
        raise ConfigError("reproduce needs table = 1, 2, 3 or 4")
    secs = []
    if cfg.table == 1:
        records, comps = _table1(cfg)
    elif cfg.table == 2:
        records, comps, secs = _table2(cfg)
    elif cfg.table == 3:
        records, comps = _table3(cfg)
    else:
        records, comps, secs = _table4(cfg)
    return CommandResult("reproduce", cfg, records, comps, secs)


COMMANDS = {
    "scenario": cmd_scenario,
    "near-optimality": cmd_near_optimality,
    "bounds": cmd_bounds,
    "plan": cmd_plan,
    "reproduce": cmd_reproduce,
}


def run(cfg: RunConfig) -> CommandResult:
    try:
        return COMMANDS[cfg.command](cfg)
    except MemoryError:
        raise BudgetExceeded("out of memory; reduce the grid or simulation budget") from None
