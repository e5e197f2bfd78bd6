"""Maximum regret over grids of states of nature.

Two-arm designs with exact evaluation use whole-grid matrix products.
Everything else streams states in fixed batches, optionally across a
process pool. Batches are reduced to a top-K list ordered by
(regret descending, state index ascending), so results do not depend on
the worker count or on completion order.
"""

from __future__ import annotations

import itertools
import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .exact import exact_probs, exact_probs_es, two_arm_new_probs
from .exceptions import ValidationError
from .montecarlo import DEFAULT_SEED, mc_probs
from .regret import MaxRegretResult, regret_at_state
from .rules import EmpiricalSuccess, Rule
from .trial import BinaryState, TrialDesign

log = logging.getLogger(__name__)

TIE_RTOL = 1e-12
MAX_TIES = 1000  # flat ridges can tie at very many grid points
CHECKPOINT_VERSION = 1


# grids ---------------------------------------------------------------------


def midpoints(n_points: int) -> np.ndarray:
    """{0.5/n, 1.5/n, ..., (n - 0.5)/n}."""
    return (np.arange(n_points) + 0.5) / n_points


def uniform_points(n_points: int) -> np.ndarray:
    """{0, 1/(n-1), ..., 1}."""
    return np.linspace(0.0, 1.0, n_points)


@dataclass(frozen=True)
class GridSpec:
    """A finite set of states of nature (success probabilities).

    ``family`` selects how parameters map to arms:

    * ``"full"``: one parameter per arm, full product of ``points``.
      ``classes`` optionally groups exchangeable arms; only sorted
      profiles within each group are generated.
    * ``"es"``: (a, b) -> (a, b, ..., b) with a > b.
    * ``"test"``: (a, b, c) -> (a, b, c, ..., c) with b > a and b > c;
      for two arms (a, b) -> (a, b) with b > a.
    """

    points: tuple[tuple[float, ...], ...]
    n_arms: int
    family: str = "full"
    classes: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self):
        pts = tuple(tuple(float(x) for x in p) for p in self.points)
        for p in pts:
            if not p or any(not 0.0 <= x <= 1.0 for x in p):
                raise ValidationError("grid points must be non-empty and lie in [0, 1]")
        object.__setattr__(self, "points", pts)
        if self.family not in ("full", "es", "test"):
            raise ValidationError(f"unknown grid family {self.family!r}")
        expected = {"full": self.n_arms, "es": 2, "test": 3 if self.n_arms > 2 else 2}
        if len(pts) != expected[self.family]:
            raise ValidationError(
                f"{self.family} grid needs {expected[self.family]} point lists, got {len(pts)}")
        if self.classes is not None:
            arms = sorted(a for c in self.classes for a in c)
            if self.family != "full" or arms != list(range(self.n_arms)):
                raise ValidationError("classes must partition the arms of a full grid")
            for c in self.classes:
                if len({pts[a] for a in c}) != 1:
                    raise ValidationError("exchangeable arms need identical point lists")

    @classmethod
    def full(cls, points, n_arms: int, classes=None) -> "GridSpec":
        pts = tuple(points)
        return cls((pts,) * n_arms, n_arms, "full", classes)

    @classmethod
    def es_family(cls, points, n_arms: int) -> "GridSpec":
        return cls((tuple(points),) * 2, n_arms, "es")

    @classmethod
    def test_family(cls, points, n_arms: int) -> "GridSpec":
        k = 3 if n_arms > 2 else 2
        return cls((tuple(points),) * k, n_arms, "test")

    def _params(self) -> Iterator[tuple[float, ...]]:
        if self.family == "es":
            a_pts, b_pts = self.points
            for a in a_pts:
                for b in b_pts:
                    if a > b:
                        yield (a,) + (b,) * (self.n_arms - 1)
            return
        if self.family == "test":
            if self.n_arms == 2:
                for a, b in itertools.product(*self.points):
                    if b > a:
                        yield (a, b)
                return
            for a, b, c in itertools.product(*self.points):
                if b > a and b > c:
                    yield (a, b) + (c,) * (self.n_arms - 2)
            return
        if self.classes is None:
            yield from itertools.product(*self.points)
            return
        per_class = [itertools.combinations_with_replacement(self.points[c[0]], len(c))
                     for c in self.classes]
        for combo in itertools.product(*per_class):
            state = [0.0] * self.n_arms
            for cls_arms, values in zip(self.classes, combo):
                for arm, v in zip(cls_arms, values):
                    state[arm] = v
            yield tuple(state)

    def states(self) -> Iterator[tuple[float, ...]]:
        return self._params()

    def size(self) -> int:
        if self.family == "full" and self.classes is not None:
            return math.prod(math.comb(len(self.points[c[0]]) + len(c) - 1, len(c))
                             for c in self.classes)
        if self.family == "full":
            return math.prod(len(p) for p in self.points)
        return sum(1 for _ in self._params())

    def to_dict(self) -> dict:
        return {"family": self.family, "n_arms": self.n_arms,
                "points": [len(p) for p in self.points],
                "range": [min(map(min, self.points)), max(map(max, self.points))],
                "classes": None if self.classes is None else [list(c) for c in self.classes]}


def exchangeable_classes(rule: Rule, design: TrialDesign) -> tuple[tuple[int, ...], ...]:
    """Groups of arms whose labels can be permuted without changing regret.

    Arms of equal size are exchangeable under empirical success; under a
    test rule standard care is distinguished, so only new arms of equal
    size are.
    """
    pool = range(design.n_arms) if isinstance(rule, EmpiricalSuccess) else range(1, design.n_arms)
    groups: dict[int, list[int]] = {}
    for arm in pool:
        groups.setdefault(design.arm_sizes[arm], []).append(arm)
    classes = [tuple(g) for g in groups.values()]
    if not isinstance(rule, EmpiricalSuccess):
        classes.insert(0, (0,))
    return tuple(sorted(classes))


# evaluators ----------------------------------------------------------------


@dataclass(frozen=True)
class Exact:
    name = "exact"


@dataclass(frozen=True)
class MonteCarlo:
    n_sims: int
    seed: int = DEFAULT_SEED

    name = "monte-carlo"


Evaluator = Exact | MonteCarlo


def state_key(stage: int, index: int) -> int:
    """Stream key of a state: the stage in the top 16 bits, index below."""
    if not 0 <= index < 2 ** 48:
        raise ValidationError("state index out of range")
    return (stage << 48) | index


# top-K bookkeeping -----------------------------------------------------------

# an entry is (regret, index, state, error_probability, std_error)


def _merge_top(top: list, new: list, k: int) -> list:
    merged = sorted(top + new, key=lambda e: (-e[0], e[1]))
    return merged[:k]


def _result_from_top(top, method, n_evaluated, stages=None) -> MaxRegretResult:
    if not top:
        raise ValidationError("no states were evaluated")
    best = top[0]
    ties = [tuple(e[2]) for e in top if e[0] >= best[0] * (1 - TIE_RTOL)][:MAX_TIES]
    return MaxRegretResult(
        value=float(best[0]), argmax_state=tuple(best[2]), method=method,
        argmax_states=ties, error_probability=best[3], std_error=best[4],
        top=[(float(e[0]), tuple(e[2])) for e in top], n_evaluated=n_evaluated,
        stages=stages or [])


# streaming evaluation ------------------------------------------------------


def _evaluate_batch(rule, design, evaluator, stage, items, k):
    out = []
    for idx, p in items:
        state = BinaryState(p)
        if isinstance(evaluator, MonteCarlo):
            probs = mc_probs(rule, design, state, evaluator.n_sims, evaluator.seed,
                             state_key(stage, idx))
        elif isinstance(rule, EmpiricalSuccess) and design.n_arms > 2:
            probs = exact_probs_es(design, state)
        else:
            probs = exact_probs(rule, design, state)
        rep = regret_at_state(probs, state)
        out.append((rep.expected_loss, idx, tuple(p), rep.error_probability, rep.std_error))
    return _merge_top([], out, k), len(items)


def _batch_size(evaluator) -> int:
    if isinstance(evaluator, MonteCarlo):
        return int(max(1, min(4096, 20_000_000 // evaluator.n_sims)))
    return 512


def _batches(states: Iterator, size: int, skip: int = 0):
    it = enumerate(states)
    b = 0
    while True:
        chunk = list(itertools.islice(it, size))
        if not chunk:
            return
        if b >= skip:
            yield b, chunk
        b += 1


def _search_states(rule, design, states, evaluator, stage, k, workers=1,
                   progress=None, start_batch=0, top=None, n_done=0):
    """Evaluate states and return (top, n_evaluated)."""
    top = list(top or [])
    size = _batch_size(evaluator)
    batches = _batches(states, size, skip=start_batch)
    if workers <= 1:
        for b, chunk in batches:
            res, n = _evaluate_batch(rule, design, evaluator, stage, chunk, k)
            top = _merge_top(top, res, k)
            n_done += n
            if progress:
                progress(b + 1, top, n_done)
        return top, n_done
    with ProcessPoolExecutor(max_workers=workers) as pool:
        pending = []
        for b, chunk in batches:
            pending.append((b, pool.submit(_evaluate_batch, rule, design, evaluator, stage,
                                           chunk, k)))
            if len(pending) >= 2 * workers:
                b0, fut = pending.pop(0)
                res, n = fut.result()
                top = _merge_top(top, res, k)
                n_done += n
                if progress:
                    progress(b0 + 1, top, n_done)
        for b0, fut in pending:
            res, n = fut.result()
            top = _merge_top(top, res, k)
            n_done += n
            if progress:
                progress(b0 + 1, top, n_done)
    return top, n_done


# two-arm exact grids ---------------------------------------------------------


def _two_arm_regret(rule, design, g1, g2):
    p_new = two_arm_new_probs(rule, design, g1, g2)
    gap = np.asarray(g2)[None, :] - np.asarray(g1)[:, None]
    regret = np.where(gap > 0, gap * (1.0 - p_new), -gap * p_new)
    err = np.where(gap > 0, 1.0 - p_new, np.where(gap < 0, p_new, 0.0))
    return regret, err


def _matrix_top(regret, err, g1, g2, k, index_of=None):
    flat = regret.ravel()
    k_eff = min(k, flat.size)
    vmax = flat.max()
    ties = np.flatnonzero(flat >= vmax * (1 - TIE_RTOL))[:MAX_TIES]
    cand = np.argpartition(-flat, k_eff - 1)[:k_eff]
    cand = np.union1d(cand, ties)
    entries = []
    J = regret.shape[1]
    for f in cand:
        i, j = divmod(int(f), J)
        idx = index_of(i, j) if index_of else int(f)
        entries.append((float(flat[f]), idx, (float(g1[i]), float(g2[j])), float(err[i, j]), 0.0))
    entries.sort(key=lambda e: (-e[0], e[1]))
    # keep every tied state even beyond k
    n_keep = max(k_eff, sum(1 for e in entries if e[0] >= vmax * (1 - TIE_RTOL)))
    return entries[:min(n_keep, max(k_eff, MAX_TIES))]


def max_regret_grid(rule: Rule, design: TrialDesign, grid: GridSpec | None = None,
                    evaluator: Evaluator = Exact(), workers: int = 1,
                    top_k: int = 10, stage: int = 0) -> MaxRegretResult:
    """Evaluate regret at every grid state and return the maximum.

    The default grid for two arms is the 1000-point midpoint grid per arm.
    """
    if grid is None:
        if design.n_arms != 2:
            raise ValidationError("multi-arm searches need an explicit grid")
        grid = GridSpec.full(midpoints(1000), 2)
    if grid.n_arms != design.n_arms:
        raise ValidationError("grid and design differ in arm count")
    if (design.n_arms == 2 and isinstance(evaluator, Exact) and grid.family == "full"
            and grid.classes is None):
        g1, g2 = (np.array(p) for p in grid.points)
        regret, err = _two_arm_regret(rule, design, g1, g2)
        top = _matrix_top(regret, err, g1, g2, top_k)
        return _result_from_top(top, "exact", regret.size)
    top, n = _search_states(rule, design, grid.states(), evaluator, stage, top_k, workers)
    return _result_from_top(top, evaluator.name, n)


def coarse_to_fine_two_arm(rule: Rule, design: TrialDesign, resolution: int = 1000,
                           strides: Sequence[int] = (10, 1), top_k: int = 10) -> MaxRegretResult:
    """Search the midpoint grid of ``resolution`` points per arm adaptively.

    Level 0 evaluates every ``strides[0]``-th grid point per arm; each later
    level evaluates the finer grid in windows around the previous level's
    ``top_k`` cells. Every evaluated state belongs to the full grid, so the
    result is the full-grid maximum whenever it lies inside a window.
    """
    if design.n_arms != 2:
        raise ValidationError("coarse-to-fine search is for two-arm designs")
    strides = [int(s) for s in strides]
    if strides[-1] != 1 or any(a < b for a, b in zip(strides, strides[1:])):
        raise ValidationError("strides must be non-increasing and end at 1")
    grid = midpoints(resolution)
    s0 = strides[0]
    idx = np.arange(s0 // 2, resolution, s0)
    regret, err = _two_arm_regret(rule, design, grid[idx], grid[idx])
    top = _matrix_top(regret, err, grid[idx], grid[idx], top_k,
                      index_of=lambda i, j: int(idx[i]) * resolution + int(idx[j]))
    evaluated = regret.size
    stages = [{"stride": s0, "evaluated": int(regret.size), "max": top[0][0]}]
    prev = s0
    for s in strides[1:]:
        seen = {}
        for entry in top:
            seen[entry[1]] = entry
        reach = prev // s
        for _, flat, *_ in list(top):
            i0, j0 = divmod(flat, resolution)
            ii = np.array([i0 + s * r for r in range(-reach, reach + 1)
                           if 0 <= i0 + s * r < resolution])
            jj = np.array([j0 + s * r for r in range(-reach, reach + 1)
                           if 0 <= j0 + s * r < resolution])
            reg, e = _two_arm_regret(rule, design, grid[ii], grid[jj])
            evaluated += reg.size
            for entry in _matrix_top(reg, e, grid[ii], grid[jj], reg.size,
                                     index_of=lambda i, j: int(ii[i]) * resolution + int(jj[j])):
                seen[entry[1]] = entry
        ranked = sorted(seen.values(), key=lambda e: (-e[0], e[1]))
        vmax = ranked[0][0]
        n_keep = max(top_k, sum(1 for e in ranked if e[0] >= vmax * (1 - TIE_RTOL)))
        top = ranked[:n_keep]
        stages.append({"stride": s, "evaluated": int(evaluated), "max": vmax})
        prev = s
    return _result_from_top(top, "exact-coarse-to-fine", evaluated, stages)


# multi-arm pipeline ------------------------------------------------------------


@dataclass(frozen=True)
class PipelineConfig:
    """Simulation budget of the three-step multi-arm search.

    Defaults are the full budget: a 51-point full grid with 1e5 simulations
    per state, 101-point restricted-family grids with 1e6, and the top 10
    states re-simulated 1e8 times. ``step2_stride > 1`` screens the family
    grid at that stride with ``step2_screen_sims`` before refining around
    the ``step2_refine_top`` best points at full resolution.
    """

    step1: bool = True
    step1_points: int = 51
    step1_sims: int = 100_000
    step2_points: int = 101
    step2_sims: int = 1_000_000
    step2_stride: int = 1
    step2_screen_sims: int = 100_000
    step2_refine_top: int = 20
    step2_exact_es: bool = False
    step3_top: int = 10
    step3_sims: int = 100_000_000

    def __post_init__(self):
        for name in ("step1_points", "step2_points"):
            if getattr(self, name) < 2:
                raise ValidationError(f"{name} must be at least 2")
        for name in ("step1_sims", "step2_sims", "step2_screen_sims", "step3_sims",
                     "step3_top", "step2_stride", "step2_refine_top"):
            if getattr(self, name) < 1:
                raise ValidationError(f"{name} must be positive")

    def total_sims_estimate(self, rule: Rule, design: TrialDesign) -> int:
        total = 0
        if self.step1:
            g = GridSpec.full(uniform_points(self.step1_points), design.n_arms,
                              exchangeable_classes(rule, design))
            total += g.size() * self.step1_sims
        return total + self.step3_top * self.step3_sims


PAPER = PipelineConfig()

DESK = PipelineConfig(step1_points=11, step1_sims=2_000, step2_sims=100_000,
                      step2_stride=2, step2_screen_sims=10_000, step2_refine_top=20,
                      step2_exact_es=True, step3_sims=10_000_000)

PRESETS = {"paper": PAPER, "full": PAPER, "desk": DESK}


class _Checkpoint:
    """JSON record of completed stages and progress within the current one."""

    def __init__(self, path, identity: dict):
        self.path = Path(path) if path else None
        self.identity = identity
        self.data = {"schema_version": CHECKPOINT_VERSION, "kind": "nearopt-pipeline-checkpoint",
                     "identity": identity, "stages": {}, "partial": None}
        if self.path and self.path.exists():
            loaded = json.loads(self.path.read_text())
            if loaded.get("schema_version") != CHECKPOINT_VERSION:
                raise ValidationError(f"unsupported checkpoint version in {self.path}")
            if loaded.get("identity") != identity:
                raise ValidationError(f"checkpoint {self.path} belongs to a different run")
            self.data = loaded

    def stage(self, name):
        return self.data["stages"].get(name)

    def partial(self, name):
        p = self.data.get("partial")
        return p if p and p["stage"] == name else None

    def save_partial(self, name, batches_done, top, n_done):
        self.data["partial"] = {"stage": name, "batches_done": batches_done,
                                "n_evaluated": n_done, "top": _encode(top)}
        self._write()

    def save_stage(self, name, record):
        self.data["stages"][name] = record
        self.data["partial"] = None
        self._write()

    def _write(self):
        if not self.path:
            return
        tmp = self.path.with_suffix(self.path.suffix + ".tmp")
        tmp.write_text(json.dumps(self.data, indent=1))
        os.replace(tmp, self.path)


def _encode(top):
    return [[e[0], e[1], list(e[2]), e[3], e[4]] for e in top]


def _decode(top):
    return [(e[0], e[1], tuple(e[2]), e[3], e[4]) for e in top]


def _family_grid(rule, design, points) -> GridSpec:
    if isinstance(rule, EmpiricalSuccess):
        return GridSpec.es_family(points, design.n_arms)
    return GridSpec.test_family(points, design.n_arms)


def _neighbours(state, rule, design, step, reach, n_points):
    """Fine-grid family points within ``reach`` steps of a family state."""
    params = (state[0], state[1]) if isinstance(rule, EmpiricalSuccess) else (
        (state[0], state[1]) if design.n_arms == 2 else (state[0], state[1], state[2]))
    axes = []
    for v in params:
        i = int(round(v / step))
        axes.append([j * step for j in range(i - reach, i + reach + 1) if 0 <= j < n_points])
    fam = GridSpec(tuple(tuple(a) for a in axes), design.n_arms,
                   "es" if isinstance(rule, EmpiricalSuccess) else "test")
    return list(fam.states())


def max_regret_multiarm_pipeline(rule: Rule, design: TrialDesign,
                                 config: PipelineConfig = PAPER, seed: int = DEFAULT_SEED,
                                 workers: int = 1, checkpoint: str | Path | None = None,
                                 top_k: int = 10) -> MaxRegretResult:
    """Three-step search for the maximum regret of a multi-arm rule.

    1. Full grid (exchangeable arms reduced to sorted profiles), Monte Carlo.
    2. Restricted family grid: standard care at a, new arms at b (a > b) for
       empirical success; standard care a, one new arm b, the rest c
       (b > a, b > c) for the test rule.
    3. The best step-2 states, plus the best step-1 state as a guard, are
       re-simulated with the largest budget; the maximum of these is returned.
    """
    identity = {"rule": rule.name, "alpha": getattr(rule, "alpha", None),
                "design": list(design.arm_sizes), "config": asdict(config), "seed": int(seed)}
    ckpt = _Checkpoint(checkpoint, identity)
    stages = []
    t_start = time.perf_counter()

    def run_stage(name, stage_no, states, evaluator, k):
        done = ckpt.stage(name)
        if done is not None:
            return _decode(done["top"]), done["n_evaluated"]
        part = ckpt.partial(name)
        start, top, n0 = 0, [], 0
        if part:
            start, top, n0 = part["batches_done"], _decode(part["top"]), part["n_evaluated"]
        last = [time.monotonic()]

        def progress(b, top_now, n_now):
            if ckpt.path and time.monotonic() - last[0] > 30:
                ckpt.save_partial(name, b, top_now, n_now)
                last[0] = time.monotonic()

        top, n = _search_states(rule, design, states, evaluator, stage_no, k, workers,
                                progress if ckpt.path else None, start, top, n0)
        ckpt.save_stage(name, {"top": _encode(top), "n_evaluated": n})
        return top, n

    # step 1
    step1_top = []
    if config.step1:
        g1 = GridSpec.full(uniform_points(config.step1_points), design.n_arms,
                           exchangeable_classes(rule, design))
        t0 = time.perf_counter()
        step1_top, n1 = run_stage("step1", 1, g1.states(), MonteCarlo(config.step1_sims, seed),
                                  top_k)
        stages.append({"stage": 1, "grid": g1.to_dict(), "n_sims": config.step1_sims,
                       "n_evaluated": n1, "max": step1_top[0][0],
                       "argmax": list(step1_top[0][2]), "seconds": time.perf_counter() - t0})
        log.info("step 1: %d states, max %.5f at %s", n1, step1_top[0][0], step1_top[0][2])

    # step 2
    t0 = time.perf_counter()
    pts = uniform_points(config.step2_points)
    step = 1.0 / (config.step2_points - 1)
    fam = _family_grid(rule, design, pts)
    k2 = max(config.step3_top, config.step2_refine_top, top_k)
    if isinstance(rule, EmpiricalSuccess) and config.step2_exact_es:
        step2_top, n2 = run_stage("step2", 2, fam.states(), Exact(), k2)
        how = "exact"
    elif config.step2_stride > 1:
        coarse = _family_grid(rule, design, pts[:: config.step2_stride])
        screen_top, ns = run_stage("step2-screen", 2, coarse.states(),
                                   MonteCarlo(config.step2_screen_sims, seed),
                                   config.step2_refine_top)
        cand = {}
        for e in screen_top:
            for s in _neighbours(e[2], rule, design, step, config.step2_stride - 1,
                                 config.step2_points):
                cand.setdefault(tuple(round(x, 12) for x in s), None)
        refine_states = sorted(cand)
        step2_top, n2 = run_stage("step2", 3, iter(refine_states),
                                  MonteCarlo(config.step2_sims, seed), k2)
        n2 += ns
        how = f"screen stride {config.step2_stride}, refine {len(refine_states)} states"
    else:
        step2_top, n2 = run_stage("step2", 3, fam.states(), MonteCarlo(config.step2_sims, seed), k2)
        how = "monte-carlo"
    stages.append({"stage": 2, "family": fam.family, "points": config.step2_points,
                   "method": how, "n_sims": config.step2_sims, "n_evaluated": n2,
                   "max": step2_top[0][0], "argmax": list(step2_top[0][2]),
                   "seconds": time.perf_counter() - t0})
    log.info("step 2: %d states, max %.5f at %s", n2, step2_top[0][0], step2_top[0][2])

    # step 3
    t0 = time.perf_counter()
    finalists = [e[2] for e in step2_top[: config.step3_top]]
    guard = step1_top[0][2] if step1_top else None
    if guard is not None and guard not in finalists:
        finalists.append(guard)
    step3_top, n3 = run_stage("step3", 4, iter(finalists), MonteCarlo(config.step3_sims, seed),
                              len(finalists))
    guard_entry = next((e for e in step3_top if e[2] == guard), None)
    family = {e[2] for e in step2_top[: config.step3_top]}
    family_best = next((e for e in step3_top if e[2] in family), None)
    guard_ok = guard_entry is None or family_best is None or (
        guard_entry[0] <= family_best[0] + 4 * max(guard_entry[4], family_best[4]))
    if not guard_ok:
        log.warning("step-1 guard state %s beats the restricted family (%.5f > %.5f)",
                    guard, guard_entry[0], family_best[0])
    stages.append({"stage": 3, "n_sims": config.step3_sims, "n_evaluated": n3,
                   "max": step3_top[0][0], "argmax": list(step3_top[0][2]),
                   "guard_state": None if guard is None else list(guard),
                   "guard_regret": None if guard_entry is None else guard_entry[0],
                   "restriction_guard_ok": bool(guard_ok),
                   "seconds": time.perf_counter() - t0})
    result = _result_from_top(step3_top, "monte-carlo-pipeline", n3, stages)
    result.n_evaluated = sum(s["n_evaluated"] for s in stages)
    log.info("pipeline done in %.1fs: %.5f", time.perf_counter() - t_start, result.value)
    return result
