"""Batch simulation over Waxman topologies: run, aggregate, emit CSV and plots."""

from __future__ import annotations

import csv
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .adh import adh_tree, root_tree
from .dcadh import dcadh
from .graph import MulticastRequest, Network, max_delay, tree_cost
from .shortest_paths import least_delay_tree, spt_routed_tree
from .topology import WaxmanConfig, generate

log = logging.getLogger(__name__)

SWEEPS = ("network_size", "group_size", "delay_bound")
ALGORITHMS = ("DCADH", "ADH", "SPT")
RAW_COLUMNS = ("algorithm", "sweep", "topology_seed", "trial", "cost", "max_delay_s", "feasible", "runtime_us")
SUMMARY_COLUMNS = (
    "algorithm", "sweep", "records", "feasible", "feasibility_rate",
    "mean_cost", "mean_max_delay_s", "mean_runtime_us", "flag",
)


@dataclass(frozen=True)
class ExperimentSpec:
    sweep: str
    values: tuple[float, ...]
    n: int = 60
    m: int = 20
    delay_bound: float = 0.03
    topologies: int = 10
    trials: int = 100
    base_seed: int = 0
    algorithms: tuple[str, ...] = ALGORITHMS
    alpha: float = 0.3
    beta: float = 0.3
    area_width_km: float = 2400.0
    area_height_km: float = 3000.0

    def __post_init__(self) -> None:
        if self.sweep not in SWEEPS:
            raise ValueError(f"sweep must be one of {SWEEPS}")
        if not self.values:
            raise ValueError("need at least one sweep value")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ValueError("sweep values must be strictly increasing")
        if self.trials < 1 or self.topologies < 1:
            raise ValueError("trials and topologies must be >= 1")
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown:
            raise ValueError(f"unknown algorithms {sorted(unknown)}")

    def point(self, value: float) -> tuple[int, int, float]:
        """``(n, m, delay_bound)`` at one sweep value."""
        n, m, delay = self.n, self.m, self.delay_bound
        if self.sweep == "network_size":
            n = int(value)
        elif self.sweep == "group_size":
            m = int(value)
        else:
            delay = float(value)
        return n, m, delay


def _delay_grid() -> tuple[float, ...]:
    return tuple(round(0.01 * i, 2) for i in range(1, 11))


PRESETS: dict[tuple[str, str], ExperimentSpec] = {
    ("exp1", "paper"): ExperimentSpec("network_size", tuple(range(60, 121, 10)), m=20),
    ("exp2", "paper"): ExperimentSpec("group_size", tuple(range(20, 81, 10)), n=100),
    ("exp3", "paper"): ExperimentSpec("delay_bound", _delay_grid(), n=60, m=20),
    ("exp1", "desk"): ExperimentSpec("network_size", (30, 40, 50, 60), m=8, topologies=20, trials=20),
    ("exp2", "desk"): ExperimentSpec("group_size", (5, 10, 15, 20), n=40, topologies=20, trials=20),
    ("exp3", "desk"): ExperimentSpec("delay_bound", _delay_grid(), n=30, m=8, topologies=20, trials=20),
}


def preset(name: str, scale: str = "desk", **overrides) -> ExperimentSpec:
    try:
        spec = PRESETS[(name, scale)]
    except KeyError:
        raise ValueError(f"unknown preset {name!r} at scale {scale!r}") from None
    return replace(spec, **{k: v for k, v in overrides.items() if v is not None})


@dataclass(frozen=True)
class ExperimentRecord:
    algorithm: str
    sweep: float
    topology_seed: int
    trial: int
    cost: float | None
    max_delay_s: float | None
    feasible: bool
    runtime_us: int

    def row(self) -> list[str]:
        return [
            self.algorithm,
            repr(self.sweep),
            str(self.topology_seed),
            str(self.trial),
            "" if self.cost is None else repr(self.cost),
            "" if self.max_delay_s is None else repr(self.max_delay_s),
            "1" if self.feasible else "0",
            str(self.runtime_us),
        ]

    @classmethod
    def parse(cls, row: dict[str, str]) -> "ExperimentRecord":
        sweep = row["sweep"]
        return cls(
            algorithm=row["algorithm"],
            sweep=int(sweep) if sweep.lstrip("-").isdigit() else float(sweep),
            topology_seed=int(row["topology_seed"]),
            trial=int(row["trial"]),
            cost=float(row["cost"]) if row["cost"] else None,
            max_delay_s=float(row["max_delay_s"]) if row["max_delay_s"] else None,
            feasible=row["feasible"] == "1",
            runtime_us=int(row["runtime_us"]),
        )


def topology_seed(base_seed: int, index: int) -> int:
    return int(np.random.SeedSequence([base_seed, index]).generate_state(1, np.uint64)[0])


def sample_request(net: Network, m: int, delay_bound: float, seed: int, trial: int) -> MulticastRequest:
    if m + 1 > net.n:
        raise ValueError(f"group of {m} destinations plus source exceeds {net.n} nodes")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, trial])))
    picks = rng.choice(net.n, size=m + 1, replace=False)
    return MulticastRequest(int(picks[0]), frozenset(int(x) for x in picks[1:]), delay_bound)


def _timed(fn: Callable, *args):
    t0 = time.perf_counter_ns()
    out = fn(*args)
    return out, (time.perf_counter_ns() - t0) // 1000


def run_trial(net: Network, req: MulticastRequest, algorithms: Sequence[str]):
    """Yields ``(algorithm, cost, max_delay, runtime_us)``; cost is None if DCADH finds no tree."""
    for name in algorithms:
        if name == "DCADH":
            res, us = _timed(dcadh, net, req)
            if res.tree is None:
                yield name, None, None, us
            else:
                yield name, tree_cost(res.tree, net), max_delay(res.tree, req.destinations), us
        elif name == "ADH":
            tree, us = _timed(lambda: root_tree(net, adh_tree(net, req.terminals), req.source))
            yield name, tree_cost(tree, net), max_delay(tree, req.destinations), us
        elif name == "SPT":
            tree, us = _timed(lambda: spt_routed_tree(net, least_delay_tree(net, req)[0], req.destinations))
            yield name, tree_cost(tree, net), max_delay(tree, req.destinations), us


def _run_topology(spec: ExperimentSpec, value: float, index: int, deterministic: bool) -> list[ExperimentRecord]:
    n, m, bound = spec.point(value)
    seed = topology_seed(spec.base_seed, index)
    net = generate(WaxmanConfig(
        n=n, alpha=spec.alpha, beta=spec.beta, seed=seed,
        area_width_km=spec.area_width_km, area_height_km=spec.area_height_km,
    ))
    out = []
    for trial in range(spec.trials):
        req = sample_request(net, m, bound, seed, trial)
        feasible = least_delay_tree(net, req)[1]
        for name, cost, delay, us in run_trial(net, req, spec.algorithms):
            out.append(ExperimentRecord(
                name, value, seed, trial, cost, delay, feasible, 0 if deterministic else int(us),
            ))
    return out


def run_experiment(spec: ExperimentSpec, *, jobs: int = 1, deterministic: bool = False) -> list[ExperimentRecord]:
    """All records in (sweep value, topology, trial, algorithm) order.

    With ``deterministic`` the runtime column is zeroed so output depends
    only on the spec.
    """
    tasks = [(v, i) for v in spec.values for i in range(spec.topologies)]
    if jobs <= 1:
        chunks = [_run_topology(spec, v, i, deterministic) for v, i in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_run_topology, spec, v, i, deterministic) for v, i in tasks]
            chunks = [f.result() for f in futures]
    records = [r for chunk in chunks for r in chunk]
    log.info("%s sweep: %d records", spec.sweep, len(records))
    return records


@dataclass
class Aggregate:
    algorithm: str
    sweep: float
    records: int
    feasible: int
    mean_cost: float | None
    mean_max_delay_s: float | None
    mean_runtime_us: float | None

    @property
    def feasibility_rate(self) -> float:
        return self.feasible / self.records if self.records else 0.0

    @property
    def flag(self) -> str:
        return "" if self.feasible else "no_feasible_trials"

    def row(self) -> list[str]:
        def fmt(x):
            return "" if x is None else repr(x)

        return [
            self.algorithm, repr(self.sweep), str(self.records), str(self.feasible),
            repr(self.feasibility_rate), fmt(self.mean_cost), fmt(self.mean_max_delay_s),
            fmt(self.mean_runtime_us), self.flag,
        ]


def aggregate(records: Iterable[ExperimentRecord]) -> list[Aggregate]:
    groups: dict[tuple[str, float], list[ExperimentRecord]] = {}
    for r in records:
        groups.setdefault((r.algorithm, r.sweep), []).append(r)
    out = []
    for (alg, sweep), rs in groups.items():
        ok = [r for r in rs if r.feasible]
        mean = (lambda xs: math.fsum(xs) / len(xs)) if ok else (lambda xs: None)
        out.append(Aggregate(
            alg, sweep, len(rs), len(ok),
            mean([r.cost for r in ok]),
            mean([r.max_delay_s for r in ok]),
            mean([float(r.runtime_us) for r in ok]),
        ))
    order = {a: i for i, a in enumerate(ALGORITHMS)}
    out.sort(key=lambda a: (order.get(a.algorithm, len(order)), a.sweep))
    return out


def write_raw(records: Iterable[ExperimentRecord], path: Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RAW_COLUMNS)
        for r in records:
            w.writerow(r.row())


def read_raw(path: Path) -> list[ExperimentRecord]:
    with open(path, newline="") as fh:
        return [ExperimentRecord.parse(row) for row in csv.DictReader(fh)]


def write_summary(aggs: Iterable[Aggregate], path: Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_COLUMNS)
        for a in aggs:
            w.writerow(a.row())


SWEEP_LABELS = {
    "network_size": "network nodes",
    "group_size": "destination nodes",
    "delay_bound": "delay bound (s)",
}


def gnuplot_script(aggs: Sequence[Aggregate], sweep: str) -> str:
    algs = list(dict.fromkeys(a.algorithm for a in aggs))
    lines = [
        "# cost vs sweep variable, one curve per algorithm; run: gnuplot plot.gp",
        "set datafile separator ','",
        "set terminal pngcairo size 800,560",
        "set output 'cost.gnuplot.png'",
        f"set xlabel '{SWEEP_LABELS.get(sweep, sweep)}'",
        "set ylabel 'mean tree cost'",
        "set key top left",
    ]
    curves = [
        f"'summary.csv' every ::1 using 2:(strcol(1) eq '{alg}' ? $6 : 1/0) "
        f"with linespoints title '{alg}'"
        for alg in algs
    ]
    lines.append("plot " + ", \\\n     ".join(curves) if curves else "# no data")
    return "\n".join(lines) + "\n"


@dataclass
class EmitResult:
    raw: Path
    summary: Path
    script: Path
    figures: list[Path] = field(default_factory=list)


def emit(
    records: Sequence[ExperimentRecord],
    aggs: Sequence[Aggregate],
    out_dir: str | Path,
    sweep: str = "delay_bound",
    figures: bool = True,
) -> EmitResult:
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        res = EmitResult(out / "raw.csv", out / "summary.csv", out / "plot.gp")
        write_raw(records, res.raw)
        write_summary(aggs, res.summary)
        res.script.write_text(gnuplot_script(aggs, sweep))
    except OSError as exc:
        raise OSError(f"cannot write experiment output under {out}: {exc}") from exc
    if figures and any(a.mean_cost is not None for a in aggs):
        from .plotting import plot_summary

        res.figures = plot_summary(aggs, out, SWEEP_LABELS.get(sweep, sweep))
    return res
