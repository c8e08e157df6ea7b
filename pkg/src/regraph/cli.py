"""Command-line experiment runner.

Usage: ``regraph <kind> --config FILE [--seed N] [--workers N] [--out DIR]``.

Configs are plain-text ``key = value`` files, one experiment per file; the
environment variable ``REGRAPH_SEED`` overrides any configured seed.  Report
bodies are a pure function of (config, seed): worker count only changes
scheduling, because every random stream is keyed by (seed, replica index)
and results are merged by replica index.

Exit codes: 0 ok, 2 config error, 3 resource cap exceeded, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import metadata
from pathlib import Path
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from . import gffcheck, growth, limitproc, poissonlab, spectra, walks, words
from .errors import InvalidInputError, NumericError, ResourceLimitError
from .graphs import sample_permutation_model, sample_uniform_model

KINDS = (
    "sample",
    "cycles",
    "spectrum",
    "poisson-test",
    "grow",
    "limit-sim",
    "gff-check",
)

_LIMIT_CHUNK = 1024  # replicas per RNG stream; fixed so workers never matter


def _version() -> str:
    try:
        return "v" + metadata.version("regraph")
    except metadata.PackageNotFoundError:  # pragma: no cover
        return "v0.0.0"


# ---------------------------------------------------------------------------
# configuration


@dataclass
class ExperimentConfig:
    kind: str
    params: dict[str, Any]
    seed: int = 0
    workers: int = 1
    out: Path = field(default_factory=Path.cwd)


def _parse_value(text: str) -> Any:
    text = text.strip()
    if "," in text:
        return [_parse_value(part) for part in text.split(",") if part.strip()]
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    return text


def parse_config_file(path: Path) -> dict[str, Any]:
    """Read a ``key = value`` file; ``#`` starts a comment."""
    params: dict[str, Any] = {}
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise InvalidInputError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidInputError(f"parse error at {path}:{lineno}: expected key = value")
        key, _, value = line.partition("=")
        key = key.strip()
        if not key:
            raise InvalidInputError(f"parse error at {path}:{lineno}: empty key")
        params[key] = _parse_value(value)
    return params


def _as_list(value: Any) -> list:
    return list(value) if isinstance(value, list) else [value]


_REQUIRED: dict[str, tuple[str, ...]] = {
    "sample": ("model", "n", "d"),
    "cycles": ("model", "n", "d", "r"),
    "spectrum": ("model", "n", "d"),
    "poisson-test": ("model", "d", "r", "n_values", "samples"),
    "grow": ("d", "s", "T", "grid", "r"),
    "limit-sim": ("d", "K", "T", "grid"),
    "gff-check": ("jmax", "kmax", "lags"),
}


def validate(config: ExperimentConfig) -> list[str]:
    """Return a list of precondition violations; empty iff run would start."""
    violations: list[str] = []
    kind, p = config.kind, config.params
    if kind not in KINDS:
        return [f"unknown experiment kind {kind!r}; expected one of {', '.join(KINDS)}"]
    for name in _REQUIRED[kind]:
        if name not in p:
            violations.append(f"missing required field {name!r} for kind {kind}")
    if violations:
        return violations

    def check(cond: bool, message: str) -> None:
        if not cond:
            violations.append(message)

    if "model" in p:
        check(p["model"] in ("permutation", "uniform"),
              "model must be 'permutation' or 'uniform'")
    if "d" in p:
        check(isinstance(p["d"], int) and p["d"] >= 1, "d must be an integer >= 1")
    if "n" in p:
        check(isinstance(p["n"], int) and p["n"] >= 1, "n must be an integer >= 1")
    if "r" in p:
        check(isinstance(p["r"], int) and p["r"] >= 1, "r must be an integer >= 1")
    if "K" in p:
        check(isinstance(p["K"], int) and p["K"] >= 1, "K must be an integer >= 1")
    if kind in ("sample", "cycles", "spectrum") and not violations:
        if p["model"] == "uniform":
            check(p["n"] * (2 * p["d"]) % 2 == 0 and p["n"] > 2 * p["d"],
                  "uniform model needs n > 2d (degree 2d simple graph on n vertices)")
    if kind == "poisson-test" and not violations:
        ns = _as_list(p["n_values"])
        check(all(isinstance(n, int) and n >= 1 for n in ns),
              "n_values must be positive integers")
        check(isinstance(p["samples"], int) and p["samples"] >= 1,
              "samples must be a positive integer")
    if kind in ("grow", "limit-sim") and not violations:
        grid = [float(t) for t in _as_list(p["grid"])]
        horizon = float(p["T"])
        check(horizon >= 0, "T must be >= 0")
        check(all(0 <= t <= horizon for t in grid),
              "grid times must lie in [0, T]")
        check(list(grid) == sorted(grid), "grid times must be nondecreasing")
        if kind == "grow":
            check(float(p["s"]) >= 0, "s (warm-up time) must be >= 0")
    if "replicas" in p:
        check(isinstance(p["replicas"], int) and p["replicas"] >= 1,
              "replicas must be a positive integer")
    if "count" in p:
        check(isinstance(p["count"], int) and p["count"] >= 1,
              "count must be a positive integer")
    if kind == "gff-check" and not violations:
        check(isinstance(p["jmax"], int) and p["jmax"] >= 1, "jmax must be >= 1")
        check(isinstance(p["kmax"], int) and p["kmax"] >= 1, "kmax must be >= 1")
        check(all(float(l) >= 0 for l in _as_list(p["lags"])), "lags must be >= 0")
    return violations


# ---------------------------------------------------------------------------
# deterministic worker pool


def _run_indexed(fn: Callable, jobs: Sequence[tuple], workers: int) -> list:
    """Map fn over argument tuples, merging results in job order."""
    if workers <= 1 or len(jobs) <= 1:
        return [fn(*job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, *zip(*jobs)))


def _sample_one(model: str, n: int, d: int, seed: int, idx: int) -> dict:
    rng = np.random.default_rng([seed, idx])
    if model == "permutation":
        g = sample_permutation_model(n, d, rng)
    else:
        g = sample_uniform_model(n, d, rng)
    return json.loads(g.to_json())


def _census_one(model: str, n: int, d: int, r: int, seed: int, idx: int) -> dict:
    rng = np.random.default_rng([seed, idx])
    if model == "permutation":
        g = sample_permutation_model(n, d, rng)
    else:
        g = sample_uniform_model(n, d, rng)
    census = walks.enumerate_cycles(g, r)
    body: dict[str, Any] = {
        "by_length": {str(k): census.by_length[k] for k in sorted(census.by_length)}
    }
    if census.by_word is not None:
        body["by_word"] = {
            str(wc): census.by_word[wc]
            for wc in sorted(census.by_word, key=lambda w: (w.length, w.letters))
        }
    return body


def _grow_one(d: int, s: float, horizon: float, grid: tuple, r: int,
              seed: int, idx: int) -> dict:
    rng = np.random.default_rng([seed, idx])
    traj = growth.simulate_growth(d, s, horizon, list(grid), r, rng, track_events=True)
    return {
        "classes": [str(wc) for wc in traj.classes],
        "counts": traj.counts.tolist(),
        "by_length": traj.by_length(r).tolist(),
        "n_vertices": traj.n_vertices.tolist(),
        "events": [
            {
                "time": float(ev.time),
                "kind": ev.kind,
                "word": None if ev.word is None else str(ev.word),
                "parent": None if ev.parent is None else str(ev.parent),
            }
            for ev in traj.events
        ],
    }


def _limit_chunk(d: int, K: int, horizon: float, grid: tuple, replicas: int,
                 seed: int, idx: int) -> list:
    rng = np.random.default_rng([seed, idx])
    counts, _model = limitproc.simulate_limit(
        d, K, horizon, list(grid), True, rng, replicas=replicas
    )
    return counts.tolist()


# ---------------------------------------------------------------------------
# experiment bodies (deterministic given config + seed)


def _body_sample(config: ExperimentConfig) -> tuple[dict, dict[str, list[dict]]]:
    p = config.params
    count = p.get("count", 1)
    jobs = [(p["model"], p["n"], p["d"], config.seed, i) for i in range(count)]
    graphs = _run_indexed(_sample_one, jobs, config.workers)
    return {"model": p["model"], "n": p["n"], "d": p["d"], "graphs": graphs}, {}


def _body_cycles(config: ExperimentConfig) -> tuple[dict, dict[str, list[dict]]]:
    p = config.params
    count = p.get("count", 1)
    jobs = [(p["model"], p["n"], p["d"], p["r"], config.seed, i) for i in range(count)]
    rows = _run_indexed(_census_one, jobs, config.workers)
    body = {"model": p["model"], "n": p["n"], "d": p["d"], "r": p["r"], "rows": rows}
    return body, {}


def _body_spectrum(config: ExperimentConfig) -> tuple[dict, dict[str, list[dict]]]:
    p = config.params
    scale = p.get("scale", "unit")
    rng = np.random.default_rng([config.seed, 0])
    if p["model"] == "permutation":
        g = sample_permutation_model(p["n"], p["d"], rng)
    else:
        g = sample_uniform_model(p["n"], p["d"], rng)
    spec = spectra.eigenvalues(g, scale=scale)
    body = {
        "model": p["model"],
        "n": p["n"],
        "d": p["d"],
        "scale": spec.scale,
        "eigenvalues": [float(v) for v in spec.values],
    }
    csv_rows = [{spec.scale: repr(float(v))} for v in spec.values]
    return body, {"spectrum.csv": csv_rows}


def _body_poisson_test(config: ExperimentConfig) -> tuple[dict, dict[str, list[dict]]]:
    p = config.params
    n_list = [int(n) for n in _as_list(p["n_values"])]
    rows = poissonlab.tv_convergence_experiment(
        p["model"], p["d"], p["r"], n_list, p["samples"], config.seed
    )
    body = {"model": p["model"], "d": p["d"], "r": p["r"], "rows": rows}
    csv_rows = [
        {k: repr(row[k]) if isinstance(row[k], float) else row[k] for k in row}
        for row in rows
    ]
    return body, {"rows.csv": csv_rows}


def _trajectory_rows(run_id: int, source: str, grid: Sequence[float],
                     classes: Sequence[str], lengths: Sequence[int],
                     counts: np.ndarray, r: int) -> list[dict]:
    rows = []
    counts = np.asarray(counts)
    for ti, t in enumerate(grid):
        for ci, name in enumerate(classes):
            rows.append({"run_id": run_id, "t": repr(float(t)), "key_type": "word",
                         "key": name, "count": int(counts[ti, ci]),
                         "source": source})
        by_len = np.zeros(r, dtype=np.int64)
        np.add.at(by_len, np.asarray(lengths) - 1, counts[ti])
        for k in range(1, r + 1):
            rows.append({"run_id": run_id, "t": repr(float(t)), "key_type": "length",
                         "key": str(k), "count": int(by_len[k - 1]),
                         "source": source})
    return rows


def _body_grow(config: ExperimentConfig) -> tuple[dict, dict[str, list[dict]]]:
    p = config.params
    replicas = p.get("replicas", 1)
    grid = tuple(float(t) for t in _as_list(p["grid"]))
    jobs = [(p["d"], float(p["s"]), float(p["T"]), grid, p["r"], config.seed, i)
            for i in range(replicas)]
    results = _run_indexed(_grow_one, jobs, config.workers)

    classes = results[0]["classes"]
    lengths = [len(words.parse_word(name)) for name in classes]
    traj_rows: list[dict] = []
    event_rows: list[dict] = []
    mean_by_length = np.zeros((len(grid), p["r"]))
    for run_id, res in enumerate(results):
        traj_rows.extend(_trajectory_rows(run_id, "growth", grid, classes,
                                          lengths, np.asarray(res["counts"]), p["r"]))
        mean_by_length += np.asarray(res["by_length"], dtype=float)
        for ev in res["events"]:
            event_rows.append({"run_id": run_id, "time": repr(ev["time"]),
                               "kind": ev["kind"], "word": ev["word"] or "",
                               "parent": ev["parent"] or ""})
    mean_by_length /= replicas
    body = {
        "d": p["d"], "s": float(p["s"]), "T": float(p["T"]), "r": p["r"],
        "grid": list(grid), "replicas": replicas, "classes": classes,
        "mean_counts_by_length": mean_by_length.tolist(),
    }
    return body, {"trajectory.csv": traj_rows, "events.csv": event_rows}


def _body_limit_sim(config: ExperimentConfig) -> tuple[dict, dict[str, list[dict]]]:
    p = config.params
    replicas = p.get("replicas", 1)
    grid = tuple(float(t) for t in _as_list(p["grid"]))
    model = limitproc.limit_model(p["d"], p["K"])
    chunks = [(i, min(_LIMIT_CHUNK, replicas - i * _LIMIT_CHUNK))
              for i in range(math.ceil(replicas / _LIMIT_CHUNK))]
    jobs = [(p["d"], p["K"], float(p["T"]), grid, size, config.seed, idx)
            for idx, size in chunks]
    pieces = _run_indexed(_limit_chunk, jobs, config.workers)
    counts = np.concatenate([np.asarray(piece, dtype=np.int64) for piece in pieces])

    classes = [str(wc) for wc in model.classes]
    lengths = model.lengths.tolist()
    traj_rows: list[dict] = []
    for run_id in range(replicas):
        traj_rows.extend(_trajectory_rows(run_id, "limit", grid, classes, lengths,
                                          counts[run_id], p["K"]))
    by_len = limitproc.counts_by_length(counts, model)
    body = {
        "d": p["d"], "K": p["K"], "T": float(p["T"]), "grid": list(grid),
        "replicas": replicas, "classes": classes,
        "mean_counts_by_length": by_len.mean(axis=0).tolist(),
    }
    return body, {"trajectory.csv": traj_rows}


def _body_gff_check(config: ExperimentConfig) -> tuple[dict, dict[str, list[dict]]]:
    p = config.params
    lags = [float(l) for l in _as_list(p["lags"])]
    pairs = []
    for j in range(1, p["jmax"] + 1):
        for k in range(1, p["kmax"] + 1):
            for lag in lags:
                numeric = gffcheck.gff_cheb_covariance(j, k, 0.0, lag)
                closed = gffcheck.gff_closed_form(j, k, 0.0, lag)
                pairs.append({"j": j, "k": k, "lag": lag, "numeric": numeric,
                              "closed_form": closed,
                              "abs_err": abs(numeric - closed)})
    csv_rows = [{key: repr(row[key]) if isinstance(row[key], float) else row[key]
                 for key in row} for row in pairs]
    return {"pairs": pairs}, {"pairs.csv": csv_rows}


_BODIES: dict[str, Callable[[ExperimentConfig], tuple[dict, dict]]] = {
    "sample": _body_sample,
    "cycles": _body_cycles,
    "spectrum": _body_spectrum,
    "poisson-test": _body_poisson_test,
    "grow": _body_grow,
    "limit-sim": _body_limit_sim,
    "gff-check": _body_gff_check,
}


# ---------------------------------------------------------------------------
# orchestration


def _write_csv(path: Path, rows: list[dict]) -> None:
    fieldnames = list(rows[0]) if rows else ["empty"]
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)


def run(config: ExperimentConfig) -> Path:
    """Execute one experiment; returns the path of the JSON report."""
    violations = validate(config)
    if violations:
        raise InvalidInputError("; ".join(violations))
    config.out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    start = time.monotonic()
    try:
        body, csv_files = _BODIES[config.kind](config)
        for name, rows in csv_files.items():
            path = config.out / name
            written.append(path)
            _write_csv(path, rows)
        report = {
            "kind": config.kind,
            "config": {k: config.params[k] for k in sorted(config.params)},
            "seed": config.seed,
            "version": _version(),
            "body": body,
            "wall_clock_s": time.monotonic() - start,
        }
        report_path = config.out / "report.json"
        written.append(report_path)
        report_path.write_text(json.dumps(report, sort_keys=True, indent=1) + "\n")
        return report_path
    except BaseException:
        for path in written:
            path.unlink(missing_ok=True)
        raise


def _build_config(argv: Sequence[str] | None) -> ExperimentConfig:
    parser = argparse.ArgumentParser(
        prog="regraph",
        description="Cycle-count and spectral experiments on random regular graphs.",
    )
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("--config", required=True, type=Path)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--workers", type=int, default=None)
    parser.add_argument("--out", type=Path, default=None)
    args = parser.parse_args(argv)

    params = parse_config_file(args.config)
    seed = params.pop("seed", 0)
    workers = params.pop("workers", 1)
    out = Path(params.pop("out", "."))
    if args.seed is not None:
        seed = args.seed
    if "REGRAPH_SEED" in os.environ:
        try:
            seed = int(os.environ["REGRAPH_SEED"])
        except ValueError as exc:
            raise InvalidInputError(
                f"REGRAPH_SEED must be an integer, got {os.environ['REGRAPH_SEED']!r}"
            ) from exc
    if args.workers is not None:
        workers = args.workers
    if args.out is not None:
        out = args.out
    if not isinstance(seed, int):
        raise InvalidInputError(f"seed must be an integer, got {seed!r}")
    if not isinstance(workers, int) or workers < 1:
        raise InvalidInputError(f"workers must be a positive integer, got {workers!r}")
    return ExperimentConfig(kind=args.kind, params=params, seed=seed,
                            workers=workers, out=out)


def main(argv: Sequence[str] | None = None) -> int:
    try:
        config = _build_config(argv)
        report_path = run(config)
    except InvalidInputError as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return 2
    except ResourceLimitError as exc:
        print(f"error: resource: {exc}", file=sys.stderr)
        return 3
    except NumericError as exc:
        print(f"error: numeric: {exc}", file=sys.stderr)
        return 4
    print(report_path)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
