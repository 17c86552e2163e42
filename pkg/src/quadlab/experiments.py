"""Pre-registered experiments with deterministic JSON/CSV reports.

Each replica draws from its own child of ``SeedSequence(cfg.seed)`` and
replica results are merged by index, so a report depends only on the
config (and not on the worker count).
"""

from __future__ import annotations

import csv
import json
import math
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy import signal, stats

from . import __version__
from .allocation import mean_nu, n_tail_probability, n_weights, p_float, sample_N, sample_conditioned, wilson
from .continuum import ball_mass, sample_plane
from .decomposition import decompose
from .metric import PointedSpace, subset_bound
from .planar_map import graph_diameter, submap
from .samplers import sample_conditioned_root_block, sample_uniform_quadrangulation

REPORT_SCHEMA = 1
EXPERIMENTS = ("condensation", "structure", "diameter", "limit")


@dataclass
class ExperimentConfig:
    name: str
    ns: list[int] = field(default_factory=lambda: [2**k for k in range(10, 14)])
    beta: float = 0.5
    rs: list[int] | None = None  # overrides beta; one r per n, or a list of r at ns[0]
    reps: int = 100
    seed: int = 0
    workers: int = 1
    thresholds: dict = field(default_factory=dict)

    def r_of(self, n: int) -> int:
        if self.rs is not None and len(self.rs) == len(self.ns):
            return int(self.rs[self.ns.index(n)])
        return max(4, round(n**self.beta))

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        return cls(**{k: v for k, v in d.items() if k in cls.__dataclass_fields__})

    @classmethod
    def from_json(cls, path, name: str | None = None) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as fh:
            d = json.load(fh)
        if name is not None:
            d["name"] = name
        return cls.from_dict(d)


def k_n(r: int) -> float:
    return (40 * r / 21) ** 0.25


def regime_flags(n: int, r: int, N_mean: float | None = None) -> dict:
    """Where ``(n, r)`` sits relative to the asymptotic hypotheses."""
    out = {
        "r_over_n": r / n,
        "r_exceeds_log_power": bool(r > math.log(n) ** 25),
        "log_power": math.log(n) ** 25,
    }
    if N_mean is not None:
        out["nu_N_over_m"] = float(mean_nu().hi) * N_mean / (n - r)
    return out


def _map_replicas(fn: Callable, args: list, workers: int) -> list:
    if workers <= 1:
        return [fn(a) for a in args]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, args, chunksize=max(1, len(args) // (4 * workers))))


def _seeds(seed: int, count: int, salt: int = 0) -> list[np.random.SeedSequence]:
    return np.random.SeedSequence([seed, salt]).spawn(count)


def _trend(values: list[float]) -> dict:
    d = np.diff(values)
    return {"strictly_increasing": bool((d > 0).all()), "nondecreasing": bool((d >= 0).all()), "strictly_decreasing": bool((d < 0).all()), "nonincreasing": bool((d <= 0).all())}


def _freq(k: int, n: int) -> dict:
    lo, hi = wilson(k, n)
    return {"count": int(k), "freq": k / n, "ci": [lo, hi]}


# ---------------------------------------------------------------------------
# condensation
# ---------------------------------------------------------------------------


def condensation_exact(n: int, r: int) -> dict:
    """Exact surrogate frequencies of the two condensation events.

    Under the allocation law ``P(Y_(1) <= t) = P(S^t_N = m) / P(S_N = m)``
    and ``P(Y_(2) <= t)`` adds ``N sum_{y > t} p(y) P(S^t_{N-1} = m - y)``
    to the numerator; both are mixed over the exact law of ``N``.
    Float convolutions, accurate to ~1e-9.
    """
    m = n - r
    t1 = m / math.log(n) ** 2
    t2 = r ** (5 / 6)
    w = n_weights(n, r)
    probs = w.probabilities()
    Nmax = int(np.flatnonzero(probs > 1e-16).max()) + 1
    p = np.zeros(m + 1)
    p[1:] = p_float(m)
    full = np.zeros(m + 1)
    full[0] = 1.0
    k1, k2 = int(math.floor(t1)), int(math.floor(t2))
    p1 = p.copy()
    p1[k1 + 1 :] = 0
    p2 = p.copy()
    p2[k2 + 1 :] = 0
    big2 = p.copy()
    big2[: k2 + 1] = 0
    T1 = full.copy()
    T2 = full.copy()
    f1 = f2 = 0.0
    for N in range(1, Nmax + 1):
        one_big = N * float(np.dot(big2[1:][::-1], T2[: m]))  # sum_y big2[y] T2[m - y]
        full = np.clip(signal.fftconvolve(full, p)[: m + 1], 0, None)
        T1 = np.convolve(T1, p1[: k1 + 1])[: m + 1]
        T2 = np.convolve(T2, p2[: k2 + 1])[: m + 1]
        denom = full[m]
        if denom <= 0:
            continue
        pr = probs[N - 1]
        f1 += pr * (1 - min(T1[m] / denom, 1.0))
        f2 += pr * min((T2[m] + one_big) / denom, 1.0)
    return {"n": n, "r": r, "largest_exceeds": f1, "second_within": f2, "t1": t1, "t2": t2}


def _condensation_replica(args) -> dict:
    n, r, ss = args
    q = sample_conditioned_root_block(n, r, np.random.default_rng(ss))
    d = decompose(q)
    ys = sorted(d.Y, reverse=True)
    return {"N": d.N, "y1": ys[0] if ys else 0, "y2": ys[1] if len(ys) > 1 else 0}


def run_condensation(cfg: ExperimentConfig) -> dict:
    rows = []
    for i, n in enumerate(cfg.ns):
        r = cfg.r_of(n)
        m = n - r
        t1 = m / math.log(n) ** 2
        t2 = r ** (5 / 6)
        reps = _map_replicas(_condensation_replica, [(n, r, s) for s in _seeds(cfg.seed, cfg.reps, i)], cfg.workers)
        k1 = sum(x["y1"] > t1 for x in reps)
        k2 = sum(x["y2"] <= t2 for x in reps)
        # allocation-only surrogate at matched (m, N)
        rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, i, 1]))
        Ns = sample_N(n, r, rng, size=cfg.reps)
        s1 = s2 = 0
        for N, c in sorted(Counter(Ns.tolist()).items()):
            ys = -np.sort(-sample_conditioned(m, int(N), seed=rng, reps=c), axis=1)
            s1 += int((ys[:, 0] > t1).sum())
            s2 += int((ys[:, 1] <= t2).sum()) if N > 1 else c
        row = {
            "n": n,
            "r": r,
            "m": m,
            "t1": t1,
            "t2": t2,
            "largest_exceeds": _freq(k1, cfg.reps),
            "second_within": _freq(k2, cfg.reps),
            "surrogate_largest_exceeds": _freq(s1, cfg.reps),
            "surrogate_second_within": _freq(s2, cfg.reps),
            "mean_N": float(np.mean([x["N"] for x in reps])),
            "regime": regime_flags(n, r, float(np.mean([x["N"] for x in reps]))),
        }
        if cfg.thresholds.get("exact", True):
            ex = condensation_exact(n, r)
            row["exact_largest_exceeds"] = ex["largest_exceeds"]
            row["exact_second_within"] = ex["second_within"]
        rows.append(row)
    f1 = [row["largest_exceeds"]["freq"] for row in rows]
    f2 = [row["second_within"]["freq"] for row in rows]
    top = cfg.thresholds.get("top", 0.9)
    return {
        "rows": rows,
        "largest_trend": _trend(f1),
        "second_trend": _trend(f2),
        "exact_second_trend": _trend([row["exact_second_within"] for row in rows]) if "exact_second_within" in rows[0] else None,
        "top_largest_ok": bool(f1[-1] > top),
        "top_second_ok": bool(f2[-1] > top),
    }


# ---------------------------------------------------------------------------
# structure bounds
# ---------------------------------------------------------------------------


def _structure_replica(args) -> dict:
    n, r, ss = args
    q = sample_conditioned_root_block(n, r, np.random.default_rng(ss))
    d = decompose(q)
    R = d.root_block
    deg = np.bincount(R.org, minlength=R.n_vertices)
    return {"N": d.N, "max_ell": max(d.ell) if d.ell else 0, "max_deg": int(deg.max())}


def _geometric_rate(values: list[int]) -> dict:
    """Log-linear fit of ``P(X = x)`` beyond the mode."""
    c = Counter(values)
    xs = np.array(sorted(c))
    ps = np.array([c[x] for x in xs], float) / len(values)
    mode = xs[np.argmax(ps)]
    sel = xs >= mode
    if sel.sum() < 3:
        return {"rate": float("nan"), "points": int(sel.sum()), "histogram": {int(x): int(c[x]) for x in xs}}
    fit = stats.linregress(xs[sel], np.log(ps[sel]))
    return {"rate": float(math.exp(fit.slope)), "points": int(sel.sum()), "histogram": {int(x): int(c[x]) for x in xs}}


def run_structure_bounds(cfg: ExperimentConfig) -> dict:
    """N-tail in ``r`` at fixed ``n``, split maxima and root-block degrees."""
    n = cfg.ns[0]
    rs = cfg.rs or [cfg.r_of(n)]
    rows = []
    for i, r in enumerate(rs):
        reps = _map_replicas(_structure_replica, [(n, r, s) for s in _seeds(cfg.seed, cfg.reps, i)], cfg.workers)
        exact = n_tail_probability(n, r, 3 * r)
        k3 = sum(x["N"] >= 3 * r for x in reps)
        kl = sum(x["max_ell"] > 5 * math.log(r) for x in reps)
        rows.append(
            {
                "n": n,
                "r": r,
                "p_N_ge_3r_exact": float(exact),
                "log_p_N_ge_3r_exact": float(math.log(exact)) if exact > 0 else float("-inf"),
                "N_ge_3r": _freq(k3, cfg.reps),
                "max_ell_exceeds": _freq(kl, cfg.reps),
                "max_ell_exceeds_times_r": kl / cfg.reps * r,
                "degree": _geometric_rate([x["max_deg"] for x in reps]),
                "regime": regime_flags(n, r),
            }
        )
    logs = [row["log_p_N_ge_3r_exact"] for row in rows]
    slopes = [(b - a) / (rows[k + 1]["r"] - rows[k]["r"]) for k, (a, b) in enumerate(zip(logs, logs[1:])) if math.isfinite(a) and math.isfinite(b)]
    return {
        "rows": rows,
        "log_tail_slopes": slopes,
        "reference_slope": math.log(4 / 9),
        "tail_decreasing": _trend(logs)["strictly_decreasing"],
    }


# ---------------------------------------------------------------------------
# diameters
# ---------------------------------------------------------------------------


def _diameter_replica(args) -> int:
    n, ss = args
    return graph_diameter(sample_uniform_quadrangulation(n, np.random.default_rng(ss)))


def _pendant_replica(args) -> float:
    n, r, ss = args
    d = decompose(sample_conditioned_root_block(n, r, np.random.default_rng(ss)))
    ds = [p.diameter for p in d.pendants if p.index != d.largest_index]
    return max(ds, default=0)


def run_diameter_scaling(cfg: ExperimentConfig) -> dict:
    rows = []
    for i, n in enumerate(cfg.ns):
        ds = np.array(_map_replicas(_diameter_replica, [(n, s) for s in _seeds(cfg.seed, cfg.reps, i)], cfg.workers))
        rows.append({"n": n, "median": float(np.median(ds)), "mean": float(ds.mean()), "diameters": ds.tolist()})
    x = np.log([row["n"] for row in rows])
    y = np.log([row["median"] for row in rows])
    fit = stats.linregress(x, y)
    scaled = np.concatenate([np.array(row["diameters"]) / row["n"] ** 0.25 for row in rows])
    qs = np.quantile(scaled, [0.5, 0.75, 0.9, 0.95, 0.99])
    surv = [float((scaled > q).mean()) for q in qs]
    tail_fit = stats.linregress(qs, np.log(surv))
    pend = []
    if cfg.thresholds.get("pendants", True):
        pn = cfg.thresholds.get("pendant_ns", cfg.ns[: min(4, len(cfg.ns))])
        for j, n in enumerate(pn):
            r = cfg.r_of(n)
            vals = _map_replicas(_pendant_replica, [(n, r, s) for s in _seeds(cfg.seed, max(cfg.reps // 4, 10), 100 + j)], cfg.workers)
            pend.append({"n": n, "r": r, "mean_max_other_diameter_over_r_quarter": float(np.mean(vals)) / r**0.25})
    lo, hi = cfg.thresholds.get("slope_window", [0.2, 0.3])
    return {
        "rows": [{k: v for k, v in row.items() if k != "diameters"} for row in rows],
        "slope": float(fit.slope),
        "slope_stderr": float(fit.stderr),
        "slope_ok": bool(lo <= fit.slope <= hi),
        "tail_quantiles": qs.tolist(),
        "tail_survival": surv,
        "tail_log_slope": float(tail_fit.slope),
        "pendants": pend,
        "pendant_trend": _trend([p["mean_max_other_diameter_over_r_quarter"] for p in pend]) if pend else None,
    }


# ---------------------------------------------------------------------------
# limit setup
# ---------------------------------------------------------------------------


def _components_minus(m, vertices: np.ndarray, removed: set[int]):
    """Connected components of the vertex set minus ``removed`` (as vertex arrays)."""
    keep = np.array([v for v in vertices.tolist() if v not in removed], np.int64)
    if keep.size == 0:
        return []
    idx = {v: i for i, v in enumerate(keep.tolist())}
    parent = list(range(keep.size))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    a, b = m.org[0::2], m.org[1::2]
    for u, v in zip(a.tolist(), b.tolist()):
        if u in idx and v in idx:
            ru, rv = find(idx[u]), find(idx[v])
            if ru != rv:
                parent[ru] = rv
    groups: dict[int, list[int]] = {}
    for v, i in idx.items():
        groups.setdefault(find(i), []).append(v)
    return [np.array(g, np.int64) for g in groups.values()]


def _induced_diameter(m, verts: np.ndarray) -> int:
    keep = np.zeros(m.n_edges, bool)
    inside = np.zeros(m.n_vertices, bool)
    inside[verts] = True
    keep[:] = inside[m.org[0::2]] & inside[m.org[1::2]]
    if not keep.any():
        return 0
    h = int(np.flatnonzero(np.repeat(keep, 2))[0])
    sub, _, _ = submap(m, keep, h)
    return graph_diameter(sub)


def limit_replica(n: int, r: int, seed, radii=(0.5, 1.0)) -> dict:
    """One sample of the limit-setup statistics for ``Q_n`` in ``Q_{n,r}``."""
    q = sample_conditioned_root_block(n, r, np.random.default_rng(seed))
    d = decompose(q)
    k = k_n(r)
    block = set(d.block_vertices.tolist())
    plus = d.r_plus_vertices
    # components of R+ minus the root block and their intrinsic diameters
    comps = _components_minus(q, plus, block)
    diam_max = max((_induced_diameter(q, c) for c in comps), default=-1)
    bound = (diam_max + 1) / k if comps else 0.0
    # Hausdorff distance between R and R+ (graph distance in Q, scaled)
    hd = _multi_source(q, d.block_vertices)[plus].max() / k
    # L-hat root-ball masses
    L = d.largest()
    masses = {}
    if L is not None:
        dl = q.distances_from(d.rho)
        lverts = np.flatnonzero(d.pendant_label == d.largest_index)
        lverts = np.union1d(lverts, [d.rho])
        for rad in radii:
            masses[str(rad)] = float((dl[lverts] / k <= rad).sum() * 8 / (9 * k**4))
    return {"bound": bound, "hausdorff": float(hd), "n_components": len(comps), "ball_mass": masses, "size_L": int(L.size) + 1 if L else 0}


def _multi_source(m, sources: np.ndarray) -> np.ndarray:
    best = None
    for v in np.asarray(sources).tolist():
        d = m.distances_from(v)
        best = d if best is None else np.minimum(best, d)
    return best


def _limit_replica(args) -> dict:
    n, r, ss, radii = args
    return limit_replica(n, r, ss, radii)


def _plane_replica(args) -> dict:
    grid, window, ss, radii = args
    s = sample_plane(grid, window, np.random.default_rng(ss)).space()
    return {str(rad): ball_mass(s, rad) for rad in radii}


def fact_chain_check(n: int, r: int, seed) -> dict:
    """Subset bound on ``R+`` with ``R`` as the subset, both with mass ``mu_R / r``."""
    q = sample_conditioned_root_block(n, r, np.random.default_rng(seed))
    d = decompose(q)
    k = k_n(r)
    plus = d.r_plus_vertices
    D = np.empty((plus.size, plus.size))
    for i, v in enumerate(plus.tolist()):
        D[i] = q.distances_from(v)[plus] / k
    inblock = np.isin(plus, d.block_vertices)
    mass = np.where(inblock, 1.0 / r, 0.0)
    root = int(np.flatnonzero(plus == d.rho)[0]) if d.rho is not None else int(np.flatnonzero(inblock)[0])
    V = PointedSpace(plus.tolist(), D, root, mass, check=False)
    val, _ = subset_bound(V, np.flatnonzero(inblock).tolist())
    rep = limit_replica(n, r, seed)
    return {"fact_bound": float(val), "diameter_bound": rep["bound"], "dominated": bool(val <= rep["bound"] + 1e-12)}


def run_limit_setup(cfg: ExperimentConfig) -> dict:
    radii = tuple(cfg.thresholds.get("radii", (0.5, 1.0)))
    grid = int(cfg.thresholds.get("plane_grid", 150))
    window = float(cfg.thresholds.get("window", 1.0))
    plane_reps = int(cfg.thresholds.get("plane_reps", cfg.reps))
    rows = []
    for i, n in enumerate(cfg.ns):
        r = cfg.r_of(n)
        reps = _map_replicas(_limit_replica, [(n, r, s, radii) for s in _seeds(cfg.seed, cfg.reps, i)], cfg.workers)
        b = np.array([x["bound"] for x in reps])
        hd = np.array([x["hausdorff"] for x in reps])
        rows.append(
            {
                "n": n,
                "r": r,
                "k_n": k_n(r),
                "mean_bound": float(b.mean()),
                "bound_sem": float(b.std(ddof=1) / math.sqrt(b.size)) if b.size > 1 else 0.0,
                "mean_hausdorff": float(hd.mean()),
                "hausdorff_within_bound": bool((hd <= b + 1e-12).all()),
                "ball_mass": {str(rad): [x["ball_mass"].get(str(rad), 0.0) for x in reps] for rad in radii},
                "regime": regime_flags(n, r),
            }
        )
    planes = _map_replicas(_plane_replica, [(grid, window, s, radii) for s in _seeds(cfg.seed, plane_reps, 999)], cfg.workers)
    top = rows[-1]
    tests = {}
    for rad in radii:
        a = top["ball_mass"][str(rad)]
        p = [x[str(rad)] for x in planes]
        ks = stats.ks_2samp(a, p)
        tests[str(rad)] = {"ks_statistic": float(ks.statistic), "pvalue": float(ks.pvalue), "map_mean": float(np.mean(a)), "plane_mean": float(np.mean(p))}
    floor = cfg.thresholds.get("reject_floor", 1e-3)
    for row in rows:
        row["ball_mass_mean"] = {k: float(np.mean(v)) for k, v in row["ball_mass"].items()}
        del row["ball_mass"]
    return {
        "rows": rows,
        "bound_trend": _trend([row["mean_bound"] for row in rows]),
        "profile_tests": tests,
        "profile_ok": bool(all(t["pvalue"] > floor for t in tests.values())),
        "plane": {"grid": grid, "window": window, "reps": plane_reps},
    }


# ---------------------------------------------------------------------------
# dispatch and emission
# ---------------------------------------------------------------------------


RUNNERS = {
    "condensation": run_condensation,
    "structure": run_structure_bounds,
    "diameter": run_diameter_scaling,
    "limit": run_limit_setup,
}


def run(cfg: ExperimentConfig) -> dict:
    if cfg.name not in RUNNERS:
        raise ValueError(f"unknown experiment {cfg.name!r}; choose from {sorted(RUNNERS)}")
    body = RUNNERS[cfg.name](cfg)
    cfg_d = asdict(cfg)
    cfg_d.pop("workers")
    return {"schema": REPORT_SCHEMA, "version": __version__, "experiment": cfg.name, "config": cfg_d, "report": body}


def _clean(x):
    if isinstance(x, float):
        return x if math.isfinite(x) else str(x)
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return _clean(float(x))
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def dumps(report: dict) -> str:
    return json.dumps(_clean(report), sort_keys=True, indent=2)


def write_report(report: dict, out: str | os.PathLike, csv_dir: str | os.PathLike | None = None):
    Path(out).write_text(dumps(report) + "\n", encoding="utf-8")
    if csv_dir is not None:
        write_csv(report, csv_dir)


def write_csv(report: dict, csv_dir) -> Path:
    """Flatten ``report["rows"]`` to ``<experiment>.csv`` (nested keys joined by ``.``)."""
    d = Path(csv_dir)
    d.mkdir(parents=True, exist_ok=True)
    rows = [_flatten(r) for r in report["report"].get("rows", [])]
    path = d / f"{report['experiment']}.csv"
    cols = sorted({k for r in rows for k in r})
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=cols)
        w.writeheader()
        for r in rows:
            w.writerow(r)
    return path


def _flatten(d: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict) and not (key.endswith("histogram")):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, (list, dict)):
            out[key] = json.dumps(_clean(v), sort_keys=True)
        else:
            out[key] = _clean(v)
    return out
