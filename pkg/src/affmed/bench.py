"""Seeded, parallel, byte-reproducible benchmark harness.

An :class:`ExperimentConfig` is a grid (families x d x n x delta x eta x
contamination) times a list of estimators times a number of trials. Each
(grid point, trial) pair draws one sample, corrupts it, and runs every
estimator on the same data. Seeds come from :func:`split`, a splitmix64 chain
over ``(base_seed, grid_index, trial_index)``, so results do not depend on
scheduling or worker count.

Family templates may use ``"auto"`` parameters that are resolved per grid
point: ``gamma = 1/(10 d)`` for ``intuition_gamma``, the lower-bound ``eps``
for ``heavytailed_lb`` and the grid ``eta`` for ``quant_lb``. ``index`` may be
``"random"`` (drawn from the trial seed). With ``score = "worst_member"`` an
estimate is scored against every member of the family (except member 0 for
the breakdown family) and the largest error is reported.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import itertools
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import SingularCovariance
from .estimators import ESTIMATORS, EstimatorConfig, estimate
from .geometry import mahalanobis_norm
from .instances import (ContaminationSpec, DistributionSpec, breakdown_family, contaminate,
                        heavytailed_eps, moments, quant_family, sample)
from .median import MedianConfig
from .metrics import directional_certificate, optimal_direction, sweep_directions

MASK64 = (1 << 64) - 1

RECORD_FIELDS = (
    "family", "d", "n", "eta", "delta", "estimator", "trial", "seed",
    "error_mahalanobis", "error_euclidean", "cert_lower_bound", "outlyingness",
    "k_buckets", "undefined_flag", "runtime_ms", "failure",
)


def splitmix64(x: int) -> int:
    """One step of the splitmix64 mixer on a 64-bit integer."""
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def split(base: int, *keys: int) -> int:
    """Derive an independent 64-bit seed from ``base`` and integer keys."""
    s = splitmix64(int(base) & MASK64)
    for k in keys:
        s = splitmix64(s ^ (int(k) & MASK64))
    return s


# ---------------------------------------------------------------------------
# configuration


@dataclass
class FamilyTemplate:
    kind: str
    params: dict = field(default_factory=dict)
    name: str | None = None
    score: str = "member"  # or "worst_member"

    @property
    def label(self) -> str:
        return self.name or self.kind

    @classmethod
    def from_dict(cls, obj: dict) -> "FamilyTemplate":
        return cls(obj["kind"], dict(obj.get("params", {})), obj.get("name"), obj.get("score", "member"))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": self.params, "name": self.name, "score": self.score}


@dataclass
class ExperimentConfig:
    families: list
    d: list
    n: list
    delta: list = field(default_factory=lambda: [0.05])
    eta: list = field(default_factory=lambda: [0.0])
    contamination: list = field(default_factory=lambda: [{"mode": "none"}])
    estimators: list = field(default_factory=lambda: [{"kind": "ours"}])
    trials: int = 1
    base_seed: int = 0
    output: dict = field(default_factory=lambda: {"path": None, "format": "csv"})
    timing: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not (self.families and self.d and self.n and self.delta and self.eta
                and self.contamination and self.estimators):
            raise ValueError("every grid axis must be nonempty")
        self.families = [f if isinstance(f, FamilyTemplate) else FamilyTemplate.from_dict(f)
                         for f in self.families]
        for e in self.estimators:
            if e.get("kind") not in ESTIMATORS:
                raise ValueError(f"unknown estimator {e.get('kind')!r}")
        fmt = self.output.get("format", "csv")
        if fmt not in ("csv", "json"):
            raise ValueError(f"unknown output format {fmt!r}")

    @classmethod
    def from_dict(cls, obj: dict) -> "ExperimentConfig":
        grid = obj.get("grid", {})
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(obj) - known - {"grid"}
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        kw = {k: obj[k] for k in known if k in obj}
        for axis in ("d", "n", "delta", "eta"):
            if axis in grid:
                kw[axis] = grid[axis]
        return cls(**kw)

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["families"] = [f.to_dict() for f in self.families]
        return out

    def grid(self):
        """Grid points in a fixed order; the position is the grid index."""
        return list(itertools.product(self.families, self.d, self.n, self.delta, self.eta,
                                      self.contamination))


@dataclass
class TrialRecord:
    family: str
    d: int
    n: int
    eta: float
    delta: float
    estimator: str
    trial: int
    seed: int
    error_mahalanobis: float | None = None
    error_euclidean: float | None = None
    cert_lower_bound: float | None = None
    outlyingness: float | None = None
    k_buckets: int | None = None
    undefined_flag: bool = False
    runtime_ms: float | None = None
    failure: str = ""

    def key(self):
        return (self.family, self.d, self.n, self.eta, self.delta, self.estimator, self.trial)


# ---------------------------------------------------------------------------
# resolution


def _resolve_point(p, d: int):
    if isinstance(p, str):
        if p == "origin":
            return np.zeros(d)
        if p.startswith("e") and p[1:].isdigit() and 1 <= int(p[1:]) <= d:
            return np.eye(d)[int(p[1:]) - 1]
        raise ValueError(f"cannot interpret replacement point {p!r}")
    return np.asarray(p, dtype=np.float64)


def resolve_family(tpl: FamilyTemplate, d: int, n: int, delta: float, eta: float, seed: int):
    """Sampling law and scoring laws for one grid point."""
    params = dict(tpl.params)
    kind = tpl.kind
    if kind == "intuition_gamma" and params.get("gamma", 0.0) == "auto":
        params["gamma"] = 1.0 / (10.0 * d)
    if kind == "heavytailed_lb" and params.get("eps", "auto") == "auto":
        params["eps"] = heavytailed_eps(n, d, delta)
    if kind == "quant_lb" and params.get("eta", "auto") == "auto":
        params["eta"] = eta
    if kind == "breakdown_lb":
        params.setdefault("r", 1.0)
    if params.get("index") == "random":
        params["index"] = 1 + int(split(seed, 7) % d)
    if kind == "gaussian":
        params.setdefault("mean", [0.0] * d)
        params.setdefault("cov", np.eye(d).tolist())
    spec = DistributionSpec(kind, d, params)
    if tpl.score == "member":
        return spec, [spec]
    if tpl.score != "worst_member":
        raise ValueError(f"unknown scoring rule {tpl.score!r}")
    if kind == "breakdown_lb":
        fam = breakdown_family(d, float(params["r"]))[1:]
    elif kind == "quant_lb":
        fam = quant_family(d, float(params["eta"]))
    else:
        raise ValueError("worst_member scoring is only defined for breakdown_lb and quant_lb")
    return spec, fam


def resolve_contamination(obj: dict, d: int, eta: float) -> ContaminationSpec:
    obj = dict(obj)
    payload = dict(obj.get("payload", {}))
    for k in ("strategy", "point", "scale", "distribution"):
        if k in obj:
            payload[k] = obj.pop(k)
    if "point" in payload:
        payload["point"] = _resolve_point(payload["point"], d)
    if isinstance(payload.get("distribution"), dict):
        payload["distribution"] = DistributionSpec.from_dict({"d": d, **payload["distribution"]})
    return ContaminationSpec(obj.get("mode", "none"), float(obj.get("eta", eta)), payload)


def _estimator_cfg(obj: dict, delta: float, eta: float, seed: int) -> EstimatorConfig:
    obj = dict(obj)
    med = dict(obj.pop("median", {}))
    med["seed"] = seed
    return EstimatorConfig(kind=obj.pop("kind"), delta=delta, eta=eta, seed=seed,
                           median=MedianConfig(**med), **obj)


# ---------------------------------------------------------------------------
# scoring


def score_estimate(est, specs):
    """``(mahalanobis, euclidean, certificate)`` against the worst of ``specs``.

    The Mahalanobis error is ``None`` for singular laws; the certificate then
    also includes the analytic optimal direction on the range of the
    covariance.
    """
    worst = None
    for spec in specs:
        mom = moments(spec)
        x = est - mom.mean
        dirs = sweep_directions(spec.d)
        maha = None
        if mom.nonsingular:
            try:
                maha = mahalanobis_norm(x, mom.cov)
            except SingularCovariance:
                maha = None
        if maha is None:
            v = optimal_direction(x, mom.cov)
            if v is not None:
                dirs = np.vstack([dirs, v])
        cert = directional_certificate(est, mom.mean, mom.cov, dirs).value
        eucl = float(np.linalg.norm(x))
        rank = maha if maha is not None else cert
        if worst is None or rank > worst[0]:
            worst = (rank, maha, eucl, cert)
    return worst[1], worst[2], worst[3]


def _run_task(task):
    cfg, gi, point, trial = task
    tpl, d, n, delta, eta, cont = point
    seed = split(cfg.base_seed, gi, trial)
    family = tpl.label if cont.get("mode", "none") == "none" else f"{tpl.label}|{_cont_label(cont)}"
    base = dict(family=family, d=int(d), n=int(n), eta=float(eta), delta=float(delta), trial=int(trial),
                seed=int(seed))
    records = []
    try:
        spec, scoring = resolve_family(tpl, d, n, delta, eta, seed)
        X = sample(spec, n, split(seed, 1))
        X, _ = contaminate(X, resolve_contamination(cont, d, eta), split(seed, 2), base=spec)
    except Exception as exc:  # recorded, never fatal
        return [TrialRecord(estimator=e["kind"], failure=f"setup:{type(exc).__name__}", **base)
                for e in cfg.estimators]
    est_seed = split(seed, 3) >> 1
    for e in cfg.estimators:
        rec = TrialRecord(estimator=e["kind"], **base)
        try:
            res = estimate(X, _estimator_cfg(e, delta, eta, est_seed))
            rec.k_buckets = res.k_buckets or None
            rec.undefined_flag = bool(res.undefined_flag)
            rec.outlyingness = None if math.isnan(res.score) else float(res.score)
            if cfg.timing:
                rec.runtime_ms = round(res.runtime_ms, 3)
            if not res.undefined_flag:
                rec.error_mahalanobis, rec.error_euclidean, rec.cert_lower_bound = \
                    score_estimate(np.asarray(res.estimate), scoring)
        except Exception as exc:
            rec.failure = f"estimate:{type(exc).__name__}"
        records.append(rec)
    return records


def _cont_label(cont: dict) -> str:
    mode = cont.get("mode", "none")
    strat = cont.get("strategy", cont.get("payload", {}).get("strategy"))
    return f"{mode}:{strat}" if strat else mode


def worker_count(default: int | None = None) -> int:
    env = os.environ.get("AFFMED_THREADS", "").strip()
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return max(1, default or os.cpu_count() or 1)


def run_experiment(cfg: ExperimentConfig, workers: int | None = None) -> list[TrialRecord]:
    """Run every grid point, estimator and trial; records sorted by key."""
    tasks = [(cfg, gi, point, t) for gi, point in enumerate(cfg.grid()) for t in range(cfg.trials)]
    nw = min(worker_count(workers), len(tasks))
    if nw <= 1:
        chunks = [_run_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=nw) as pool:
            chunks = list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * nw))))
    records = [r for chunk in chunks for r in chunk]
    records.sort(key=TrialRecord.key)
    return records


# ---------------------------------------------------------------------------
# output


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _json_value(v):
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    return v


def format_records(records, fmt: str = "csv") -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(RECORD_FIELDS)
        for r in records:
            w.writerow([_cell(getattr(r, f)) for f in RECORD_FIELDS])
        return buf.getvalue()
    if fmt == "json":
        rows = [{f: _json_value(getattr(r, f)) for f in RECORD_FIELDS} for r in records]
        return json.dumps(rows, indent=1) + "\n"
    raise ValueError(f"unknown output format {fmt!r}")


def write_records(records, path, fmt: str | None = None) -> None:
    fmt = fmt or ("json" if str(path).endswith(".json") else "csv")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_records(records, fmt))


def read_records(path) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


# ---------------------------------------------------------------------------
# presets


def hardcase_config(d: int, gamma="auto", n: int = 20000, trials: int = 20, base_seed: int = 0,
                    delta: float = 0.05) -> ExperimentConfig:
    """Separation preset on ``intuition_gamma`` for the four main estimators."""
    return ExperimentConfig(
        families=[{"kind": "intuition_gamma", "params": {"gamma": gamma}}],
        d=[d], n=[n], delta=[delta], eta=[0.0],
        estimators=[{"kind": k} for k in ("ours", "tukey", "stahel_donoho", "empirical_mean")],
        trials=trials, base_seed=base_seed,
    )


def lowerbound_config(family: str, d: int, n: int, delta: float = 0.05, eta: float | None = None,
                      trials: int = 10, base_seed: int = 0, r: float = 1.0) -> ExperimentConfig:
    """Lower-bound families scored the way the corresponding argument uses them.

    ``heavy`` draws a random member and scores against it. ``breakdown`` and
    ``quant`` sample member 0 (a contaminated version of every other member)
    and score against the worst member.
    """
    if family == "heavy":
        tpl = {"kind": "heavytailed_lb", "params": {"eps": "auto", "index": "random"}}
        eta = 0.0 if eta is None else eta
    elif family == "breakdown":
        tpl = {"kind": "breakdown_lb", "params": {"index": 0, "r": r}, "score": "worst_member"}
        eta = 1.0 / (d + 1) if eta is None else eta
    elif family == "quant":
        if eta is None:
            raise ValueError("quant family needs --eta")
        tpl = {"kind": "quant_lb", "params": {"index": 0, "eta": "auto"}, "score": "worst_member"}
    else:
        raise ValueError(f"unknown lower-bound family {family!r}")
    return ExperimentConfig(
        families=[tpl], d=[d], n=[n], delta=[delta], eta=[eta],
        estimators=[{"kind": k} for k in ("ours", "empirical_mean", "coord_median")],
        trials=trials, base_seed=base_seed,
    )
