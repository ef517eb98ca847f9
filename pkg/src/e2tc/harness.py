"""Monte-Carlo experiment runner, aggregation and bound reports."""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import bounds, kernels
from .baselines import OfulBallPolicy, OraclePolicy, UniformPolicy, oracle_etc_policy
from .ellipsoid import EllipsoidSet, random_pd_matrix
from .environment import BanditInstance, NoiseModel, RegretTrace, run_episode, run_rng, run_seed
from .errors import ConfigError, ContractViolation, NotPositiveDefinite
from .explore_commit import DEFAULT_ALPHA, E2tcPolicy, simulate_e2tc
from .lowerbound import build_assouad
from .reduction import reduced_e2tc

TRACE_COLUMNS = ("experiment_id", "policy", "d", "T", "norm", "seed", "step", "cum_regret")
RUN_COLUMNS = (
    "experiment_id", "instance", "policy", "d", "T", "norm", "seed",
    "final_regret", "warmup_length", "B_hat", "N_e", "committed",
)
POLICY_NAMES = ("e2tc", "oracle_etc", "uniform", "oful_ball", "oracle")
Z95 = 1.96


@dataclass(frozen=True, eq=False)
class InstanceSpec:
    label: str
    A: np.ndarray
    c: np.ndarray
    theta: np.ndarray

    @property
    def d(self) -> int:
        return self.theta.shape[0]

    def action_set(self) -> EllipsoidSet:
        return EllipsoidSet.from_matrix(self.A, self.c)

    @property
    def norm(self) -> float:
        return float(np.sqrt(self.theta @ self.A @ self.theta))


def _parse_value(value: str):
    if not value:
        return True
    try:
        return float(value)
    except ValueError:
        return value


@dataclass(frozen=True)
class PolicySpec:
    name: str
    params: dict = field(default_factory=dict)

    @property
    def label(self) -> str:
        if self.name == "e2tc":
            alpha = self.params.get("alpha", DEFAULT_ALPHA)
            return f"e2tc({alpha:g})"
        return self.name

    @classmethod
    def parse(cls, raw) -> "PolicySpec":
        """Accept ``{"name": ..., **params}`` or ``"name:key=value,..."``."""
        if isinstance(raw, PolicySpec):
            return raw
        if isinstance(raw, str):
            name, _, rest = raw.partition(":")
            params = {}
            for item in filter(None, rest.split(",")):
                key, _, value = item.partition("=")
                params[key.strip()] = _parse_value(value)
            raw = {"name": name, **params}
        if not isinstance(raw, dict) or "name" not in raw:
            raise ConfigError(f"cannot parse policy {raw!r}")
        raw = dict(raw)
        name = raw.pop("name")
        if name not in POLICY_NAMES:
            raise ConfigError(f"unknown policy {name!r}; expected one of {POLICY_NAMES}")
        return cls(name=name, params=raw)


@dataclass
class ExperimentConfig:
    experiment_id: str
    instances: list[InstanceSpec]
    policies: list[PolicySpec]
    T: int
    runs: int = 20
    base_seed: int = 0
    sigma: float = 1.0
    noise: str = "gaussian"
    out: str | None = None
    check_bounds: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        if self.T < 1:
            raise ConfigError("T must be >= 1")
        if not self.instances or not self.policies:
            raise ConfigError("need at least one instance and one policy")
        try:
            NoiseModel(self.noise, self.sigma)
        except (ValueError, ContractViolation) as exc:
            raise ConfigError(str(exc)) from exc


def _action_set_matrix(spec, d: int | None) -> tuple[np.ndarray, np.ndarray]:
    spec = dict(spec or {"shape": "ball"})
    c = spec.get("c")
    if "A" in spec:
        A = np.asarray(spec["A"], dtype=float)
    else:
        shape = spec.get("shape", "ball")
        d = int(spec.get("d", d or 0))
        if d < 1:
            raise ConfigError("action set needs a dimension")
        if shape == "ball":
            A = float(spec.get("radius", 1.0)) ** 2 * np.eye(d)
        elif shape == "random":
            A = random_pd_matrix(d, np.random.default_rng(int(spec.get("seed", 0))), float(spec.get("cond", 10.0)))
        else:
            raise ConfigError(f"unknown action set shape {shape!r}")
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ConfigError(f"action set matrix has shape {A.shape}")
    c = np.zeros(A.shape[0]) if c is None else np.asarray(c, dtype=float)
    if c.shape != (A.shape[0],):
        raise ConfigError("center has the wrong length")
    try:
        EllipsoidSet.from_matrix(A, c)
    except (NotPositiveDefinite, ContractViolation) as exc:
        raise ConfigError(f"action set matrix is not symmetric positive definite: {exc}") from exc
    return A, c


def _direction(raw, d: int, seed: int) -> np.ndarray:
    if raw is None or raw == "random":
        u = np.random.default_rng(seed).standard_normal(d)
    elif raw == "first":
        u = np.eye(d)[0]
    elif raw == "ones":
        u = np.ones(d)
    else:
        u = np.asarray(raw, dtype=float)
        if u.shape != (d,):
            raise ConfigError("direction has the wrong length")
    if not np.any(u):
        raise ConfigError("direction must be nonzero")
    return u


def expand_instances(raw_list, default_action_set=None) -> list[InstanceSpec]:
    """Turn instance dictionaries into concrete ``(A, c, theta)`` triples.

    Supported keys: ``action_set``, and one of ``theta`` (explicit),
    ``norm`` (+ optional ``direction``, ``seed``) giving ``||theta||_A``, or
    ``assouad`` (``{"B", "T", "sigma", "seed"}``) expanding to the whole
    sign-flip family.
    """
    out: list[InstanceSpec] = []
    for idx, raw in enumerate(raw_list):
        if not isinstance(raw, dict):
            raise ConfigError(f"instance {idx} must be an object")
        label = str(raw.get("label", f"i{idx}"))
        d_hint = raw.get("d")
        if "theta" in raw:
            d_hint = len(raw["theta"])
        A, c = _action_set_matrix(raw.get("action_set", default_action_set), d_hint)
        d = A.shape[0]
        if "theta" in raw:
            theta = np.asarray(raw["theta"], dtype=float)
            if theta.shape != (d,):
                raise ConfigError(f"instance {label}: theta has the wrong length")
            out.append(InstanceSpec(label, A, c, theta))
        elif "norm" in raw:
            u = _direction(raw.get("direction"), d, int(raw.get("seed", idx)))
            theta = float(raw["norm"]) * u / math.sqrt(u @ A @ u)
            out.append(InstanceSpec(label, A, c, theta))
        elif "assouad" in raw:
            fam_spec = raw["assouad"]
            B = float(fam_spec.get("B", 1.0))
            u = _direction(fam_spec.get("direction"), d, int(fam_spec.get("seed", idx)))
            base = B * u / math.sqrt(u @ A @ u)
            fam = build_assouad(
                base, B, int(fam_spec["T"]), float(fam_spec.get("sigma", 1.0)), A, c, seed=int(fam_spec.get("seed", idx))
            )
            for xi, theta in fam.all_thetas():
                tag = "".join("+" if s > 0 else "-" for s in xi)
                out.append(InstanceSpec(f"{label}[{tag}]", A, c, theta))
        else:
            raise ConfigError(f"instance {label}: needs theta, norm or assouad")
    return out


def load_config(source, overrides: dict | None = None) -> ExperimentConfig:
    """Build a config from a JSON path or dict; ``overrides`` replaces top-level fields."""
    if isinstance(source, (str, Path)):
        with open(source) as fh:
            raw = json.load(fh)
    else:
        raw = dict(source)
    for key, value in (overrides or {}).items():
        if value is not None:
            raw[key] = value
    try:
        policies = [PolicySpec.parse(p) for p in raw.get("policies", [{"name": "e2tc"}])]
        instances = expand_instances(raw["instances"], raw.get("action_set"))
        return ExperimentConfig(
            experiment_id=str(raw.get("experiment_id", "experiment")),
            instances=instances,
            policies=policies,
            T=int(raw["T"]),
            runs=int(raw.get("runs", 20)),
            base_seed=int(raw.get("base_seed", raw.get("seed", 0))),
            sigma=float(raw.get("sigma", 1.0)),
            noise=str(raw.get("noise", "gaussian")),
            out=raw.get("out"),
            check_bounds=bool(raw.get("check_bounds", False)),
            workers=int(raw.get("workers", 1)),
        )
    except KeyError as exc:
        raise ConfigError(f"missing config field {exc}") from exc


def make_policy(spec: PolicySpec, E: EllipsoidSet, inst: BanditInstance, sigma: float, T: int, rng):
    p = spec.params
    if spec.name == "e2tc":
        alpha = float(p.get("alpha", DEFAULT_ALPHA))
        if E.is_centered:
            return E2tcPolicy(E, sigma, T, alpha=alpha)
        return reduced_e2tc(E, sigma, T, alpha=alpha)
    if spec.name == "oracle_etc":
        if not E.is_centered:
            raise ConfigError("oracle_etc needs a centered action set")
        return oracle_etc_policy(E.anorm(inst.theta), sigma, T, E)
    if spec.name == "uniform":
        return UniformPolicy(E, rng)
    if spec.name == "oful_ball":
        return OfulBallPolicy(
            E, sigma, T,
            S_bound=float(p.get("S_bound", 25.0)),
            lam=float(p.get("lambda", 1.0)),
            delta=p.get("delta"),
        )
    if spec.name == "oracle":
        return OraclePolicy(E, inst.theta)
    raise ConfigError(f"unknown policy {spec.name!r}")


def run_single(
    spec: PolicySpec,
    E: EllipsoidSet,
    inst: BanditInstance,
    T: int,
    rng: np.random.Generator,
    sigma: float | None = None,
) -> RegretTrace:
    """One episode; centered E2TC variants take the segment-level fast path."""
    sigma = inst.noise.sigma if sigma is None else sigma
    fast = spec.params.get("engine", "fast") != "generic"
    if fast and spec.name in ("e2tc", "oracle_etc") and E.is_centered:
        if spec.name == "oracle_etc":
            return simulate_e2tc(E, inst, T, rng, sigma=sigma, known_norm=E.anorm(inst.theta))
        return simulate_e2tc(E, inst, T, rng, alpha=float(spec.params.get("alpha", DEFAULT_ALPHA)), sigma=sigma)
    policy = make_policy(spec, E, inst, sigma, T, rng)
    return run_episode(policy, inst, E, T, rng)


def _episode_task(args):
    inst_spec, pol_spec, T, sigma, noise, seed = args
    E = inst_spec.action_set()
    inst = BanditInstance(inst_spec.theta, NoiseModel(noise, sigma))
    trace = run_single(pol_spec, E, inst, T, np.random.default_rng(seed), sigma=sigma)
    info = {k: trace.info.get(k) for k in ("warmup_length", "B_hat", "N_e", "committed", "iota_hat")}
    return trace.steps, trace.cumulative, info


@dataclass
class EpisodeResult:
    instance: int
    policy: int
    run: int
    seed: int
    steps: np.ndarray
    cumulative: np.ndarray
    info: dict

    @property
    def final(self) -> float:
        return float(self.cumulative[-1])


def summarize(values) -> dict:
    """Mean, sample std and normal 95% interval; exact sums so seed order is irrelevant."""
    vals = [float(v) for v in values]
    n = len(vals)
    mean = math.fsum(vals) / n
    var = math.fsum((v - mean) ** 2 for v in vals) / (n - 1) if n > 1 else 0.0
    std = math.sqrt(var)
    half = Z95 * std / math.sqrt(n)
    return {
        "runs": n, "mean": mean, "std": std,
        "ci95": [mean - half, mean + half], "ci95_half": half,
        "min": min(vals), "max": max(vals),
    }


def bound_report(inst: InstanceSpec, policy: PolicySpec, finals, infos, T: int, sigma: float) -> dict:
    """Bound checks for one E2TC row; a pure function of its results."""
    d = inst.d
    norm = inst.norm
    centered = not np.any(inst.c)
    alpha = float(policy.params.get("alpha", DEFAULT_ALPHA))
    stats = summarize(finals)
    rep = {
        "instance": inst.label, "policy": policy.label, "d": d, "T": T, "norm": norm, "sigma": sigma,
        "mean_regret": stats["mean"], "ci95_upper": stats["ci95"][1],
        "applicable": alpha == 3.0 and norm > 0,
    }
    if norm <= 0:
        rep["pass"] = None
        return rep
    rhs = bounds.theorem3_rhs(d, sigma, T, norm) if centered else bounds.theorem4_rhs(d, sigma, T, norm)
    rep["theorem"] = "centered" if centered else "translated"
    rep["regret_rhs"] = rhs
    rep["regret_pass"] = stats["ci95"][1] <= rhs
    checks = [rep["regret_pass"]]
    if centered and policy.name == "e2tc":
        n = len(finals)
        b_hats = [i.get("B_hat") for i in infos]
        outside = sum(1 for b in b_hats if b is None or not 0.5 * norm <= b <= 1.5 * norm)
        p_rhs = bounds.lemma3_failure_rhs(d, sigma, T, norm)
        w_rhs = bounds.lemma3_warmup_rhs(d, sigma, T, norm)
        emp_p = outside / n
        mean_w = math.fsum(float(i.get("warmup_length") or 0) for i in infos) / n
        rep.update({
            "warmup_failure_rate": emp_p,
            "warmup_failure_rhs": p_rhs,
            "warmup_failure_allowance": p_rhs + 3.0 * bounds.binomial_std(p_rhs, n),
            "mean_warmup_length": mean_w,
            "warmup_length_rhs": w_rhs,
        })
        rep["warmup_failure_pass"] = emp_p <= rep["warmup_failure_allowance"]
        rep["warmup_length_pass"] = mean_w <= w_rhs
        checks += [rep["warmup_failure_pass"], rep["warmup_length_pass"]]
    rep["pass"] = all(checks) if rep["applicable"] else None
    return rep


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    episodes: list[EpisodeResult]
    summary: list[dict]
    bound_reports: list[dict]
    elapsed: float

    @property
    def all_pass(self) -> bool:
        return all(r["pass"] is not False for r in self.bound_reports)

    def finals(self, instance: int, policy: int) -> np.ndarray:
        return np.array([e.final for e in self.episodes if e.instance == instance and e.policy == policy])

    def to_json(self) -> dict:
        cfg = self.config
        return {
            "experiment_id": cfg.experiment_id,
            "T": cfg.T, "runs": cfg.runs, "base_seed": cfg.base_seed,
            "sigma": cfg.sigma, "noise": cfg.noise,
            "policies": [{"name": p.name, **p.params} for p in cfg.policies],
            "kernel_backend": kernels.BACKEND,
            "elapsed_s": self.elapsed,
            "rows": self.summary,
            "bound_reports": self.bound_reports,
            "bounds_checked": cfg.check_bounds,
            "all_pass": self.all_pass,
        }


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Run every (instance, policy, seed) episode and aggregate.

    Policy construction is validated before any episode starts. Results are
    merged by key, so output does not depend on scheduling.
    """
    for inst in cfg.instances:
        E = inst.action_set()
        for pol in cfg.policies:
            try:
                make_policy(pol, E, BanditInstance(inst.theta, NoiseModel(cfg.noise, cfg.sigma)), cfg.sigma, cfg.T,
                            np.random.default_rng(0))
            except ContractViolation as exc:
                raise ConfigError(f"policy {pol.label} on instance {inst.label}: {exc}") from exc

    keys = [(i, p, k) for i in range(len(cfg.instances)) for p in range(len(cfg.policies)) for k in range(cfg.runs)]
    tasks = [
        (cfg.instances[i], cfg.policies[p], cfg.T, cfg.sigma, cfg.noise, run_seed(cfg.base_seed, k))
        for i, p, k in keys
    ]
    tic = time.perf_counter()
    # a PolicyViolation in any episode propagates and aborts the experiment
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            outputs = list(pool.map(_episode_task, tasks, chunksize=max(1, len(tasks) // (4 * cfg.workers))))
    else:
        outputs = [_episode_task(t) for t in tasks]
    elapsed = time.perf_counter() - tic

    episodes = [
        EpisodeResult(i, p, k, task[-1], steps, cum, info)
        for (i, p, k), task, (steps, cum, info) in zip(keys, tasks, outputs)
    ]
    summary, reports = [], []
    for i, inst in enumerate(cfg.instances):
        for p, pol in enumerate(cfg.policies):
            rows = [e for e in episodes if e.instance == i and e.policy == p]
            finals = [e.final for e in rows]
            row = {"instance": inst.label, "policy": pol.label, "d": inst.d, "T": cfg.T, "norm": inst.norm,
                   **summarize(finals)}
            warm = [e.info.get("warmup_length") for e in rows if e.info.get("warmup_length") is not None]
            if warm:
                row["mean_warmup_length"] = math.fsum(warm) / len(warm)
            summary.append(row)
            if pol.name == "e2tc":
                reports.append(bound_report(inst, pol, finals, [e.info for e in rows], cfg.T, cfg.sigma))
    result = ExperimentResult(cfg, episodes, summary, reports, elapsed)
    if cfg.out:
        write_outputs(result, cfg.out)
    return result


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def write_outputs(result: ExperimentResult, out) -> dict[str, Path]:
    """Write ``traces.csv``, ``runs.csv`` and ``summary.json`` under ``out``."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    cfg = result.config
    paths = {"traces": out / "traces.csv", "runs": out / "runs.csv", "summary": out / "summary.json"}
    with open(paths["traces"], "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRACE_COLUMNS)
        for e in result.episodes:
            inst, pol = cfg.instances[e.instance], cfg.policies[e.policy]
            for step, cum in zip(e.steps, e.cumulative):
                w.writerow([cfg.experiment_id, pol.label, inst.d, cfg.T, _fmt(inst.norm), e.seed, int(step), _fmt(cum)])
    with open(paths["runs"], "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(RUN_COLUMNS)
        for e in result.episodes:
            inst, pol = cfg.instances[e.instance], cfg.policies[e.policy]
            w.writerow([
                cfg.experiment_id, inst.label, pol.label, inst.d, cfg.T, _fmt(inst.norm), e.seed, _fmt(e.final),
                _fmt(e.info.get("warmup_length")), _fmt(e.info.get("B_hat")), _fmt(e.info.get("N_e")),
                _fmt(e.info.get("committed")),
            ])
    with open(paths["summary"], "w") as fh:
        json.dump(result.to_json(), fh, indent=2)
    return paths


def norm_sweep_config(
    d: int = 3, T: int = 10_000, runs: int = 20, norms=None, sigma: float = 1.0, policies=None, base_seed: int = 0,
    experiment_id: str = "norm-sweep",
) -> dict:
    """Unit ball, ``||theta||_2`` over ``{d/sqrt(T), 0.1, 1, 10, 25, 50}`` by default."""
    norms = [d / math.sqrt(T), 0.1, 1.0, 10.0, 25.0, 50.0] if norms is None else list(norms)
    return {
        "experiment_id": experiment_id, "T": T, "runs": runs, "sigma": sigma, "base_seed": base_seed,
        "action_set": {"shape": "ball", "d": d},
        "instances": [{"label": f"norm={n:g}", "norm": n, "seed": 1} for n in norms],
        "policies": policies or [{"name": "e2tc", "alpha": 1.0}, {"name": "e2tc", "alpha": 3.0}],
    }


def dim_sweep_config(
    dims=None, norm: float = 10.0, T: int = 10_000, runs: int = 20, sigma: float = 1.0, policies=None,
    base_seed: int = 0, experiment_id: str = "dim-sweep",
) -> dict:
    """Unit balls of growing dimension at fixed ``||theta||_2``; default ``d = 2 .. 90``."""
    dims = list(range(2, 91, 8)) + [90] if dims is None else list(dims)
    dims = sorted(set(int(d) for d in dims))
    return {
        "experiment_id": experiment_id, "T": T, "runs": runs, "sigma": sigma, "base_seed": base_seed,
        "instances": [
            {"label": f"d={d}", "action_set": {"shape": "ball", "d": d}, "norm": norm, "seed": 1} for d in dims
        ],
        "policies": policies or [{"name": "e2tc", "alpha": 1.0}, {"name": "e2tc", "alpha": 3.0}],
    }


def runtime_probe(policy="e2tc", d: int = 100, T: int = 100_000, norm: float = 1.0, seed: int = 0) -> dict:
    """Time one Gaussian-noise episode on the unit ball.

    Returns total seconds, nanoseconds per step and, for the E2TC fast path,
    per-phase seconds.
    """
    spec = PolicySpec.parse(policy)
    E = EllipsoidSet.ball(d)
    u = np.random.default_rng(seed).standard_normal(d)
    inst = BanditInstance(norm * u / np.linalg.norm(u), NoiseModel("gaussian", 1.0))
    rng = run_rng(seed, 0)
    tic = time.perf_counter()
    trace = run_single(spec, E, inst, T, rng, sigma=1.0)
    total = time.perf_counter() - tic
    out = {
        "policy": spec.label, "d": d, "T": T, "total_s": total, "per_step_ns": 1e9 * total / T,
        "final_regret": trace.final, "backend": kernels.BACKEND,
    }
    if "timing" in trace.info:
        out["phases_s"] = dict(trace.info["timing"])
        out["warmup_length"] = trace.info.get("warmup_length")
        out["N_e"] = trace.info.get("N_e")
    return out
