"""Monte Carlo studies comparing sampled channels with their free-probability limits.

Every (n, trial) task draws from its own stream root.child(n_index).child(trial):
child(0) samples the Kraus family, child(1) seeds the estimators, child(2) the probe
states. Tasks share nothing, so the thread pool cannot change any observable.
"""

import logging
import math

import numpy as np
import pandas as pd

from channels import (
    apply_complementary,
    bell_overlap,
    build_rectifier,
    complementary_on_vector,
    effective_kraus,
    pair_output_on_bell,
    quadratic_form_matrix,
    stacked_isometry_defect,
)
from config import EIGEN_FLOOR, PROBE_COUNT, PROBE_SEED, PROBE_STATES, WORKERS
from ensembles import generator, sample_kraus_family
from errors import DomainError, NearSingularFrameError
from experiments.estimators import estimate_moe, estimate_mopn, top_eigenpair
from experiments.plan import ExperimentPlan
from experiments.report import Report, build_report
from experiments.runner import run_ordered
from freelimits import (
    bell_pair_limit,
    bell_pair_lower_bound,
    f_limit,
    limit_mopn,
    marchenko_pastur_cdf,
    moe_single_lower_bound,
    mp_edges,
    pair_entropy_ceiling,
    quadratic_entropy_bound,
    spectral_ks_distance,
    two_norm_deviation_bound,
)
from matrixkit import (
    eigvals_herm,
    partial_trace,
    random_density,
    random_pure_state,
    schatten_norm,
    von_neumann_entropy,
)
from models import ChannelKind, ConvergenceRecord, EnsembleFlavor, SeedSpec
from ncoracle import LetterKind, quadratic_form_moment

logger = logging.getLogger(__name__)

TWO_SIDED, UPPER, LOWER = "two-sided", "upper", "lower"
ORACLE_KIND = {
    EnsembleFlavor.GUE: LetterKind.SEMICIRCULAR,
    EnsembleFlavor.GINIBRE: LetterKind.CIRCULAR,
}


def task_seed(plan: ExperimentPlan, n_index: int, trial: int) -> SeedSpec:
    return plan.seed_spec().child(n_index).child(trial)


def _record(quantity, n, trial, observed, limit, seed, plan, sense=TWO_SIDED, band=None) -> ConvergenceRecord:
    """Record with the tolerance flag; one-sided senses only penalize the wrong side of the limit."""
    band = plan.tolerance_band(n) if band is None else band
    observed, limit = float(observed), float(limit)
    if sense == UPPER:
        within = observed <= limit + band
    elif sense == LOWER:
        within = observed >= limit - band
    else:
        within = abs(observed - limit) <= band
    return ConvergenceRecord(
        quantity=quantity,
        n=int(n),
        trial=int(trial),
        observed=observed,
        limit=limit,
        seed=seed,
        flavor=plan.flavor.value,
        within_tolerance=bool(within),
    )


def _failed(quantity, n, trial, observed, limit, seed, plan) -> ConvergenceRecord:
    return ConvergenceRecord(
        quantity=quantity, n=int(n), trial=int(trial), observed=float(observed), limit=float(limit),
        seed=seed, flavor=plan.flavor.value, within_tolerance=False, status="failed",
    )


def probe_set(k: int, count: int = PROBE_COUNT) -> list[np.ndarray]:
    """Fixed PSD probes with ‖A‖₂ = 1: I/√k first, then random ones of rank 1, 2, …, k, 1, …."""
    rng = generator(SeedSpec(PROBE_SEED))
    probes = [np.eye(k) / math.sqrt(k)]
    for i in range(1, count):
        rho = random_density(k, rng, rank=1 + (i - 1) % k)
        probes.append(rho / np.linalg.norm(rho, "fro"))
    return probes


def _convergence_trial(plan: ExperimentPlan, n_index: int, n: int, trial: int) -> list[ConvergenceRecord]:
    k = plan.k
    seed = task_seed(plan, n_index, trial)
    fam = sample_kraus_family(n, k, plan.flavor, seed.child(0))
    frame = quadratic_form_matrix(fam.ops, np.eye(k))
    eig = eigvals_herm(frame)
    low, high = mp_edges(k)
    records = [
        _record("w_max", n, trial, eig[0], high, seed, plan),
        _record("w_min", n, trial, eig[-1], low, seed, plan),
        _record("w_ks", n, trial, spectral_ks_distance(eig, lambda x: marchenko_pastur_cdf(x, k)), 0.0, seed, plan, UPPER),
        _record("trace_min", n, trial, eig[-1] / k, low / k, seed, plan),
        _record("trace_max", n, trial, eig[0] / k, high / k, seed, plan),
    ]

    rng = generator(seed.child(2))
    escape = 0.0
    for _ in range(PROBE_STATES):
        x = random_pure_state(n, rng)
        trace = float(np.real(np.vdot(x, frame @ x))) / k
        escape = max(escape, low / k - trace, trace - high / k)
    records.append(_record("trace_escape", n, trial, escape, 0.0, seed, plan, UPPER))

    for j, p in enumerate(plan.indices):
        estimate = estimate_mopn(fam, ChannelKind.raw(), p, plan.restarts, plan.max_iters, seed=seed.child(1).child(j))
        limit, _ = limit_mopn(k, p)
        records.append(_record(f"mopn_p{p.label()}", n, trial, estimate.value, limit, seed, plan))

    for i, a in enumerate(probe_set(k)):
        value, _ = top_eigenpair(fam.ops, a)
        records.append(_record(f"f_probe{i}", n, trial, value, f_limit(a)[0], seed, plan))

    logger.debug(f"convergence n={n} trial={trial}: λ_max(W)={eig[0]:.4f} λ_min(W)={eig[-1]:.4f}")
    return records


def _tasks(plan: ExperimentPlan) -> list[tuple[int, int, int]]:
    return [(i, n, t) for i, n in enumerate(plan.n_grid) for t in range(plan.trials)]


def _run(plan: ExperimentPlan, trial_fn, workers: int) -> list[ConvergenceRecord]:
    results = run_ordered(lambda task: trial_fn(plan, *task), _tasks(plan), workers)
    records = [record for batch in results for record in batch]
    misses = sum(1 for r in records if r.within_tolerance is False)
    if misses:
        logger.warning(f"{misses}/{len(records)} records fall outside their tolerance band")
    return records


def convergence_study(plan: ExperimentPlan, workers: int = WORKERS) -> list[ConvergenceRecord]:
    """Edges of W, trace window, MOpN estimates and probe values f_n(A) against their limits."""
    logger.info(f"=== Convergence study: {plan.flavor.value} k={plan.k} n_grid={plan.n_grid} trials={plan.trials} ===")
    return _run(plan, _convergence_trial, workers)


def _bell_trial(plan: ExperimentPlan, n_index: int, n: int, trial: int) -> list[ConvergenceRecord]:
    k = plan.k
    seed = task_seed(plan, n_index, trial)
    fam = sample_kraus_family(n, k, plan.flavor, seed.child(0))
    limit = bell_pair_limit(k)

    pair = pair_output_on_bell(fam, ChannelKind.raw())
    records = [
        _record("pair_distance", n, trial, np.linalg.norm(pair - limit, "fro"), 0.0, seed, plan, UPPER),
        _record("bell_overlap", n, trial, bell_overlap(pair), 1.0 / k + 1.0 / k**2, seed, plan),
    ]
    for p in plan.indices:
        records.append(_record(f"pair_norm_p{p.label()}", n, trial, schatten_norm(pair, p), bell_pair_lower_bound(k, p), seed, plan))

    try:
        rectifier = build_rectifier(fam, plan.epsilon)
    except NearSingularFrameError as e:
        logger.warning(f"Skipping rectified Bell pair (n={n}, trial={trial}): {e}")
        records.append(_failed("rectifier", n, trial, e.min_eigenvalue, EIGEN_FLOOR, seed, plan))
        return records

    kind = ChannelKind.rectified()
    rect_pair = pair_output_on_bell(fam, kind, rectifier)
    reduced = partial_trace(rect_pair, (k, k), keep=0)
    single = apply_complementary(fam, kind, np.eye(n) / n, rectifier)
    records += [
        _record("pair_distance_rectified", n, trial, np.linalg.norm(rect_pair - limit, "fro"), 0.0, seed, plan, UPPER),
        _record("bell_overlap_rectified", n, trial, bell_overlap(rect_pair), 1.0 / k, seed, plan, LOWER),
        _record("partial_trace_defect", n, trial, np.abs(reduced - single).max(), 0.0, seed, plan, UPPER),
    ]
    return records


def bell_pair_records(plan: ExperimentPlan, workers: int = WORKERS) -> list[ConvergenceRecord]:
    logger.info(f"=== Bell-pair experiment: {plan.flavor.value} k={plan.k} n_grid={plan.n_grid} trials={plan.trials} ===")
    return _run(plan, _bell_trial, workers)


def bell_pair_experiment(plan: ExperimentPlan, workers: int = WORKERS) -> Report:
    """(Φ^c ⊗ Φ̄^c)(|b_n⟩⟨b_n|) against (1/k²)I + (1/k)|b_k⟩⟨b_k|, raw and rectified."""
    return study_report("bell-pair", plan, bell_pair_records(plan, workers))


def _moe_trial(plan: ExperimentPlan, n_index: int, n: int, trial: int) -> list[ConvergenceRecord]:
    k = plan.k
    seed = task_seed(plan, n_index, trial)
    fam = sample_kraus_family(n, k, plan.flavor, seed.child(0))
    try:
        rectifier = build_rectifier(fam, plan.epsilon)
    except NearSingularFrameError as e:
        logger.warning(f"MOE trial aborted (n={n}, trial={trial}): {e}")
        return [_failed("rectifier", n, trial, e.min_eigenvalue, EIGEN_FLOOR, seed, plan)]

    kind = ChannelKind.rectified()
    kraus = effective_kraus(fam, kind, rectifier)
    estimate = estimate_moe(fam, kind, rectifier, plan.restarts, seed.child(1), plan.max_iters)
    pair_entropy = von_neumann_entropy(pair_output_on_bell(fam, kind, rectifier))

    rng = generator(seed.child(2))
    states = [estimate.witness_state] + [random_pure_state(n, rng) for _ in range(PROBE_STATES)]
    deviation, slack = 0.0, math.inf
    for x in states:
        sigma = complementary_on_vector(kraus, x)
        deviation = max(deviation, float(np.linalg.norm(sigma - np.eye(k) / k, "fro")))
        slack = min(slack, von_neumann_entropy(sigma) - quadratic_entropy_bound(sigma))

    return [
        _record("moe_single_min", n, trial, estimate.value, moe_single_lower_bound(k), seed, plan, LOWER),
        _record("pair_entropy", n, trial, pair_entropy, pair_entropy_ceiling(k), seed, plan, UPPER),
        _record("two_norm_deviation", n, trial, deviation, two_norm_deviation_bound(k), seed, plan, UPPER),
        _record("quadratic_bound_slack", n, trial, slack, 0.0, seed, plan, LOWER, band=1e-10),
        _record("isometry_defect", n, trial, stacked_isometry_defect(fam, rectifier), 0.0, seed, plan, UPPER, band=1e-8),
    ]


def moe_records(plan: ExperimentPlan, workers: int = WORKERS) -> list[ConvergenceRecord]:
    logger.info(f"=== MOE experiment: {plan.flavor.value} k={plan.k} n_grid={plan.n_grid} trials={plan.trials} ===")
    return _run(plan, _moe_trial, workers)


def moe_experiment(plan: ExperimentPlan, workers: int = WORKERS) -> Report:
    """Entropy side: single-channel minimum, Bell-pair entropy and the 2-norm deviation of Ψ^c."""
    return study_report("moe", plan, moe_records(plan, workers))


def summarize(records: list[ConvergenceRecord]) -> dict:
    """Per quantity and n: mean observed, mean and standard error of the error, share within tolerance."""
    if not records:
        return {}
    frame = pd.DataFrame([r.to_dict() for r in records])
    frame = frame[frame["status"] == "ok"]
    summary: dict = {}
    for (quantity, n), group in frame.groupby(["quantity", "n"], sort=True):
        count = len(group)
        spread = float(group["observed"].std(ddof=1)) if count > 1 else 0.0
        summary.setdefault(quantity, {})[str(n)] = {
            "trials": int(count),
            "mean_observed": float(group["observed"].mean()),
            "stderr": spread / math.sqrt(count),
            "limit": float(group["limit"].iloc[0]),
            "mean_abs_err": float(group["abs_err"].mean()),
            "within_share": float(group["within_tolerance"].astype(bool).mean()),
        }
    return summary


def flavor_differences(first: list[ConvergenceRecord], second: list[ConvergenceRecord]) -> list[dict]:
    """Seed-averaged difference per (quantity, n) between two flavors, against their combined standard error."""
    a, b = summarize(first), summarize(second)
    rows = []
    for quantity in sorted(set(a) & set(b)):
        for n in sorted(set(a[quantity]) & set(b[quantity]), key=int):
            x, y = a[quantity][n], b[quantity][n]
            diff = x["mean_observed"] - y["mean_observed"]
            se = math.hypot(x["stderr"], y["stderr"])
            rows.append({
                "quantity": quantity,
                "n": int(n),
                "difference": diff,
                "combined_stderr": se,
                "agree": bool(abs(diff) <= 3.0 * se + 1e-12),
            })
    return rows


def study_report(kind: str, plan: ExperimentPlan, records: list[ConvergenceRecord], extra_summary=None) -> Report:
    summary = summarize(records)
    if extra_summary:
        summary.update(extra_summary)
    seeds = {
        "master_seed": plan.master_seed,
        "streams": "master:0/<n_index>/<trial>; /0 family, /1 estimators, /2 probe states",
    }
    return build_report(kind, records, summary=summary, plan=plan.echo(), seeds=seeds, engineering=True)


def moment_cross_check(
    a,
    r_max: int = 3,
    n: int = 600,
    trials: int = 10,
    flavor=EnsembleFlavor.GUE,
    seed: SeedSpec = SeedSpec(PROBE_SEED),
    workers: int = WORKERS,
) -> pd.DataFrame:
    """(1/n) E Tr[S_A^r] from sampled families against the non-crossing oracle, S_A = Σ a_ij X_i* X_j."""
    flavor = EnsembleFlavor.parse(flavor)
    a = np.asarray(a)
    if trials < 2:
        raise DomainError("moment cross-check needs at least 2 trials for a standard error")
    k = a.shape[0]

    def sample_moments(trial: int) -> np.ndarray:
        fam = sample_kraus_family(n, k, flavor, seed.child(trial))
        eig = eigvals_herm(quadratic_form_matrix(fam.ops, a))
        return np.array([np.sum(eig**r) / n for r in range(1, r_max + 1)])

    samples = np.array(run_ordered(sample_moments, range(trials), workers))
    rows = []
    for idx, r in enumerate(range(1, r_max + 1)):
        mean = float(samples[:, idx].mean())
        stderr = float(samples[:, idx].std(ddof=1)) / math.sqrt(trials)
        oracle = float(quadratic_form_moment(a, r, ORACLE_KIND[flavor]))
        err = abs(mean - oracle)
        rows.append({
            "r": r, "flavor": flavor.value, "n": n, "trials": trials, "mean": mean, "stderr": stderr,
            "oracle": oracle, "abs_err": err, "within": bool(err <= 3.0 * stderr + 1e-12),
        })
    logger.info(f"Moment cross-check ({flavor.value}, n={n}): {sum(r['within'] for r in rows)}/{len(rows)} within 3 SE")
    return pd.DataFrame(rows)
