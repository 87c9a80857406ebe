"""Numerical certification: assumption constants, thresholds, and rate fits.

Every estimator here is a sampled bound, not a proof: rho estimates are
maxima over a deterministic sample stream (so they only grow with more
samples), smoothness estimates are suprema over sampled pairs.  Streams are
indexed, which keeps a run with 2n samples an exact superset of the run
with n samples for the same seed.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .competitive import eval_f_alpha
from .errors import DegenerateSampleError
from .problems import OperatorMode, ProblemSpec, eval_operator
from .solver import TrajectoryLog
from .taylor import taylor_model, tau

# Largest coefficient c such that, for every run of the iteration,
#   sum_k lambda_k (p!/L_p) <F(z_half), z_half - z*>
#     <= ||z* - z0||^2 - c * sum_k ||z_half - z_k||^2.
# c = 7/16 is exactly tight: the identity field with L1 = 1 saturates it.
POTENTIAL_COEF = 7.0 / 16.0

SKIP_NORM = 1e-10  # ratio samples closer than this to a zero of F are skipped

_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29)
_BALL_EVERY = 10   # every 10th sample probes a ball around z_star
_BALL_TIER = 32    # ball radius halves after this many ball samples
_MAX_TIER = 20     # radii stop shrinking near the roundoff scale


def _halton(indices: np.ndarray, base: int) -> np.ndarray:
    """Radical-inverse sequence for an array of indices."""
    result = np.zeros(len(indices), dtype=float)
    f = 1.0
    i = indices.astype(np.int64).copy()
    while np.any(i > 0):
        f /= base
        result += f * (i % base)
        i //= base
    return result


def _stream_start(seed: int) -> int:
    return 1 + (int(seed) * 7919) % 104729


def sample_points(box: np.ndarray, n: int, seed: int, z_star=None) -> np.ndarray:
    """Low-discrepancy points in the box, with a shrinking-ball tier at z_star.

    The i-th point depends only on (seed, i), so prefixes are stable across
    different sample counts.
    """
    box = np.asarray(box, dtype=float)
    d = box.shape[0]
    lo, width = box[:, 0], box[:, 1] - box[:, 0]
    start = _stream_start(seed)
    idx = np.arange(start, start + n, dtype=np.int64)
    pts = np.empty((n, d))
    for j in range(d):
        pts[:, j] = lo[j] + width[j] * _halton(idx, _PRIMES[j])
    if z_star is not None:
        z_star = np.asarray(z_star, dtype=float)
        rng = np.random.default_rng(seed)
        base_radius = 0.5 * float(width.max())
        ball_positions = np.arange(_BALL_EVERY - 1, n, _BALL_EVERY)
        for j, i in enumerate(ball_positions):
            direction = rng.standard_normal(d)
            direction /= max(np.linalg.norm(direction), 1e-300)
            radius = base_radius * 0.5 ** min(j // _BALL_TIER, _MAX_TIER) * rng.random() ** (1.0 / d)
            pts[i] = z_star + radius * direction
    return pts


def sample_pairs(box: np.ndarray, n: int, seed: int):
    """Pairs (z_a, z_b) in the box; odd indices are short pairs probing local slopes."""
    box = np.asarray(box, dtype=float)
    d = box.shape[0]
    lo, width = box[:, 0], box[:, 1] - box[:, 0]
    start = _stream_start(seed)
    idx = np.arange(start, start + n, dtype=np.int64)
    a = np.empty((n, d))
    b = np.empty((n, d))
    for j in range(d):
        a[:, j] = lo[j] + width[j] * _halton(idx, _PRIMES[j])
        b[:, j] = lo[j] + width[j] * _halton(idx, _PRIMES[d + j])
    rng = np.random.default_rng(seed)
    base_radius = 0.1 * float(width.max())
    short_positions = np.arange(1, n, 2)
    for j, i in enumerate(short_positions):
        direction = rng.standard_normal(d)
        direction /= max(np.linalg.norm(direction), 1e-300)
        radius = base_radius * 0.5 ** min(j // _BALL_TIER, 13) * (0.1 + 0.9 * rng.random())
        b[i] = np.clip(a[i] + radius * direction, box[:, 0], box[:, 1])
    return a, b


def _operator_fn(problem: ProblemSpec, mode: Optional[OperatorMode]) -> Callable:
    if mode is None or mode.kind == "standard":
        return lambda z: eval_operator(problem, z)
    return lambda z: eval_f_alpha(problem, z, mode.alpha)


@dataclass(frozen=True)
class RhoScan:
    value: float
    worst_violator: Optional[np.ndarray]
    samples_used: int


def _rho_scan(problem: ProblemSpec, z_star, q: float, n_samples: int, seed: int,
              mode: Optional[OperatorMode] = None, workers: int = 1) -> RhoScan:
    z_star = np.asarray(z_star, dtype=float)
    operator = _operator_fn(problem, mode)
    pts = sample_points(problem.sample_box, n_samples, seed, z_star)

    def chunk_best(chunk):
        best, best_z, used = -np.inf, None, 0
        for z in chunk:
            F = operator(z)
            norm = float(np.linalg.norm(F))
            if norm < SKIP_NORM:
                continue
            used += 1
            # elementwise product + sum keeps exact cancellation for skew fields
            inner = float(np.sum(F * (z - z_star)))
            ratio = -2.0 * inner / norm**q
            if ratio > best:
                best, best_z = ratio, z
        return best, best_z, used

    chunks = np.array_split(pts, max(1, workers))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(chunk_best, chunks))
    else:
        results = [chunk_best(c) for c in chunks]

    best, best_z, used = -np.inf, None, 0
    for value, z, n_used in results:  # chunk order fixes tie-breaking
        used += n_used
        if value > best:
            best, best_z = value, z
    if used == 0:
        raise DegenerateSampleError("every sample fell inside the zero-norm skip region")
    return RhoScan(best, best_z, used)


def estimate_q_rho(problem: ProblemSpec, z_star, q: float, n_samples: int, seed: int,
                   mode: Optional[OperatorMode] = None, workers: int = 1) -> float:
    """Largest sampled violation of <F(z), z - z*> >= -(rho/2) ||F(z)||^q."""
    return _rho_scan(problem, z_star, q, n_samples, seed, mode, workers).value


def estimate_weak_mvi_rho(problem: ProblemSpec, z_star, p: int, n_samples: int, seed: int,
                          mode: Optional[OperatorMode] = None, workers: int = 1) -> float:
    """Order-p variant: exponent (p+1)/p on the operator norm."""
    return estimate_q_rho(problem, z_star, (p + 1) / p, n_samples, seed, mode, workers)


def check_rho_threshold(rho: float, p: int, Lp: float) -> bool:
    """rho <= (15/16) (p!/L_p)^((p+1)/p), the convergence-theorem condition."""
    if not Lp > 0:
        raise ValueError("Lp must be positive")
    return rho <= (15.0 / 16.0) * (math.factorial(p) / Lp) ** ((p + 1) / p)


def estimate_smoothness(problem: ProblemSpec, p: int, n_pairs: int, seed: int,
                        fd_step: float = 1e-5) -> float:
    """Sampled L_p: p! times the sup of ||F(z_b) - tau(z_b, z_a)|| / ||z_b - z_a||^p."""
    a, b = sample_pairs(problem.sample_box, n_pairs, seed)
    best = 0.0
    for z_a, z_b in zip(a, b):
        gap = float(np.linalg.norm(z_b - z_a))
        if gap < 1e-12:
            continue
        model = taylor_model(problem, z_a, p, 0.0, fd_step)
        err = float(np.linalg.norm(eval_operator(problem, z_b) - tau(model, z_b)))
        best = max(best, err / gap**p)
    return math.factorial(p) * best


def estimate_comonotonicity(problem: ProblemSpec, n_pairs: int, seed: int) -> float:
    """Largest c with <F(a)-F(b), a-b> >= c ||F(a)-F(b)||^2 on sampled pairs."""
    a, b = sample_pairs(problem.sample_box, n_pairs, seed)
    worst = np.inf
    for z_a, z_b in zip(a, b):
        dF = eval_operator(problem, z_a) - eval_operator(problem, z_b)
        denom = float(np.sum(dF * dF))
        if denom < SKIP_NORM**2:
            continue
        worst = min(worst, float(np.sum(dF * (z_a - z_b))) / denom)
    if not np.isfinite(worst):
        raise DegenerateSampleError("no pair produced a usable field difference")
    return worst


@dataclass(frozen=True)
class CertReport:
    problem: str
    p: int
    q: float
    rho_hat_p: float
    rho_hat_q: float
    comono_hat: float
    L_hat: dict
    threshold_ok: bool
    threshold_Lp: float
    samples_used: int
    worst_violator: Optional[np.ndarray]
    rate_slope: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "problem": self.problem,
            "p": self.p,
            "q": self.q,
            "rho_hat_p": self.rho_hat_p,
            "rho_hat_q": self.rho_hat_q,
            "comono_hat": self.comono_hat,
            "L_hat": {str(k): v for k, v in self.L_hat.items()},
            "threshold_ok": self.threshold_ok,
            "threshold_Lp": self.threshold_Lp,
            "samples_used": self.samples_used,
            "worst_violator": None if self.worst_violator is None else list(self.worst_violator),
            "rate_slope": self.rate_slope,
        }


def certify_problem(problem: ProblemSpec, p: int, q: Optional[float] = None,
                    mode: Optional[OperatorMode] = None, n_samples: int = 10000,
                    seed: int = 0, workers: int = 1,
                    rate_slope: Optional[float] = None) -> CertReport:
    """Estimate the assumption constants of a problem and check the rho threshold."""
    if problem.z_star is None:
        raise ValueError(f"{problem.name!r} has no known stationary point to certify against")
    if q is None:
        q = (p + 1) / p
    scan_p = _rho_scan(problem, problem.z_star, (p + 1) / p, n_samples, seed, mode, workers)
    scan_q = _rho_scan(problem, problem.z_star, q, n_samples, seed, mode, workers)
    L_hat = {1: estimate_smoothness(problem, 1, max(200, n_samples // 10), seed)}
    if problem.operator_jacobian is not None:
        L_hat[2] = estimate_smoothness(problem, 2, max(200, n_samples // 10), seed)
    Lp = problem.published_constants.get(p, L_hat.get(p))
    if Lp is None:
        raise ValueError(f"no L_{p} available for {problem.name!r}")
    return CertReport(
        problem=problem.name,
        p=p,
        q=q,
        rho_hat_p=scan_p.value,
        rho_hat_q=scan_q.value,
        comono_hat=estimate_comonotonicity(problem, max(200, n_samples // 10), seed),
        L_hat=L_hat,
        threshold_ok=check_rho_threshold(scan_p.value, p, Lp),
        threshold_Lp=float(Lp),
        samples_used=scan_p.samples_used,
        worst_violator=scan_p.worst_violator,
        rate_slope=rate_slope,
    )


def fit_rate(log: TrajectoryLog) -> float:
    """Log-log slope of the running minimum of ||F(z_half)||^2 over the run's second half."""
    if len(log.records) < 20:
        raise ValueError("need at least 20 records to fit a rate")
    norms_sq = np.array([rec.op_norm_half for rec in log.records]) ** 2
    running_min = np.minimum.accumulate(norms_sq)
    if np.any(running_min == 0.0):
        cutoff = int(np.argmax(running_min == 0.0))
        running_min = running_min[:cutoff]
        if len(running_min) < 4:
            raise ValueError("operator norm hit zero too early to fit a rate")
    k = np.arange(len(running_min))
    half = len(running_min) // 2
    slope, _ = np.polyfit(np.log(k[half:] + 1.0), np.log(running_min[half:]), 1)
    return float(slope)


@dataclass(frozen=True)
class PrefixReport:
    ok: bool
    first_violation_k: Optional[int]
    min_margin: float
    slack: float


def check_potential_inequality(problem: ProblemSpec, log: TrajectoryLog, z_star,
                               p: int, Lp: float, mode: Optional[OperatorMode] = None,
                               slack: Optional[float] = None) -> PrefixReport:
    """Check the telescoped step-energy inequality at every prefix of a run.

    For each K the weighted sum of <F(z_half), z_half - z*> must stay below
    ||z* - z0||^2 - POTENTIAL_COEF * sum of squared displacements.
    """
    z_star = np.asarray(z_star, dtype=float)
    operator = _operator_fn(problem, mode)
    if not log.records:
        return PrefixReport(True, None, math.inf, 0.0)
    z0 = log.records[0].z
    budget = float(np.sum((z_star - z0) ** 2))
    if slack is None:
        slack = 1e-8 * (1.0 + budget)
    coef = math.factorial(p) / Lp
    lhs = 0.0
    disp_sq = 0.0
    min_margin = math.inf
    first_violation = None
    for rec in log.records:
        F_half = operator(rec.z_half)
        lhs += rec.lambda_k * coef * float(np.sum(F_half * (rec.z_half - z_star)))
        disp_sq += rec.displacement_norm**2
        margin = (budget - POTENTIAL_COEF * disp_sq) - lhs
        if margin < min_margin:
            min_margin = margin
        if margin < -slack and first_violation is None:
            first_violation = rec.k
    return PrefixReport(first_violation is None, first_violation, min_margin, slack)


def check_half_step_norm_bound(log: TrajectoryLog, p: int, Lp: float,
                               slack: float = 1e-8) -> PrefixReport:
    """Check ||F(z_half)|| <= (3 L_p / p!) r^p at every recorded iterate."""
    coef = 3.0 * Lp / math.factorial(p)
    min_margin = math.inf
    first_violation = None
    for rec in log.records:
        bound = coef * rec.displacement_norm**p
        margin = bound - rec.op_norm_half
        if margin < min_margin:
            min_margin = margin
        if margin < -slack * max(1.0, bound) and first_violation is None:
            first_violation = rec.k
    return PrefixReport(first_violation is None, first_violation, min_margin, slack)


def decoupled_threshold_report(problem: ProblemSpec, log: TrajectoryLog, p: int, q: float,
                               Lp: float, L1: float, n_samples: int = 10000, seed: int = 0,
                               mode: Optional[OperatorMode] = None) -> dict:
    """Certify the decoupled-exponent condition against a finished run.

    The trajectory constant is D = max_k L1 ||z_half - z*||; the threshold is
    read as (15/16) * D^((p+1)/p - q) * (p!/Lp)^((p+1)/p).  The grouping of
    the D factors is ambiguous in its source; this reading matches the
    constant used by the balanced case and is flagged in the report.
    """
    if problem.z_star is None:
        raise ValueError("need a stationary point for the decoupled certificate")
    z_star = problem.z_star
    D = max(L1 * float(np.linalg.norm(rec.z_half - z_star)) for rec in log.records)
    rho_q = estimate_q_rho(problem, z_star, q, n_samples, seed, mode)
    exponent = (p + 1) / p
    threshold = (15.0 / 16.0) * D ** (exponent - q) * (math.factorial(p) / Lp) ** exponent
    return {
        "D": D,
        "q": q,
        "rho_hat_q": rho_q,
        "threshold": threshold,
        "ok": bool(rho_q <= threshold),
        "threshold_reading": "(15/16) * D**((p+1)/p - q) * (p!/Lp)**((p+1)/p)",
        "note": "threshold grouping is one of several readings of the stated condition",
    }
