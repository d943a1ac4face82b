"""Predictor-corrector tracking of parameter homotopies.

Parameters move along p(t) = p_a + t (p_b − p_a) on each leg of the route
p_start -> p_mid -> p_end, with p_mid a random complex detour point shared by
every path of one call. All paths advance together as one batch, each with
its own t and step size; finished or failed rows drop out of the active mask.
"""

import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from src.errors import NoConvergence, SingularJacobian
from src.polysys import ParametricSystem
from src.tracker.settings import PathStatus, TrackResult, TrackSettings

logger = logging.getLogger(__name__)

SINGULAR_CONDITION = 1e14


def _solve(jac: np.ndarray, rhs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Batched J⁻¹ b with a mask of the rows that could be solved."""
    try:
        sol = np.linalg.solve(jac, rhs[..., None])[..., 0]
        return sol, np.all(np.isfinite(sol), axis=-1)
    except np.linalg.LinAlgError:
        pass
    sol = np.zeros_like(rhs)
    ok = np.zeros(rhs.shape[0], dtype=bool)
    for b in range(rhs.shape[0]):
        try:
            sol[b] = np.linalg.solve(jac[b], rhs[b])
        except np.linalg.LinAlgError:
            continue
        ok[b] = np.all(np.isfinite(sol[b]))
    return sol, ok


def _max_abs(values: np.ndarray) -> np.ndarray:
    return np.max(np.abs(values), axis=-1, initial=0.0)


def newton_correct(
    system: ParametricSystem, x0, p, tol: float = 1e-10, max_iters: int = 8
) -> np.ndarray:
    """Newton's method at fixed parameters until ‖g(x; p)‖∞ < tol."""
    x = np.array(x0, dtype=complex)
    for k in range(max_iters + 1):
        f, jx, _ = system.evaluate_all(x, p, want_jp=False)
        if _max_abs(f) < tol:
            return x
        if k == max_iters:
            break
        cond = np.linalg.cond(jx)
        if not np.isfinite(cond) or cond > SINGULAR_CONDITION:
            raise SingularJacobian(f"Jacobian condition number {cond:.3e} at Newton step {k}")
        x = x - np.linalg.solve(jx, f)
    raise NoConvergence(f"residual {_max_abs(f):.3e} after {max_iters} Newton steps")


def refine_batch(
    system: ParametricSystem, x: np.ndarray, p, tol: float = 1e-10, max_iters: int = 8
) -> tuple[np.ndarray, np.ndarray]:
    """Masked Newton over a batch; returns refined points and their residuals."""
    x = np.array(x, dtype=complex)
    residual = np.full(x.shape[0], np.inf)
    active = np.ones(x.shape[0], dtype=bool)
    p = np.asarray(p, dtype=complex)
    for k in range(max_iters + 1):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        pa = p if p.ndim == 1 else p[idx]
        f, jx, _ = system.evaluate_all(x[idx], pa, want_jp=False)
        residual[idx] = _max_abs(f)
        done = residual[idx] < tol
        active[idx[done]] = False
        if k == max_iters:
            break
        step, ok = _solve(jx[~done], f[~done])
        moving = idx[~done]
        x[moving[ok]] -= step[ok]
        active[moving[~ok]] = False
    return x, residual


def detour_point(p_start, p_end, scale: float, rng: np.random.Generator) -> np.ndarray:
    p_start = np.asarray(p_start, dtype=complex)
    p_end = np.asarray(p_end, dtype=complex)
    length = max(float(_max_abs(p_end - p_start)), np.finfo(float).eps)
    offset = (rng.normal(size=p_start.shape) + 1j * rng.normal(size=p_start.shape)) / np.sqrt(2)
    return 0.5 * (p_start + p_end) + scale * length * offset


def _correct(system, x, p, settings: TrackSettings) -> tuple[np.ndarray, np.ndarray]:
    ok = np.ones(x.shape[0], dtype=bool)
    converged = np.zeros(x.shape[0], dtype=bool)
    previous = np.full(x.shape[0], np.inf)
    for _ in range(settings.corrector_iters):
        f, jx, _ = system.evaluate_all(x, p, want_jp=False)
        step, solved = _solve(jx, f)
        step[~solved] = 0
        norm = _max_abs(step)
        x = x - step
        converged = norm <= settings.corrector_tol * (1 + _max_abs(x))
        ok &= solved & ((norm <= 0.5 * previous) | converged)
        previous = norm
        if np.all(converged | ~ok):
            break
    return x, ok & converged


def _track_segment(system, x, p_a, p_b, settings: TrackSettings, steps: np.ndarray):
    """Advance every row from t = 0 to 1; returns endpoints and per-row failure status."""
    batch = x.shape[0]
    x = np.array(x, dtype=complex)
    dp = p_b - p_a
    t = np.zeros(batch)
    h = np.full(batch, settings.initial_step)
    streak = np.zeros(batch, dtype=np.int64)
    status = np.full(batch, None, dtype=object)
    active = np.ones(batch, dtype=bool)

    while active.any():
        exhausted = active & (steps >= settings.max_steps)
        status[exhausted] = PathStatus.STEP_LIMIT
        active &= ~exhausted
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break

        ta, ha = t[idx], h[idx]
        last = ha >= 1 - ta
        tn = np.where(last, 1.0, ta + ha)
        _, jx, jp = system.evaluate_all(x[idx], p_a + ta[:, None] * dp)
        velocity, solved = _solve(jx, -(jp @ dp))
        predicted = x[idx] + (tn - ta)[:, None] * velocity
        corrected, converged = _correct(system, predicted, p_a + tn[:, None] * dp, settings)
        good = solved & converged
        steps[idx] += 1

        won = idx[good]
        x[won] = corrected[good]
        t[won] = tn[good]
        streak[won] += 1
        grow = won[streak[won] >= settings.growth_after]
        h[grow] = np.minimum(h[grow] * settings.step_growth, settings.max_step)
        streak[grow] = 0

        lost = idx[~good]
        h[lost] *= settings.step_shrink
        streak[lost] = 0
        stuck = lost[h[lost] < settings.min_step]
        status[stuck] = PathStatus.SINGULAR
        active[stuck] = False

        far = won[_max_abs(x[won]) > settings.divergence_bound]
        status[far] = PathStatus.DIVERGED
        active[far] = False
        active[won[t[won] >= 1.0]] = False
    return x, status


def _pending(status: np.ndarray) -> np.ndarray:
    return np.flatnonzero([s is None for s in status])


def _track_batch(system, starts, p_start, p_mid, p_end, settings: TrackSettings):
    batch = starts.shape[0]
    steps = np.zeros(batch, dtype=np.int64)
    status = np.full(batch, None, dtype=object)
    x = np.array(starts, dtype=complex)

    if p_mid is None:
        legs = []
    else:
        legs = [(p_start, p_mid), (p_mid, p_end)]
    for p_a, p_b in legs:
        idx = _pending(status)
        if idx.size == 0:
            break
        leg_steps = steps[idx]
        x[idx], leg_status = _track_segment(system, x[idx], p_a, p_b, settings, leg_steps)
        steps[idx] = leg_steps
        status[idx] = leg_status

    idx = _pending(status)
    residual = np.full(batch, np.inf)
    if idx.size:
        x[idx], residual[idx] = refine_batch(
            system, x[idx], p_end, settings.newton_tol, settings.max_newton_iters
        )
        ok = residual[idx] < settings.newton_tol
        status[idx[ok]] = PathStatus.SUCCESS
        status[idx[~ok]] = PathStatus.SINGULAR

    failed = np.flatnonzero([s is not PathStatus.SUCCESS for s in status])
    if failed.size:
        f = system.evaluate(x[failed], p_end)
        residual[failed] = np.where(np.isfinite(_max_abs(f)), _max_abs(f), np.inf)
    return [
        TrackResult(
            status=status[b],
            endpoint=x[b],
            residual=float(residual[b]),
            steps_taken=int(steps[b]),
        )
        for b in range(batch)
    ]


def track_all(
    system: ParametricSystem,
    starts,
    p_start,
    p_end,
    settings: TrackSettings | None = None,
    threads: int = 1,
    p_mid=None,
    rng: np.random.Generator | None = None,
) -> list[TrackResult]:
    """Track every start from p_start to p_end; results follow the order of ``starts``."""
    settings = settings or TrackSettings()
    starts = np.asarray(starts, dtype=complex).reshape(-1, system.n_unknowns)
    if starts.shape[0] == 0:
        return []
    p_start = np.asarray(p_start, dtype=complex)
    p_end = np.asarray(p_end, dtype=complex)
    if np.array_equal(p_start, p_end):
        p_mid = None
    elif p_mid is None:
        rng = rng or np.random.default_rng(settings.seed)
        p_mid = detour_point(p_start, p_end, settings.detour_scale, rng)

    def run(rows: np.ndarray) -> list[TrackResult]:
        return _track_batch(system, starts[rows], p_start, p_mid, p_end, settings)

    rows_all = np.arange(starts.shape[0])
    chunks = [rows for rows in np.array_split(rows_all, max(threads, 1)) if rows.size]
    if len(chunks) == 1:
        results = run(chunks[0])
    else:
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            results = [r for part in pool.map(run, chunks) for r in part]

    counts = {}
    for r in results:
        counts[r.status.value] = counts.get(r.status.value, 0) + 1
    logger.debug(f"Tracked {len(results)} paths: {counts}")
    return results


def track_path(
    system: ParametricSystem,
    x_start,
    p_start,
    p_end,
    settings: TrackSettings | None = None,
    p_mid=None,
) -> TrackResult:
    return track_all(system, [x_start], p_start, p_end, settings, p_mid=p_mid)[0]
