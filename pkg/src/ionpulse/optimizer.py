"""FM pattern optimization and drive-power calibration.

The optimizer adjusts the free turning points of the FM pattern to minimize
the summed squared time-averaged displacements of the modes nearest the
drive frequency, which closes their trajectories and removes the first-order
sensitivity to constant frequency offsets. A derivative-free compass search
polls each coordinate in both directions with a shrinking step; no gradients
are needed and runs are deterministic for a fixed seed.

Power calibration exploits that the entangling angle is exactly quadratic in
the peak Rabi frequency: the amplitude that yields |beta| = pi/4 follows from
a single reference evaluation.
"""

from dataclasses import dataclass, replace

import numpy as np

from .pulse import PulseSchedule, amplitude, drive_frequency, with_amplitude
from .quadrature import cumulative_simpson, simpson_weights
from .trajectory import (
    DEFAULT_ALPHA_INTERVALS,
    DEFAULT_BETA_INTERVALS,
    entangling_angle,
    integrate_alpha,
    motional_error,
)

REFERENCE_RABI = 2 * np.pi * 100e3  # rad/s, fixed amplitude used inside the cost
INITIAL_STEP = 2 * np.pi * 500.0  # rad/s, first polling step
STEP_FLOOR = 2 * np.pi * 1e-3  # rad/s, search stops once the step shrinks below this
FM_BOUND = 2 * np.pi * 10e3  # rad/s, polling never leaves the schedule sanity bound
DEGENERATE_BETA = 1e-12  # rad, below this the pair is treated as uncoupled


class BudgetExhausted(Exception):
    """The evaluation budget ran out before the search stalled."""

    def __init__(self, message, best_fm_points=None, best_cost=None):
        super().__init__(message)
        self.best_fm_points = best_fm_points
        self.best_cost = best_cost


class DegeneratePair(Exception):
    """|beta| at the reference amplitude is numerically zero for this pair."""


@dataclass(frozen=True)
class OptimizationProblem:
    """Inputs of one FM optimization run.

    target_modes are 1-based mode indices; None selects the modes nearest the
    schedule's reference frequency (10 by default). The seed only matters
    when n_starts > 1, where extra starts jitter the initial turning points.
    """

    base_schedule: PulseSchedule
    modes: object  # ModeData
    ion_pair: tuple
    target_modes: tuple = None
    max_evals: int = 120_000
    seed: int = 0
    n_starts: int = 3
    n_intervals: int = DEFAULT_ALPHA_INTERVALS
    reference_amplitude: float = REFERENCE_RABI  # rad/s, cost is evaluated here

    def __post_init__(self):
        i, j = self.ion_pair
        n = self.modes.n_modes
        if not (1 <= i <= n and 1 <= j <= n) or i == j:
            raise ValueError(f"ion_pair must be two distinct indices in 1..{n}")
        if self.target_modes is not None:
            targets = tuple(int(k) for k in self.target_modes)
            if not targets or any(not 1 <= k <= n for k in targets):
                raise ValueError(f"target_modes must be non-empty indices in 1..{n}")
            object.__setattr__(self, "target_modes", targets)
        if self.max_evals < 1:
            raise ValueError("max_evals must be positive")
        if self.n_starts < 1:
            raise ValueError("n_starts must be >= 1")


def nearest_modes(modes, mu_ref, count=10):
    """1-based indices of the `count` modes closest in frequency to mu_ref."""
    order = np.argsort(np.abs(modes.frequencies - mu_ref))[:count]
    return tuple(sorted(int(k) + 1 for k in order))


def default_mu_ref(modes, mode=None, offset=-2 * np.pi * 3.7e3):
    """Reference drive frequency: the chosen mode's frequency plus offset (rad/s).

    When mode is None the most spatially uniform mode is used (the
    wavelength-four standing wave on the default 50-ion chain), since every
    ion couples to it comparably and any pair can be entangled through it.
    """
    from .modes import most_uniform_mode

    if mode is None:
        mode = most_uniform_mode(modes)
    return float(modes.frequencies[mode - 1] + offset)


def resolve_target_modes(problem):
    """The problem's target modes, defaulting to the 10 nearest the drive."""
    if problem.target_modes is not None:
        return problem.target_modes
    count = min(10, problem.modes.n_modes)
    return nearest_modes(problem.modes, problem.base_schedule.mu_ref, count)


class _Objective:
    """Precomputed cost evaluator: everything reusable across fm polls.

    The amplitude envelope and the per-mode phase ramps exp(-i omega_k t) do
    not depend on the turning points, so each evaluation only rebuilds the
    drive phase and takes two weighted sums per target mode.
    """

    def __init__(self, problem):
        sched = with_amplitude(problem.base_schedule, problem.reference_amplitude)
        self.schedule = sched
        self.targets = resolve_target_modes(problem)
        tau = sched.gate_time
        n = problem.n_intervals
        self.t = np.linspace(0.0, tau, n + 1)
        self.dx = self.t[1] - self.t[0]
        w_end = simpson_weights(n + 1, self.dx)
        self.w_avg = w_end * (1.0 - self.t / tau)
        self.envelope = amplitude(self.t, sched)
        idx = np.array([k - 1 for k in self.targets])
        omegas = problem.modes.frequencies[idx]
        self.phase_ramps = np.exp(-1j * np.outer(omegas, self.t))
        i, j = problem.ion_pair
        eta = problem.modes.eta
        self.weights = eta[i - 1, idx] ** 2 + eta[j - 1, idx] ** 2

    def __call__(self, fm_points):
        sched = replace(self.schedule, fm_points=fm_points)
        mu_phase = cumulative_simpson(drive_frequency(self.t, sched), self.dx)
        g = self.phase_ramps * (self.envelope * np.exp(1j * mu_phase))[None, :]
        averages = g @ self.w_avg
        return float(np.sum(self.weights * np.abs(averages) ** 2))


def cost(problem, fm_points):
    """Summed squared time-averaged displacements of the target modes.

    Both addressed ions' Lamb-Dicke couplings weight each mode; the amplitude
    is pinned to the problem's reference (REFERENCE_RABI by default, so
    values are comparable across problems and calibration happens after
    optimization). Evaluated through the order-swapped single integral,
    which agrees with composing integrate_alpha and
    time_averaged_displacement to quadrature accuracy.
    """
    fm = np.asarray(fm_points, dtype=float)
    if fm.shape != (problem.base_schedule.n_oscillations,):
        raise ValueError(
            f"fm_points must hold {problem.base_schedule.n_oscillations} values"
        )
    return _Objective(problem)(fm)


POLISH_STEP = 2 * np.pi * 50.0  # rad/s, final local-minimality scale


def _compass_search(objective, x0, budget, callback, eval_offset, initial_step=None):
    """Coordinate polling with expansion and a shrinking step.

    Polls both directions of every coordinate, moves to the better improving
    candidate and keeps stepping in the winning direction while each step
    still pays at least 0.1% (long marginal glides stall the search in
    near-flat valleys otherwise). The step halves when a full cycle fails to
    improve, or after eight consecutive cycles that each improve by less
    than 1% (enough to harvest cross-coordinate couplings, few enough to
    abandon endless valley glides). The search stops when the step falls
    below STEP_FLOOR, a fine-step cycle's relative improvement drops under
    1e-10, or the cost sits twelve orders of magnitude below its starting
    value.
    """
    x = x0.copy()
    evals = 0

    def f(point):
        nonlocal evals
        value = objective(point)
        evals += 1
        if callback is not None:
            callback(eval_offset + evals, value, point.copy())
        return value

    fx = f(x)
    start_cost = fx
    step = INITIAL_STEP if initial_step is None else initial_step
    converged = False
    slow_cycles = 0
    while True:
        if fx <= 1e-12 * start_cost:
            converged = True
            break
        if evals + 2 * len(x) > budget:
            break  # cannot complete another full polling cycle
        cycle_start = fx
        moved = False
        exhausted = False
        for d in range(len(x)):
            best = None
            for sign in (1.0, -1.0):
                if evals >= budget:
                    exhausted = True
                    break
                v = float(np.clip(x[d] + sign * step, -FM_BOUND, FM_BOUND))
                if v == x[d]:
                    continue
                trial = x.copy()
                trial[d] = v
                ft = f(trial)
                if ft < fx and (best is None or ft < best[1]):
                    best = (sign, ft, v)
            if best is None:
                if exhausted:
                    break
                continue
            sign, fx, x[d] = best[0], best[1], best[2]
            moved = True
            while evals < budget:
                v = float(np.clip(x[d] + sign * step, -FM_BOUND, FM_BOUND))
                if v == x[d]:
                    break
                trial = x.copy()
                trial[d] = v
                ft = f(trial)
                if ft > fx * (1.0 - 1e-3):
                    break
                fx, x[d] = ft, v
        if exhausted:
            break
        gain = cycle_start - fx
        relative_gain = gain / cycle_start if cycle_start > 0 else 0.0
        if moved and relative_gain < 1e-10 and step <= 2 * np.pi * 1.0:
            # the stall stop only counts once the step is fine enough that
            # nearby perturbations have genuinely been ruled out
            converged = True
            break
        slow_cycles = slow_cycles + 1 if relative_gain < 1e-2 else 0
        if not moved or slow_cycles >= 8:
            slow_cycles = 0
            step *= 0.5
            if step < STEP_FLOOR:
                converged = True
                break
    return x, fx, evals, converged


def _search_one(objective, x0, budget, callback, eval_offset):
    """Compass cascade plus polish rounds pinning local minimality.

    Coordinate couplings can leave a cascade's endpoint with a small gain
    still available one POLISH_STEP away. Each polish round polls every
    coordinate at that scale; any improvement restarts a fine cascade from
    it, and the search only ends once a full polish poll finds nothing, so
    the returned point is a per-coordinate local minimum at the polish
    scale by construction.
    """
    x, fx, evals, converged = _compass_search(objective, x0, budget, callback, eval_offset)
    for _ in range(10):
        if not converged or evals + 2 * len(x) > budget:
            break
        best = None
        for d in range(len(x)):
            for sign in (1.0, -1.0):
                v = float(np.clip(x[d] + sign * POLISH_STEP, -FM_BOUND, FM_BOUND))
                if v == x[d]:
                    continue
                trial = x.copy()
                trial[d] = v
                ft = objective(trial)
                evals += 1
                if callback is not None:
                    callback(eval_offset + evals, ft, trial.copy())
                if ft < fx and (best is None or ft < best[0]):
                    best = (ft, trial)
        if best is None:
            break
        x2, f2, used, converged = _compass_search(
            objective, best[1], budget - evals, callback, eval_offset + evals,
            initial_step=POLISH_STEP,
        )
        evals += used
        if f2 < fx:
            x, fx = x2, f2
    return x, fx, evals, converged


def optimize(problem, callback=None):
    """Minimize the residual-motion cost over the free FM turning points.

    Runs a deterministic compass search from the flat pattern, plus
    n_starts - 1 seeded jittered restarts, and returns the base schedule with
    the best turning points found (amp_scale untouched). callback, when
    given, receives (eval_index, cost, fm_points) for every evaluation.

    Raises BudgetExhausted when max_evals runs out before every start
    stalls; the exception carries the best point seen.
    """
    objective = _Objective(problem)
    rng = np.random.default_rng(problem.seed)
    n_free = problem.base_schedule.n_oscillations
    starts = [np.zeros(n_free)]
    for _ in range(problem.n_starts - 1):
        jitter = rng.normal(0.0, 2 * np.pi * 1000.0, n_free)
        starts.append(np.clip(jitter, -FM_BOUND, FM_BOUND))

    best_x, best_f = None, np.inf
    used = 0
    all_converged = True
    for x0 in starts:
        x, fx, evals, converged = _search_one(
            objective, x0, problem.max_evals - used, callback, used
        )
        used += evals
        all_converged &= converged
        if fx < best_f:
            best_x, best_f = x, fx
        if used >= problem.max_evals:
            break
    if not all_converged:
        raise BudgetExhausted(
            f"stopped after {used} evaluations at cost {best_f:.3e} without stalling",
            best_fm_points=best_x,
            best_cost=best_f,
        )
    return replace(problem.base_schedule, fm_points=best_x)


def calibrate_power(sched, modes, ion_i, ion_j, n_intervals=DEFAULT_BETA_INTERVALS):
    """Peak Rabi frequency in rad/s that makes |beta_ij| = pi/4.

    beta grows exactly as amp_scale^2, so one evaluation at the schedule's
    current amplitude fixes the answer. Raises DegeneratePair when the pair
    is uncoupled at this drive frequency.
    """
    beta_ref = entangling_angle(sched, modes, ion_i, ion_j, n_intervals)
    if abs(beta_ref) < DEGENERATE_BETA:
        raise DegeneratePair(
            f"|beta| = {abs(beta_ref):.2e} rad at the reference amplitude; "
            f"pair ({ion_i}, {ion_j}) is uncoupled at this drive frequency"
        )
    return float(sched.amp_scale * np.sqrt((np.pi / 4.0) / abs(beta_ref)))


def build_gate_report(sched, modes, ion_i, ion_j, *, single_ion=False,
                      alpha_intervals=DEFAULT_ALPHA_INTERVALS,
                      beta_intervals=DEFAULT_BETA_INTERVALS,
                      include_trajectories=True):
    """Calibrate the pair and assemble the full GateReport.

    The error and the stored per-mode trajectories are evaluated at the
    calibrated amplitude; trajectories carry the first ion's coupling.
    """
    from .trajectory import GateReport

    omega_max = calibrate_power(sched, modes, ion_i, ion_j, beta_intervals)
    calibrated = with_amplitude(sched, omega_max)
    beta = entangling_angle(calibrated, modes, ion_i, ion_j, beta_intervals)
    error = motional_error(
        calibrated, modes, ion_i, ion_j,
        both_ions=not single_ion, n_intervals=alpha_intervals,
    )
    trajectories = ()
    if include_trajectories:
        trajectories = tuple(
            integrate_alpha(
                calibrated,
                modes.eta[ion_i - 1, k],
                modes.frequencies[k],
                n_intervals=alpha_intervals,
                mode=k + 1,
            )
            for k in range(modes.n_modes)
        )
    return GateReport(
        pair=(ion_i, ion_j),
        beta=float(beta),
        motional_error=float(error),
        omega_max=float(omega_max),
        trajectories=trajectories,
    )
