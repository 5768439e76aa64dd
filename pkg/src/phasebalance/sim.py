"""
Closed-loop simulation of N unit-speed unicycles under the balancing law.

Integration is classical fixed-step RK4 over the coupled system; the control
is re-evaluated from the full stage state of every agent at each of the four
stages. Headings are carried unwrapped.
"""

import math
import time as _time
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .control import BARRIER_GUARD, BoundaryViolation, ControlGains, evaluate_all
from .curve import CurveSpec, perimeter, position_error
from .interpolant import build_sigma_interpolant

__all__ = [
    "AgentState",
    "Scenario",
    "TrajectoryLog",
    "ClosedLoop",
    "validate",
    "derivative",
    "step",
    "run",
    "order_parameter",
    "pairwise_phase_gaps",
    "SIGMA_MODES",
]

SIGMA_MODES = ("direct", "interpolated")


class AgentState(NamedTuple):
    x: float
    y: float
    theta: float


@dataclass(frozen=True)
class Scenario:
    curve: CurveSpec
    gains: ControlGains
    agents: tuple
    dt: float = 1e-3
    t_final: float = 100.0
    speed: float = 1.0
    sigma_mode: str = "direct"
    log_decimation: int = 10
    grid_size: int = 1024

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(AgentState(*map(float, a)) for a in self.agents))

    @property
    def n_agents(self):
        return len(self.agents)

    @property
    def n_steps(self):
        return int(round(self.t_final / self.dt))


def validate(scenario):
    """List every problem with ``scenario``; an empty list means it can run.

    Checks gains, timing, speed, and the initial feasibility |e_k(0)| < delta.
    """
    problems = []
    g = scenario.gains
    for name, value in (("gains.kc", g.kc), ("gains.k", g.k_coupling), ("gains.delta", g.delta)):
        if not (math.isfinite(value) and value > 0):
            problems.append(f"{name} must be > 0 (got {value})")
    if not (math.isfinite(scenario.dt) and scenario.dt > 0):
        problems.append(f"sim.dt must be > 0 (got {scenario.dt})")
    elif not (math.isfinite(scenario.t_final) and scenario.t_final > scenario.dt):
        problems.append(f"sim.t_final must exceed sim.dt (got {scenario.t_final})")
    if scenario.speed != 1.0:
        problems.append(f"speed must be 1.0 (got {scenario.speed})")
    if scenario.sigma_mode not in SIGMA_MODES:
        problems.append(f"sim.sigma_mode must be one of {SIGMA_MODES} (got {scenario.sigma_mode!r})")
    if int(scenario.log_decimation) < 1:
        problems.append(f"sim.log_decimation must be >= 1 (got {scenario.log_decimation})")
    if not scenario.agents:
        problems.append("at least one agent is required")
    for k, agent in enumerate(scenario.agents):
        if not all(math.isfinite(v) for v in agent):
            problems.append(f"agent {k}: non-finite state {tuple(agent)}")
            continue
        e = math.hypot(*position_error(scenario.curve, agent))
        if g.delta > 0 and not e < g.delta:
            problems.append(f"agent {k}: |e(0)| = {e:.12g} is not < delta = {g.delta:.12g}")
    return problems


def initial_errors(scenario):
    """|e_k(0)| for each agent."""
    return [math.hypot(*position_error(scenario.curve, a)) for a in scenario.agents]


def derivative(state, u, speed=1.0):
    """Unicycle kinematics: (speed cos theta, speed sin theta, u)."""
    theta = state[2]
    return (speed * math.cos(theta), speed * math.sin(theta), u)


class ClosedLoop:
    """Curve, gains and arc-length backend bundled for repeated evaluation."""

    def __init__(self, curve, gains, speed=1.0, interpolant=None):
        self.curve = curve
        self.gains = gains
        self.speed = speed
        self.interpolant = interpolant
        self.gamma = perimeter(curve)

    @classmethod
    def from_scenario(cls, scenario):
        interp = None
        if scenario.sigma_mode == "interpolated" and not scenario.curve.is_circle:
            interp = build_sigma_interpolant(scenario.curve, scenario.grid_size)
        return cls(scenario.curve, scenario.gains, scenario.speed, interp)

    def controls(self, states):
        return evaluate_all(self.curve, states, self.gains, self.interpolant, self.gamma)

    def rates(self, states, outputs=None):
        if outputs is None:
            outputs = self.controls(states)
        v = self.speed
        return [(v * math.cos(s[2]), v * math.sin(s[2]), o.u) for s, o in zip(states, outputs)]


def _axpy(states, rates, h):
    return [(s[0] + h * r[0], s[1] + h * r[1], s[2] + h * r[2]) for s, r in zip(states, rates)]


def step(loop, states, dt, time=None, k1_outputs=None):
    """Advance all agents one RK4 step.

    Parameters
    ----------
    loop : ClosedLoop
    states : sequence of (x, y, theta)
    dt : float
    time : float, optional
        Only used to label a :class:`BoundaryViolation`.
    k1_outputs : list of ControlOutput, optional
        Control already evaluated at ``states`` (saves one evaluation).

    Raises
    ------
    BoundaryViolation
        Tagged with the failing stage (1-4) and time.
    """
    stage = 1
    try:
        k1 = loop.rates(states, k1_outputs)
        stage = 2
        k2 = loop.rates(_axpy(states, k1, 0.5 * dt))
        stage = 3
        k3 = loop.rates(_axpy(states, k2, 0.5 * dt))
        stage = 4
        k4 = loop.rates(_axpy(states, k3, dt))
    except BoundaryViolation as exc:
        raise exc.located(stage, time) from None
    w = dt / 6.0
    return [
        (
            s[0] + w * (a[0] + 2.0 * b[0] + 2.0 * c[0] + d[0]),
            s[1] + w * (a[1] + 2.0 * b[1] + 2.0 * c[1] + d[1]),
            s[2] + w * (a[2] + 2.0 * b[2] + 2.0 * c[2] + d[2]),
        )
        for s, a, b, c, d in zip(states, k1, k2, k3, k4)
    ]


def order_parameter(psis):
    """|mean(exp(i psi))|: 0 when balanced, 1 when synchronised."""
    psis = np.asarray(psis, dtype=float)
    if psis.size == 0:
        raise ValueError("order parameter of an empty set")
    return float(abs(np.mean(np.exp(1j * psis))))


def pairwise_phase_gaps(psis):
    """Gaps between circularly neighbouring phases (sorted), summing to 2 pi."""
    p = np.sort(np.mod(np.asarray(psis, dtype=float), 2.0 * math.pi))
    return np.diff(np.append(p, p[0] + 2.0 * math.pi))


@dataclass
class TrajectoryLog:
    """Logged trajectory; per-agent arrays have shape (rows, N).

    ``failure`` holds the :class:`BoundaryViolation` that stopped an aborted
    run, in which case the arrays cover only the steps reached.
    """

    time: np.ndarray
    x: np.ndarray
    y: np.ndarray
    theta: np.ndarray
    u: np.ndarray
    zeta: np.ndarray
    e_norm: np.ndarray
    psi: np.ndarray
    order_parameter: np.ndarray
    min_margin: np.ndarray
    run_min_margin: float
    gains: ControlGains
    failure: BoundaryViolation = None
    wall_time: float = field(default=0.0, compare=False)

    COLUMNS = ("time", "agent", "x", "y", "theta", "u", "zeta", "e_norm", "psi")

    @property
    def ok(self):
        return self.failure is None

    @property
    def n_agents(self):
        return self.x.shape[1]

    def rows(self):
        """Rows in CSV column order, one per agent per logged step."""
        for i, t in enumerate(self.time):
            for k in range(self.n_agents):
                yield (t, k, self.x[i, k], self.y[i, k], self.theta[i, k],
                       self.u[i, k], self.zeta[i, k], self.e_norm[i, k], self.psi[i, k])

    def window(self, seconds):
        """Boolean row mask for the last ``seconds`` of logged time."""
        return self.time >= self.time[-1] - seconds - 1e-9

    def mean_turn_rate(self, seconds=10.0):
        return self.u[self.window(seconds)].mean(axis=0)

    def summary(self):
        w = self.window(10.0)
        return {
            "ok": self.ok,
            "failure": None if self.ok else str(self.failure),
            "final_time": float(self.time[-1]) if len(self.time) else 0.0,
            "final_order_parameter": float(self.order_parameter[-1]) if len(self.time) else None,
            "final_max_e_norm": float(self.e_norm[-1].max()) if len(self.time) else None,
            "max_e_norm": float(self.e_norm.max()) if len(self.time) else None,
            "min_margin": float(self.run_min_margin),
            "mean_u_last_10s": self.u[w].mean(axis=0).tolist() if len(self.time) else None,
            "max_abs_zeta_last_10s": float(np.abs(self.zeta[w]).max()) if len(self.time) else None,
            "final_phase_gaps": pairwise_phase_gaps(self.psi[-1]).tolist() if len(self.time) else None,
            "wall_time_s": self.wall_time,
            "gains": {"kc": self.gains.kc, "k": self.gains.k_coupling, "delta": self.gains.delta},
        }


def run(scenario, log_decimation=None):
    """Integrate ``scenario`` to t_final.

    Never raises on a barrier violation: the returned log is cut at the last
    completed step and carries the violation in ``failure``. Identical
    scenarios give bit-identical logs.
    """
    problems = validate(scenario)
    if problems:
        raise ValueError("invalid scenario: " + "; ".join(problems))
    start = _time.perf_counter()
    dec = int(scenario.log_decimation if log_decimation is None else log_decimation)
    loop = ClosedLoop.from_scenario(scenario)
    dt = scenario.dt
    n_steps = scenario.n_steps
    n = scenario.n_agents
    rows = n_steps // dec + 1
    delta2 = scenario.gains.delta ** 2

    buf = {name: np.empty((rows, n)) for name in ("x", "y", "theta", "u", "zeta", "e_norm", "psi")}
    time = np.empty(rows)
    order = np.empty(rows)
    margin_log = np.empty(rows)
    run_min = math.inf

    states = [tuple(a) for a in scenario.agents]
    failure = None
    row = 0
    for i in range(n_steps + 1):
        t = i * dt
        try:
            outputs = loop.controls(states)
        except BoundaryViolation as exc:
            failure = exc.located(1 if i < n_steps else "final", t)
            break
        margin = delta2 - max(o.e_norm for o in outputs) ** 2
        run_min = min(run_min, margin)
        if i % dec == 0:
            time[row] = t
            for k, (s, o) in enumerate(zip(states, outputs)):
                buf["x"][row, k], buf["y"][row, k], buf["theta"][row, k] = s
                buf["u"][row, k] = o.u
                buf["zeta"][row, k] = o.zeta
                buf["e_norm"][row, k] = o.e_norm
                buf["psi"][row, k] = o.psi
            order[row] = order_parameter([o.psi for o in outputs])
            margin_log[row] = margin
            row += 1
        if i == n_steps:
            break
        try:
            states = step(loop, states, dt, t, outputs)
        except BoundaryViolation as exc:
            failure = exc
            break

    return TrajectoryLog(
        time=time[:row],
        order_parameter=order[:row],
        min_margin=margin_log[:row],
        run_min_margin=run_min,
        gains=scenario.gains,
        failure=failure,
        wall_time=_time.perf_counter() - start,
        **{k: v[:row] for k, v in buf.items()},
    )
