"""
Turn-rate law for trajectory-constrained phase balancing.

    u_k    = kappa(theta_k) (1 + zeta_k)
    zeta_k = Kc <e_k, h_k> / (delta^2 - |e_k|^2) - (K/N) sum_j sin(psi_j - psi_k)

e_k is the agent's offset from its heading-projected curve point, h_k the unit
heading, psi the arc-length curve-phase. The first term is a barrier that pulls
agents onto the curve without letting |e_k| reach delta; the second spreads the
phases apart.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

from .curve import _phase_from_sigma, arc_length_at, curvature, heading_point, perimeter, point_on_curve, project

__all__ = [
    "BoundaryViolation",
    "ControlGains",
    "ControlOutput",
    "ZetaTerms",
    "BARRIER_GUARD",
    "coupling_term",
    "barrier_term",
    "zeta",
    "zeta_circle",
    "turn_rate",
    "curve_phases",
    "evaluate_all",
]

# smallest admissible delta^2 - |e|^2, in m^2
BARRIER_GUARD = 1e-9


class BoundaryViolation(RuntimeError):
    """An agent reached the barrier guard band.

    Attributes ``agent``, ``margin`` (delta^2 - |e|^2) and, when raised inside
    the integrator, ``stage`` and ``time`` identify where it happened.
    """

    def __init__(self, agent, margin, stage=None, time=None):
        self.agent = agent
        self.margin = margin
        self.stage = stage
        self.time = time
        super().__init__(self._describe())

    def _describe(self):
        msg = f"agent {self.agent} at barrier guard: delta^2 - |e|^2 = {self.margin:.3e} < {BARRIER_GUARD:.0e}"
        if self.stage is not None:
            msg += f" (RK4 stage {self.stage}"
            msg += f", t = {self.time:.6f} s)" if self.time is not None else ")"
        return msg

    def located(self, stage, time):
        return BoundaryViolation(self.agent, self.margin, stage, time)


@dataclass(frozen=True)
class ControlGains:
    """Kc (barrier strength), K (coupling strength), delta (boundary width, m).

    Not validated on construction so that ablations such as K = 0 remain
    expressible; :func:`phasebalance.sim.validate` reports non-positive gains.
    """

    kc: float = 1.0
    k_coupling: float = 2.0
    delta: float = 1.0


class ZetaTerms(NamedTuple):
    zeta: float
    barrier_term: float
    coupling_term: float
    e_norm: float


class ControlOutput(NamedTuple):
    u: float
    zeta: float
    barrier_term: float
    coupling_term: float
    e_norm: float
    psi: float


def coupling_term(psis, k, k_coupling):
    """-(K/N) sum_j sin(psi_j - psi_k) for agent ``k``."""
    n = len(psis)
    if not 0 <= k < n:
        raise IndexError(f"agent index {k} out of range for {n} agents")
    pk = psis[k]
    return -k_coupling / n * math.fsum(math.sin(p - pk) for p in psis)


def _barrier(ex, ey, theta, gains, agent):
    e2 = ex * ex + ey * ey
    margin = gains.delta * gains.delta - e2
    if not margin >= BARRIER_GUARD:
        raise BoundaryViolation(agent, margin)
    return gains.kc * (ex * math.cos(theta) + ey * math.sin(theta)) / margin, math.sqrt(e2)


def barrier_term(curve, state, gains, agent=0):
    """Barrier contribution and |e| for one agent.

    Raises
    ------
    BoundaryViolation
        If delta^2 - |e|^2 < BARRIER_GUARD.
    """
    x, y, theta = state[0], state[1], state[2]
    px, py = heading_point(curve, theta)
    return _barrier(x - px, y - py, theta, gains, agent)


def zeta(curve, state, psis, k, gains):
    """Barrier plus coupling term for agent ``k`` (general curve path)."""
    b, e_norm = barrier_term(curve, state, gains, k)
    c = coupling_term(psis, k, gains.k_coupling)
    return ZetaTerms(b + c, b, c, e_norm)


def zeta_circle(r, state, thetas, k, gains):
    """Circle-only form: Kc (x cos th + y sin th)/(delta^2 - |e|^2) - (K/N) sum sin(th_j - th_k).

    On a circle the barrier numerator loses its curve-point terms and the
    curve-phase differences equal heading differences.
    """
    x, y, theta = state[0], state[1], state[2]
    c, s = math.cos(theta), math.sin(theta)
    ex = x - r * s
    ey = y + r * c
    margin = gains.delta * gains.delta - (ex * ex + ey * ey)
    if not margin >= BARRIER_GUARD:
        raise BoundaryViolation(k, margin)
    return gains.kc * (x * c + y * s) / margin + coupling_term(thetas, k, gains.k_coupling)


def curve_phases(curve, thetas, interpolant=None, gamma=None):
    """Curve-phase of each heading."""
    gamma = perimeter(curve) if gamma is None else gamma
    return [_phase_from_sigma(arc_length_at(curve, project(curve, th), interpolant), gamma) for th in thetas]


def turn_rate(curve, states, k, gains, interpolant=None):
    """u_k = kappa(theta_k) (1 + zeta_k) with phases recomputed from all headings."""
    psis = curve_phases(curve, [s[2] for s in states], interpolant)
    terms = zeta(curve, states[k], psis, k, gains)
    u = curvature(curve, states[k][2]) * (1.0 + terms.zeta)
    return ControlOutput(u, terms.zeta, terms.barrier_term, terms.coupling_term, terms.e_norm, psis[k])


def evaluate_all(curve, states, gains, interpolant=None, gamma=None):
    """Control outputs for every agent from one snapshot of all states.

    Same values as calling :func:`turn_rate` per agent, with the shared
    projections and phases computed once.
    """
    gamma = perimeter(curve) if gamma is None else gamma
    n = len(states)
    ts = [project(curve, s[2]) for s in states]
    psis = [_phase_from_sigma(arc_length_at(curve, t, interpolant), gamma) for t in ts]
    kn = gains.k_coupling / n
    out = []
    for k, (state, t) in enumerate(zip(states, ts)):
        x, y, theta = state[0], state[1], state[2]
        px, py = heading_point(curve, theta) if curve.is_circle else point_on_curve(curve, t)
        b, e_norm = _barrier(x - px, y - py, theta, gains, k)
        pk = psis[k]
        c = -kn * math.fsum(math.sin(p - pk) for p in psis)
        z = b + c
        out.append(ControlOutput(curvature(curve, theta) * (1.0 + z), z, b, c, e_norm, pk))
    return out
