"""Phase-balancing of unicycle agents on circular and elliptical orbits with a barrier on the tracking error."""

from .control import BoundaryViolation, ControlGains, ControlOutput, turn_rate, zeta, zeta_circle
from .curve import CurveSpec, perimeter
from .interpolant import CertificationError, SigmaInterpolant, build_sigma_interpolant
from .sim import AgentState, Scenario, TrajectoryLog, order_parameter, run, validate
from .specfun import DomainError, ellint_e_complete, ellint_e_incomplete

__version__ = "0.1.0"
