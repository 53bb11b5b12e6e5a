"""Bearing-only guidance for flying a quadrotor through the centroid of a
rectangular window, with kinematic and 6-DOF simulators and the experiments
built on them."""

from .errors import (ConfigError, DegenerateGeometryError, DomainError, GeometryError,
                     GimbalSingularityError, InvalidScenarioError, RangeViolationError,
                     SingularGeometryError)
from .experiments import (MonteCarloSpec, MonteCarloStats, SigmaStats, StartBox, run_case1, run_case2,
                          run_monte_carlo)
from .geometry import (REFERENCE_WINDOW, BearingSet, DisplacementState, LyapunovSample, Vec3, WindowSpec,
                       bearing_angles, displacements, displacements_world, lyapunov, position_from_bearings,
                       relative_velocity)
from .guidance import (GuidanceCommand, GuidanceConfig, chi_des, gamma_des, guidance_step, shaping_chi,
                       shaping_gamma, traversal_condition)
from .kinematic import PhasePortrait, phase_portrait, run_kinematic
from .noise import NoiseConfig, corrupt_bearings
from .results import TRAJECTORY_COLUMNS, RunResult, RunStatus
from .sixdof import ControllerGains, QuadParams, RigidBodyState, run_sixdof

__version__ = "0.1.0"
