"""Adiabatic qubit dynamics on the Bloch sphere.

Exact two-amplitude Schrodinger integration, an independent projected
integration on the ray sphere, the pendulum reduction of the equatorial
scenario, and diagnostics for the speed identity and the geometric
time-energy bound. The stepping kernels are compiled (Cython) with a
pure-Python fallback selected at import time.
"""

from ._kernels import backend_name
from .diagnostics import (
    DiagnosticsReport,
    PassageCheck,
    compute_diagnostics,
    delta_e_series,
    eigen_deviation_series,
    energy_uncertainty,
    fs_speed_series,
    libration_bound,
    passage_check,
    pendulum_energy,
    pendulum_energy_series,
)
from .errors import (
    AdiablochError,
    AntipodalWaypointsError,
    DegenerateInputError,
    DegenerateSpectrumError,
    InvalidConfigError,
    MissingTrajectoryError,
    NormDriftExceededError,
    NumericalInconsistencyError,
    OracleMismatchError,
    RotationRegimeError,
    StepRejectionExhaustedError,
    TooFewSamplesError,
)
from .evolution import (
    EPS_RECONSTRUCTION_SIGN,
    EquatorialScenario,
    IntegratorConfig,
    IntegratorStats,
    PendulumSeries,
    PendulumState,
    Trajectory,
    integrate_equatorial,
    integrate_full,
    integrate_pendulum,
    integrate_projected,
    piecewise_geodesic_drive,
    projected_rhs,
    schrodinger_rhs,
    to_pendulum_coords,
    trajectory_from_pendulum,
)
from .geometry import (
    BlochPoint,
    ProjectiveCoord,
    StateVector,
    antipode,
    bloch_to_state,
    fs_distance,
    inner_product,
    inverse_stereographic,
    state_to_bloch,
    stereographic,
)
from .hamiltonian import (
    DriveParams,
    GeometricDrive,
    HamiltonianMatrix,
    MagneticField,
    MatrixDrive,
    drive_to_field,
    eigen_bloch,
    eigenvalues,
    gauge_shift,
    geometric_to_params,
    instantaneous_gap,
    params_to_matrix,
    relabel,
)
from .schedules import (
    ConstantSchedule,
    GreatCircleSegment,
    LinearSchedule,
    TableSchedule,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
