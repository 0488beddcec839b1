"""Experiment harness: config parsing, single runs, sweeps and plot data.

A run always executes BOTH integration routes (full-state and projected),
cross-checks them sample by sample, attaches diagnostics, and writes a
trajectory CSV plus a JSON report. A sweep repeats this over a list of
gap-to-rotation ratios and emits a comparison table against the predicted
libration envelope.

Config files are JSON documents; see README for the schema. Schedules can
be given inline or as a two-column CSV file reference.
"""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .diagnostics import DiagnosticsReport, compute_diagnostics, libration_bound
from .errors import (
    InvalidConfigError,
    MissingTrajectoryError,
    OracleMismatchError,
    RotationRegimeError,
)
from .evolution import (
    EquatorialScenario,
    IntegratorConfig,
    Trajectory,
    integrate_full,
    integrate_projected,
    piecewise_geodesic_drive,
    to_pendulum_coords,
)
from .geometry import BlochPoint, angles_to_vectors, bloch_to_state, fs_distances
from .hamiltonian import GeometricDrive, MatrixDrive
from .schedules import AnglesAxis, ConstantSchedule, LinearSchedule, Schedule, TableSchedule
from ._kernels import backend_name

#: Largest tolerated disagreement between the two integration routes.
ORACLE_TOL = 1e-6

CSV_HEADER = [
    "t", "theta", "phi", "theta_prime", "phi_prime", "eps", "eta",
    "delta_e", "fs_speed", "eigen_deviation", "norm_drift",
]


def _schedule_from_spec(spec, base_dir: Path, where: str) -> Schedule:
    if isinstance(spec, (int, float)):
        return ConstantSchedule(float(spec))
    if not isinstance(spec, dict):
        raise InvalidConfigError(f"{where}: expected a number or schedule object")
    kind = spec.get("kind")
    if kind == "constant":
        return ConstantSchedule(_get_num(spec, "value", where))
    if kind == "linear":
        return LinearSchedule(_get_num(spec, "intercept", where), _get_num(spec, "slope", where))
    if kind == "table":
        if "file" in spec:
            path = base_dir / spec["file"]
            if not path.exists():
                raise InvalidConfigError(f"{where}: schedule file {path} not found")
            data = np.loadtxt(path, delimiter=",", ndmin=2)
            return TableSchedule(data[:, 0], data[:, 1])
        return TableSchedule(spec.get("times", []), spec.get("values", []))
    raise InvalidConfigError(f"{where}: unknown schedule kind {kind!r}")


def _get_num(d: dict, key: str, where: str) -> float:
    if key not in d or not isinstance(d[key], (int, float)):
        raise InvalidConfigError(f"{where}.{key}: numeric value required")
    return float(d[key])


@dataclass
class ExperimentConfig:
    """Validated experiment description (one drive variant plus numerics)."""

    drive_spec: dict
    t_end: float
    integrator: IntegratorConfig
    out_dir: Path
    initial: BlochPoint | None = None
    seed: int = 0
    raw: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict, base_dir: Path = Path(".")) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise InvalidConfigError("config root must be an object")
        drive_spec = data.get("drive")
        if not isinstance(drive_spec, dict) or "kind" not in drive_spec:
            raise InvalidConfigError("drive: object with a 'kind' field required")
        kind = drive_spec["kind"]
        if kind not in ("equatorial", "geometric", "matrix", "piecewise"):
            raise InvalidConfigError(f"drive.kind: unknown variant {kind!r}")

        t_end = data.get("t_end")
        if t_end is None:
            if kind == "equatorial":
                cap = _get_num(drive_spec, "capital_omega", "drive")
                if cap <= 0:
                    raise InvalidConfigError("t_end: required when capital_omega is 0")
                t_end = 4.0 * math.pi / cap  # two drive revolutions
            elif kind == "piecewise":
                t_end = _get_num(drive_spec, "total_time", "drive")
            else:
                raise InvalidConfigError("t_end: required for this drive kind")
        if not isinstance(t_end, (int, float)) or not t_end > 0:
            raise InvalidConfigError("t_end: positive number required")

        integ = data.get("integrator", {})
        if not isinstance(integ, dict):
            raise InvalidConfigError("integrator: object required")
        try:
            cfg = IntegratorConfig(
                dt=integ.get("dt"),
                scheme=integ.get("scheme", "rk4"),
                rel_tol=float(integ.get("rel_tol", 1e-10)),
                norm_drift_limit=float(integ.get("norm_drift_limit", 1e-9)),
                chart_switch_threshold=float(integ.get("chart_switch_threshold", 0.2)),
                n_samples=int(integ.get("n_samples", 2000)),
            )
        except (TypeError, ValueError) as exc:
            raise InvalidConfigError(f"integrator: {exc}") from exc

        outputs = data.get("outputs", {})
        out_dir = Path(outputs.get("dir", "out")) if isinstance(outputs, dict) else None
        if out_dir is None:
            raise InvalidConfigError("outputs: object required")
        if not out_dir.is_absolute():
            out_dir = base_dir / out_dir

        initial = None
        if "initial" in data:
            ini = data["initial"]
            if not isinstance(ini, dict):
                raise InvalidConfigError("initial: object with theta/phi required")
            initial = BlochPoint(_get_num(ini, "theta", "initial"), _get_num(ini, "phi", "initial"))

        seed = data.get("seed", 0)
        if not isinstance(seed, int):
            raise InvalidConfigError("seed: integer required")

        cfg_obj = cls(
            drive_spec=drive_spec,
            t_end=float(t_end),
            integrator=cfg,
            out_dir=out_dir,
            initial=initial,
            seed=seed,
            raw=data,
        )
        cfg_obj.build_drive(base_dir)  # validate eagerly
        return cfg_obj

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        path = Path(path)
        if not path.exists():
            raise InvalidConfigError(f"config file {path} not found")
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise InvalidConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
        return cls.from_dict(data, base_dir=path.parent)

    def build_drive(self, base_dir: Path = Path(".")):
        spec = self.drive_spec
        kind = spec["kind"]
        where = "drive"
        if kind == "equatorial":
            omega0 = _get_num(spec, "omega0", where)
            cap = _get_num(spec, "capital_omega", where)
            if omega0 <= 0 or cap < 0:
                raise InvalidConfigError("drive: omega0 > 0 and capital_omega >= 0 required")
            return GeometricDrive.equatorial(omega0, cap)
        if kind == "geometric":
            return GeometricDrive.from_schedules(
                _schedule_from_spec(spec.get("omega"), base_dir, f"{where}.omega"),
                _schedule_from_spec(spec.get("theta_prime"), base_dir, f"{where}.theta_prime"),
                _schedule_from_spec(spec.get("phi_prime"), base_dir, f"{where}.phi_prime"),
            )
        if kind == "matrix":
            return MatrixDrive(
                _schedule_from_spec(spec.get("h00"), base_dir, f"{where}.h00"),
                _schedule_from_spec(spec.get("h11"), base_dir, f"{where}.h11"),
                _schedule_from_spec(spec.get("h01_re"), base_dir, f"{where}.h01_re"),
                _schedule_from_spec(spec.get("h01_im"), base_dir, f"{where}.h01_im"),
            )
        waypoints = spec.get("waypoints")
        if not isinstance(waypoints, list):
            raise InvalidConfigError("drive.waypoints: list of [theta, phi] pairs required")
        return piecewise_geodesic_drive(
            [tuple(map(float, w)) for w in waypoints],
            _get_num(spec, "omega", where),
            _get_num(spec, "total_time", where),
            int(spec.get("n_segments", 0)),
        )

    def equatorial_scenario(self) -> EquatorialScenario | None:
        if self.drive_spec["kind"] != "equatorial":
            return None
        return EquatorialScenario(
            float(self.drive_spec["omega0"]),
            float(self.drive_spec["capital_omega"]),
            self.t_end,
        )


@dataclass
class RunReport:
    config: dict
    trajectory_path: str
    diagnostics: dict
    oracle_max_fs_distance: float
    integrator_stats: dict
    wall_clock_s: float
    backend: str

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "trajectory_path": self.trajectory_path,
            "diagnostics": self.diagnostics,
            "oracle_max_fs_distance": self.oracle_max_fs_distance,
            "integrator_stats": self.integrator_stats,
            "wall_clock_s": self.wall_clock_s,
            "backend": self.backend,
        }

    def write(self, path: Path) -> None:
        path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")


def axis_series(drive, times: np.ndarray):
    """(theta', phi'_wrapped, phi'_unwrapped) of the drive axis at samples."""
    th, ph = drive.axis_angles(times)
    th = np.asarray(th, dtype=float)
    ph = np.asarray(ph, dtype=float)
    # Angle schedules are already continuous; arc paths and matrix drives
    # return principal values that need unwrapping for the eta coordinate.
    if isinstance(drive, GeometricDrive) and isinstance(drive.axis, AnglesAxis):
        ph_unw = ph
    else:
        ph_unw = np.unwrap(ph)
    return th, np.mod(ph, 2.0 * math.pi), ph_unw


def write_trajectory_csv(
    path: Path,
    traj: Trajectory,
    drive,
    diag: DiagnosticsReport,
) -> None:
    """Write the trajectory table with the mandated column order.

    eps and eta are the axis-relative deviation coordinates theta - theta'
    and 2(phi - phi'), which reduce to the paper coordinates of the
    equatorial scenario where theta' = pi/2 and phi' = Omega t.
    """
    th_p, ph_p_wrapped, ph_p_unw = axis_series(drive, traj.times)
    eps = traj.theta - th_p
    eta = 2.0 * (traj.phi_unwrapped - ph_p_unw)
    drift = traj.norm_drift if traj.norm_drift is not None else np.zeros(len(traj))
    cols = [
        traj.times, traj.theta, traj.phi, th_p, ph_p_wrapped, eps, eta,
        diag.delta_e, diag.fs_speed, diag.eigen_deviation, drift,
    ]
    data = np.column_stack(cols)
    np.savetxt(path, data, delimiter=",", fmt="%.17g", header=",".join(CSV_HEADER), comments="")


def run(config: ExperimentConfig, base_dir: Path = Path(".")) -> RunReport:
    """Execute one experiment: both integrators, cross-check, diagnostics,
    trajectory CSV and report JSON.

    Raises OracleMismatchError when the two routes disagree by more than
    ORACLE_TOL in Fubini-Study distance at any sample.
    """
    started = time.perf_counter()
    drive = config.build_drive(base_dir)
    p_init = config.initial
    if p_init is None:
        th0, ph0 = drive.axis_angles(0.0)
        p_init = BlochPoint(float(th0), float(ph0))
    traj_full = integrate_full(drive, bloch_to_state(p_init), config.t_end, config.integrator)
    traj_proj = integrate_projected(drive, p_init, config.t_end, config.integrator)
    gap = fs_distances(traj_full.theta, traj_full.phi, traj_proj.theta, traj_proj.phi)
    oracle_max = float(np.max(gap))
    if oracle_max > ORACLE_TOL:
        raise OracleMismatchError(
            f"projected and full-state routes disagree by {oracle_max:.3e} FS "
            f"(tolerance {ORACLE_TOL:g})"
        )

    scenario = config.equatorial_scenario()
    diag = compute_diagnostics(traj_full, drive, scenario)

    summary = diag.summary()
    if scenario is not None:
        summary["pendulum_check"] = _pendulum_check(traj_full, scenario)

    config.out_dir.mkdir(parents=True, exist_ok=True)
    traj_path = config.out_dir / "trajectory.csv"
    write_trajectory_csv(traj_path, traj_full, drive, diag)

    report = RunReport(
        config=config.raw,
        trajectory_path=str(traj_path),
        diagnostics=summary,
        oracle_max_fs_distance=oracle_max,
        integrator_stats={
            "full": _stats_dict(traj_full),
            "projected": _stats_dict(traj_proj),
        },
        wall_clock_s=time.perf_counter() - started,
        backend=backend_name(),
    )
    report.write(config.out_dir / "report.json")
    return report


def _stats_dict(traj: Trajectory) -> dict:
    s = traj.stats
    return {
        "steps": s.steps,
        "rejections": s.rejected,
        "max_norm_drift": s.max_norm_drift,
        "dt": s.dt,
    }


def _pendulum_check(traj: Trajectory, sc: EquatorialScenario) -> dict:
    """Measured deviation envelope against the libration bound."""
    out: dict = {"applicable": True}
    try:
        eta_max, eps_max = libration_bound(sc.omega0, sc.capital_omega)
    except RotationRegimeError as exc:
        return {"applicable": False, "reason": str(exc)}
    measured_eps = float(np.max(np.abs(traj.theta - 0.5 * math.pi)))
    series = to_pendulum_coords(traj, sc.capital_omega)
    out.update(
        eps_max_measured=measured_eps,
        eps_max_predicted=eps_max,
        eta_max_measured=float(np.max(np.abs(series.eta))),
        eta_max_predicted=eta_max,
        within_envelope=bool(measured_eps <= 1.25 * eps_max),
    )
    return out


# -- sweep --------------------------------------------------------------------


@dataclass
class SweepEntry:
    ratio: float
    max_eigen_deviation: float | None
    predicted: float | None
    passed: bool
    error: str | None = None


def _sweep_one(args) -> dict:
    raw, base_dir = args
    try:
        config = ExperimentConfig.from_dict(raw, Path(base_dir))
        report = run(config, Path(base_dir))
        return {"report": report.to_dict()}
    except RotationRegimeError as exc:
        return {"error": f"rotation-regime: {exc}"}
    except Exception as exc:  # propagate as a recorded per-ratio failure
        return {"error": f"{type(exc).__name__}: {exc}"}


def sweep(
    ratios: list[float],
    base_config: ExperimentConfig,
    base_dir: Path = Path("."),
    workers: int | None = None,
) -> list[SweepEntry]:
    """Run the equatorial experiment at several gap-to-rotation ratios.

    Each ratio keeps omega0 from the base config and sets capital_omega =
    omega0 / ratio with t_end = 4 pi / capital_omega (two drive
    revolutions) unless overridden. Per-ratio failures are recorded and do
    not stop the remaining ratios. The envelope check accepts a measured
    maximum eigen-deviation within [0.75, 1.25] of Omega/omega0.
    """
    if not ratios:
        raise InvalidConfigError("ratios must be non-empty")
    if base_config.drive_spec.get("kind") != "equatorial":
        raise InvalidConfigError("sweep needs an equatorial base config")
    omega0 = float(base_config.drive_spec["omega0"])

    jobs = []
    for ratio in ratios:
        raw = json.loads(json.dumps(base_config.raw))  # deep copy
        cap = omega0 / ratio
        raw["drive"]["capital_omega"] = cap
        raw.pop("t_end", None)
        outputs = raw.setdefault("outputs", {})
        outputs["dir"] = str(Path(base_config.out_dir) / f"ratio_{ratio:g}")
        jobs.append((raw, str(base_dir)))

    entries: list[SweepEntry] = []
    if workers is not None and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_sweep_one, jobs))
    else:
        outcomes = [_sweep_one(j) for j in jobs]

    for ratio, outcome in zip(ratios, outcomes):
        if ratio <= 1.0 and "error" not in outcome:
            outcome = {"error": "rotation-regime: ratio must exceed 1"}
        if "error" in outcome:
            entries.append(SweepEntry(ratio, None, None, False, outcome["error"]))
            continue
        rep = outcome["report"]
        measured = rep["diagnostics"]["max_eigen_deviation"]
        predicted = 1.0 / ratio
        ok = 0.75 * predicted <= measured <= 1.25 * predicted
        entries.append(SweepEntry(ratio, measured, predicted, bool(ok)))
    return entries


def write_sweep_table(entries: list[SweepEntry], path: Path) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["ratio", "max_eigen_deviation", "predicted_envelope", "status", "note"])
        for e in entries:
            writer.writerow([
                f"{e.ratio:g}",
                "" if e.max_eigen_deviation is None else f"{e.max_eigen_deviation:.17g}",
                "" if e.predicted is None else f"{e.predicted:.17g}",
                "pass" if e.passed else "fail",
                e.error or "",
            ])


def format_sweep_table(entries: list[SweepEntry]) -> str:
    lines = [f"{'ratio':>10}  {'max eigen dev':>14}  {'predicted':>10}  status"]
    for e in entries:
        dev = "-" if e.max_eigen_deviation is None else f"{e.max_eigen_deviation:.4e}"
        pred = "-" if e.predicted is None else f"{e.predicted:.4e}"
        status = "pass" if e.passed else f"FAIL ({e.error})" if e.error else "FAIL"
        lines.append(f"{e.ratio:>10g}  {dev:>14}  {pred:>10}  {status}")
    return "\n".join(lines)


# -- plot data ----------------------------------------------------------------


def emit_plot_data(report_path, out_dir=None, svg: bool = False) -> list[Path]:
    """Write plot-ready tables from a run report.

    Produces (a) the polar trace of the state around the instantaneous
    axis, as tangent-plane offsets (x, y), and (b) the eigen-deviation
    against time. With ``svg=True`` a self-contained vector rendering is
    written as well (requires matplotlib).
    """
    report_path = Path(report_path)
    if not report_path.exists():
        raise MissingTrajectoryError(f"report {report_path} not found")
    report = json.loads(report_path.read_text())
    traj_path = Path(report["trajectory_path"])
    if not traj_path.is_absolute():
        traj_path = report_path.parent / traj_path
    if not traj_path.exists():
        raise MissingTrajectoryError(f"trajectory file {traj_path} not found")
    data = np.loadtxt(traj_path, delimiter=",", skiprows=1, ndmin=2)
    cols = {name: data[:, i] for i, name in enumerate(CSV_HEADER)}

    out_dir = Path(out_dir) if out_dir is not None else report_path.parent
    out_dir.mkdir(parents=True, exist_ok=True)

    v = angles_to_vectors(cols["theta"], cols["phi"])
    axis = angles_to_vectors(cols["theta_prime"], cols["phi_prime"])
    # tangent frame at the axis point: e_th (southward), e_ph (eastward)
    thp, php = cols["theta_prime"], cols["phi_prime"]
    e_th = np.stack(
        [np.cos(thp) * np.cos(php), np.cos(thp) * np.sin(php), -np.sin(thp)], axis=-1
    )
    e_ph = np.stack([-np.sin(php), np.cos(php), np.zeros_like(php)], axis=-1)
    ang = np.arctan2(np.linalg.norm(np.cross(axis, v), axis=-1), np.sum(axis * v, axis=-1))
    bearing = np.arctan2(np.sum(v * e_ph, axis=-1), np.sum(v * e_th, axis=-1))
    polar = np.column_stack([cols["t"], ang * np.cos(bearing), ang * np.sin(bearing)])
    polar_path = out_dir / "polar_trace.csv"
    np.savetxt(polar_path, polar, delimiter=",", fmt="%.17g", header="t,x,y", comments="")

    dev_path = out_dir / "eigen_deviation.csv"
    np.savetxt(
        dev_path,
        np.column_stack([cols["t"], cols["eigen_deviation"]]),
        delimiter=",", fmt="%.17g", header="t,eigen_deviation", comments="",
    )

    written = [polar_path, dev_path]
    if svg:
        written.append(_render_svg(out_dir, polar, cols))
    return written


def _render_svg(out_dir: Path, polar: np.ndarray, cols: dict) -> Path:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4.5))
    ax1.plot(polar[:, 1], polar[:, 2], lw=0.4)
    ax1.set_aspect("equal")
    ax1.set_xlabel("offset x (rad)")
    ax1.set_ylabel("offset y (rad)")
    ax1.set_title("state around the instantaneous axis")
    ax2.plot(cols["t"], cols["eigen_deviation"], lw=0.6)
    ax2.set_xlabel("t")
    ax2.set_ylabel("FS eigen-deviation")
    ax2.set_title("deviation from the instantaneous eigenstate")
    fig.tight_layout()
    path = out_dir / "run_plots.svg"
    fig.savefig(path)
    plt.close(fig)
    return path
