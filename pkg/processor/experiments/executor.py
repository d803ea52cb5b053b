# Standard library imports
import functools
import logging
from typing import Any, Callable, Dict, List, Optional, Sequence

# Third-party imports
import numpy as np
import pandas as pd

# Local application imports
from config.config import THREADS
from processor.automaton.core import AutomatonParams, SpinorState
from processor.automaton.dirac import (
    build_band_unitary,
    chirality,
    commutator_expectation,
    dispersion_scan,
    double_slit_state,
    evolve,
    evolve_two_particle,
    gaussian_packet,
    lattice_coordinates,
    light_cone_leakage,
    max_group_velocity,
    position_momentum_expect,
    step_displacement,
    two_particle_from_singles,
    typical_path,
)
from processor.errors import AutomatonError, ConfigError
from processor.experiments.output import ExperimentResult
from processor.experiments.schemas import (
    CollisionConfig,
    DispersionConfig,
    DoubleSlitConfig,
    ExperimentConfig,
    LatticeExperimentConfig,
    PacketConfig,
    RefractionCurveConfig,
    VerifyConfig,
)
from processor.experiments.verify import CheckStatus, run_suite

# Configure logger for this module
logger = logging.getLogger(__name__)

PROBABILITY_SLACK = 1e-12


def _logged_failure(method: Callable[..., ExperimentResult]) -> Callable[..., Optional[ExperimentResult]]:
    """Turn library errors into a logged error and a None result."""

    @functools.wraps(method)
    def wrapper(self, *args, **kwargs):
        try:
            return method(self, *args, **kwargs)
        except AutomatonError as exc:
            logger.error(f"Experiment {self.experiment} failed: {exc}")
            return None

    return wrapper


def clamp_probabilities(values: np.ndarray, label: str) -> np.ndarray:
    """Clamp probabilities into [0, 1], logging any excursion.

    Excursions beyond 1e-12 point at a real defect and are logged as errors;
    smaller ones are rounding and only warrant a warning.
    """
    values = np.asarray(values, dtype=float)
    excursion = float(max(0.0, -values.min(initial=0.0), values.max(initial=0.0) - 1.0))
    if excursion > 0:
        if excursion > PROBABILITY_SLACK:
            logger.error(f"{label}: probability excursion {excursion:.3e} beyond tolerance before clamping")
        else:
            logger.warning(f"{label}: clamping probabilities (worst excursion {excursion:.3e})")
    return np.clip(values, 0.0, 1.0)


def unwrapped_centre(history: Sequence[SpinorState]) -> np.ndarray:
    """Packet centre per step, followed continuously across the periodic seam.

    The centre is the circular mean of the site distribution; successive
    values are joined along the shortest arc.
    """
    n = history[0].n_sites
    phases = np.exp(2j * np.pi * np.arange(n) / n)
    angles = np.array([np.angle(np.dot(state.site_probabilities(), phases)) for state in history])
    return np.unwrap(angles) * n / (2 * np.pi)


class ExperimentExecutor:
    """Run one configured experiment and collect its table and summary.

    Every public ``run_*`` method returns an ExperimentResult, or None after
    logging the error when the library rejects the parameters.
    """

    def __init__(self, experiment: str, config: ExperimentConfig):
        """Initialize the executor.

        Args:
            experiment: Subcommand name, e.g. "packet" or "verify"
            config: Validated configuration for that experiment
        """
        self.experiment = experiment
        self.config = config
        self.threads = config.threads or THREADS

    def run(self) -> Optional[ExperimentResult]:
        runners: Dict[str, Callable[[], Optional[ExperimentResult]]] = {
            "refraction-curve": self.run_refraction_curve,
            "packet": self.run_packet,
            "packet-detail": self.run_packet_detail,
            "planck-halt": self.run_planck_halt,
            "double-slit": self.run_double_slit,
            "collide": self.run_collision,
            "dispersion": self.run_dispersion,
            "verify": self.run_verify,
        }
        runner = runners.get(self.experiment)
        if runner is None:
            raise ConfigError(f"Unknown experiment: {self.experiment}")
        logger.info(f"Starting {self.experiment} with {self.parameters()}")
        result = runner()
        if result is not None:
            logger.info(f"Finished {self.experiment}: {len(result.table)} rows")
        return result

    def parameters(self) -> Dict[str, Any]:
        """Physical parameters for the metadata block (output plumbing excluded)."""
        values = self.config.model_dump(exclude={"out", "format", "threads"})
        if isinstance(self.config, LatticeExperimentConfig):
            values["theta"] = self.config.resolved_theta
        return values

    def _params(self) -> AutomatonParams:
        config = self.config
        assert isinstance(config, LatticeExperimentConfig)
        if config.m_ratio is not None:
            return AutomatonParams.from_mass_ratio(config.m_ratio, config.sites)
        return AutomatonParams(theta=config.resolved_theta, n_sites=config.sites)

    def _result(self, table: pd.DataFrame, summary: Dict[str, Any]) -> ExperimentResult:
        return ExperimentResult(self.experiment, self.parameters(), table, summary)

    @_logged_failure
    def run_refraction_curve(self) -> ExperimentResult:
        config = self.config
        assert isinstance(config, RefractionCurveConfig)
        m_ratio = np.linspace(0.0, 1.0, config.samples)
        zeta = np.sqrt(np.clip(1.0 - m_ratio ** 2, 0.0, 1.0))
        table = pd.DataFrame({"m_over_mp": m_ratio, "zeta": zeta})
        summary = {
            "samples": config.samples,
            "identity_residual": float(np.max(np.abs(zeta ** 2 + m_ratio ** 2 - 1.0))),
        }
        return self._result(table, summary)

    def _single_particle_table(self, history: Sequence[SpinorState], params: AutomatonParams) -> pd.DataFrame:
        coords = lattice_coordinates(params)
        order = np.argsort(coords, kind="stable")
        probs = np.stack([state.component_probabilities()[order] for state in history])
        probs = clamp_probabilities(probs, self.experiment)
        steps = len(history)
        return pd.DataFrame({
            "t": np.repeat(np.arange(steps), params.n_sites),
            "site": np.tile(coords[order], steps),
            "prob_plus": probs[:, :, 0].reshape(-1),
            "prob_minus": probs[:, :, 1].reshape(-1),
        })

    def _trajectory_summary(self, history: Sequence[SpinorState], params: AutomatonParams) -> Dict[str, Any]:
        path = typical_path(history, params)
        moments = [position_momentum_expect(state, params) for state in history]
        norms = np.array([state.norm() ** 2 for state in history])
        centre = unwrapped_centre(history)
        times = np.arange(len(history))
        u = build_band_unitary(params)
        steps = np.array([step_displacement(u, state) for state in history[:-1]])
        drift = np.concatenate([[0.0], np.cumsum(steps)]) * params.units.a
        # least-squares slope is a convex combination of the per-step displacements
        slope = float(np.polyfit(times, drift, 1)[0]) if len(history) > 1 else 0.0
        step_speed = float(np.max(np.abs(steps))) * params.units.a if len(history) > 1 else 0.0
        if step_speed > params.zeta * params.units.a + PROBABILITY_SLACK:
            logger.error(f"Mean position moved {step_speed:.6f} in one step, above zeta={params.zeta:.6f}")
        trajectory = [
            {
                "t": int(t),
                "mean_x": moments[t].mean_x,
                "var_x": moments[t].var_x,
                "x_star": float(path["x_star"].iloc[t]),
                "centre": float(centre[t]),
                "drift": float(drift[t]),
                "norm": float(norms[t]),
            }
            for t in times
        ]
        return {
            "zeta": params.zeta,
            "max_norm_drift": float(np.max(np.abs(norms - 1.0))),
            "centre_slope": slope,
            "max_step_speed": step_speed,
            "final_chirality": chirality(history[-1]),
            "trajectory": trajectory,
        }

    def _packet(self) -> ExperimentResult:
        config = self.config
        assert isinstance(config, PacketConfig)
        params = self._params()
        state = gaussian_packet(params, config.n0, config.delta, config.k, config.sign)
        history = evolve(build_band_unitary(params), state, config.steps)
        summary = self._trajectory_summary(history, params)
        summary["commutator_expectation"] = commutator_expectation(state, params)
        initial = history[0].site_probabilities()
        summary["max_transport"] = float(max(np.max(np.abs(s.site_probabilities() - initial)) for s in history))
        return self._result(self._single_particle_table(history, params), summary)

    @_logged_failure
    def run_packet(self) -> ExperimentResult:
        return self._packet()

    @_logged_failure
    def run_packet_detail(self) -> ExperimentResult:
        return self._packet()

    @_logged_failure
    def run_planck_halt(self) -> ExperimentResult:
        result = self._packet()
        if result.summary["max_transport"] > PROBABILITY_SLACK:
            logger.warning(f"Site distribution moved by {result.summary['max_transport']:.3e} at theta="
                           f"{self.parameters()['theta']}")
        return result

    @_logged_failure
    def run_double_slit(self) -> ExperimentResult:
        config = self.config
        assert isinstance(config, DoubleSlitConfig)
        params = self._params()
        state = double_slit_state(params, config.slit_n)
        history = evolve(build_band_unitary(params), state, config.steps)
        n = params.n_sites
        mirror = (-np.arange(n)) % n
        symmetry = max(float(np.max(np.abs(p - p[mirror]))) for p in (s.site_probabilities() for s in history))
        final = history[-1].site_probabilities()
        coords = lattice_coordinates(params)
        order = np.argsort(coords, kind="stable")
        between = final[order][np.abs(coords[order]) <= config.slit_n]
        interior = between[1:-1]
        peaks = int(np.sum((interior > between[:-2]) & (interior > between[2:]))) if between.size > 2 else 0
        summary = self._trajectory_summary(history, params)
        summary.update({
            "mirror_symmetry_residual": symmetry,
            "interference_peaks": peaks,
            "max_light_cone_leakage": float(np.max(light_cone_leakage(history, params,
                                                                      [config.slit_n, n - config.slit_n]))),
        })
        return self._result(self._single_particle_table(history, params), summary)

    @_logged_failure
    def run_collision(self) -> ExperimentResult:
        config = self.config
        assert isinstance(config, CollisionConfig)
        params = self._params()
        left = gaussian_packet(params, -config.x0, config.delta, config.k, config.sign)
        right = gaussian_packet(params, config.x0, config.delta, -config.k, config.sign)
        state = two_particle_from_singles(left, right)
        u = build_band_unitary(params)
        coords = lattice_coordinates(params)
        order = np.argsort(coords, kind="stable")
        n = params.n_sites
        frames: List[pd.DataFrame] = []
        antisymmetry = symmetry = drift = 0.0
        initial_diagonal = float(np.max(np.diag(state.site_probabilities())))
        for t in range(config.steps + 1):
            if t > 0:
                state = evolve_two_particle(state, params, 1, u)
            antisymmetry = max(antisymmetry, state.antisymmetry_residual())
            drift = max(drift, abs(state.norm() ** 2 - 1.0))
            probs = state.site_probabilities()
            symmetry = max(symmetry, float(np.max(np.abs(probs - probs.T))))
            if t % config.dump_every:
                continue
            probs = clamp_probabilities(probs[np.ix_(order, order)], self.experiment)
            frames.append(pd.DataFrame({
                "t": np.full(n * n, t),
                "n": np.repeat(coords[order], n),
                "m": np.tile(coords[order], n),
                "probability": probs.reshape(-1),
            }))
        summary = {
            "initial_diagonal_max": initial_diagonal,
            "max_antisymmetry_residual": antisymmetry,
            "max_probability_symmetry_residual": symmetry,
            "max_norm_drift": drift,
            "dumped_steps": len(frames),
        }
        return self._result(pd.concat(frames, ignore_index=True), summary)

    @_logged_failure
    def run_dispersion(self) -> ExperimentResult:
        config = self.config
        assert isinstance(config, DispersionConfig)
        params = self._params()
        table = dispersion_scan(params, config.samples).rename(columns={"energy": "E"})
        max_velocity = max_group_velocity(params)
        summary = {
            "zeta": params.zeta,
            "max_velocity": max_velocity,
            "velocity_residual": abs(max_velocity - params.zeta),
        }
        return self._result(table, summary)

    @_logged_failure
    def run_verify(self) -> ExperimentResult:
        config = self.config
        assert isinstance(config, VerifyConfig)
        checks = run_suite(config.suite, seed=config.seed, threads=self.threads)
        table = pd.DataFrame([check.as_row() for check in checks],
                             columns=["name", "value", "tolerance", "comparison", "status"])
        counts = {status.value: sum(check.status is status for check in checks) for status in CheckStatus}
        summary = {
            "suite": config.suite,
            "passed": counts[CheckStatus.FAIL.value] == 0,
            "counts": counts,
        }
        return self._result(table, summary)
