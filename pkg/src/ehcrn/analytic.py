"""Closed-form operating characteristics of the sensing / harvesting link.

Model summary.  A licensed channel alternates between idle and occupied as
a correlated two-state chain.  An opportunistic node senses the channel
each slot with an energy detector that averages N = tau_s * f_s samples;
for large N the test statistic is Gaussian, which gives the false-alarm
and detection probabilities as Gaussian tail values.  The node transmits
one packet whenever the sensing outcome says "idle" and its battery holds
at least one energy unit; a transmission spends one unit, and one unit is
harvested in every slot the (independent) energy-arrival chain is on,
capped at L - 1.  Treating access and harvest as per-slot Bernoulli events
with their stationary probabilities makes the battery level a birth-death
chain whose stationary law is geometric in the ratio

    alpha = (1 - delta) * e_on / (delta * (1 - e_on)),

where delta is the access probability and e_on the stationary harvest
probability.  A packet is lost when the node does not access, accesses a
busy channel, or accesses with an empty battery; the per-slot loss
probability is

    P_L = 1 - (1 - pi_0) * (1 - P_f) * pi_idle.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ehcrn.chains import TwoStateChain, steady_state
from ehcrn.errors import NumericsError
from ehcrn.gaussian import q_tail, q_tail_inverse

__all__ = [
    "BatteryModel",
    "DetectorConfig",
    "OperatingPoint",
    "Scenario",
    "access_prob",
    "access_prob_from_rates",
    "battery_steady_state",
    "battery_transition_matrix",
    "detection_prob",
    "false_alarm_prob",
    "operating_point",
    "outage_prob",
    "packet_loss_prob",
    "steady_state_numeric",
    "threshold_for_target_pf",
]


def _sample_count(sensing_duration: float, sampling_rate: float) -> int:
    # Round down, but forgive products like 0.003 * 1e6 that land one ulp
    # below the intended integer.
    return int(math.floor(sensing_duration * sampling_rate * (1.0 + 1e-12)))


@dataclass(frozen=True)
class DetectorConfig:
    """Energy detector parameters.

    ``sensing_duration`` is in seconds, ``sampling_rate`` in Hz;
    ``noise_power`` and ``threshold`` are linear powers on the same scale;
    ``primary_snr`` is the linear ratio of primary signal power to noise
    power as seen at the sensing node.
    """

    sensing_duration: float
    sampling_rate: float
    noise_power: float
    threshold: float
    primary_snr: float

    def __post_init__(self):
        for name in ("sensing_duration", "sampling_rate", "noise_power", "threshold", "primary_snr"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be a positive finite number, got {v!r}")
        if _sample_count(self.sensing_duration, self.sampling_rate) < 1:
            raise ValueError(
                "sensing_duration * sampling_rate must give at least one sample, "
                f"got {self.sensing_duration * self.sampling_rate!r}"
            )

    @property
    def sample_count(self) -> int:
        """Number of averaged samples N (floor of duration * rate)."""
        return _sample_count(self.sensing_duration, self.sampling_rate)

    @property
    def normalized_threshold(self) -> float:
        """Detection threshold divided by the noise power."""
        return self.threshold / self.noise_power


def false_alarm_prob(det: DetectorConfig) -> float:
    """Probability of declaring the channel busy when it is idle."""
    return q_tail((det.normalized_threshold - 1.0) * math.sqrt(det.sample_count))


def detection_prob(det: DetectorConfig) -> float:
    """Probability of declaring the channel busy when it is occupied."""
    scaled = det.threshold / ((det.primary_snr + 1.0) * det.noise_power)
    return q_tail((scaled - 1.0) * math.sqrt(det.sample_count))


def threshold_for_target_pf(target: float, det: DetectorConfig) -> float:
    """Detection threshold (linear power) that yields the given false-alarm rate.

    Inverts the false-alarm expression:
    eps = noise_power * (1 + Qinv(target) / sqrt(N)).
    """
    if not 0.0 < target < 1.0:
        raise ValueError(f"target false-alarm probability must lie in (0, 1), got {target!r}")
    return det.noise_power * (1.0 + q_tail_inverse(target) / math.sqrt(det.sample_count))


def access_prob_from_rates(pf: float, pd: float, pi_idle: float) -> float:
    """Access probability from the detector rates and idle-state probability.

    Total probability over the two channel states: the node accesses when
    it senses "idle", which happens with probability 1 - pf on an idle
    slot and 1 - pd on an occupied one.
    """
    return (1.0 - pf) * pi_idle + (1.0 - pd) * (1.0 - pi_idle)


def access_prob(spectrum: TwoStateChain, det: DetectorConfig) -> float:
    """Stationary probability that sensing permits a transmission."""
    pi_idle, _ = steady_state(spectrum)
    return access_prob_from_rates(false_alarm_prob(det), detection_prob(det), pi_idle)


@dataclass(frozen=True)
class BatteryModel:
    """An L-level battery driven by per-slot access and harvest events.

    ``access_prob`` (delta) must be strictly inside (0, 1): at the
    boundaries the geometric ratio alpha is undefined and the birth-death
    derivation assumes both access and non-access occur.  ``harvest_prob``
    (e_on) may sit on its boundaries; those cases degenerate to an always
    empty / never empty battery.  ``unit_energy`` is bookkeeping only: the
    harvest quantum equals the transmit quantum.
    """

    levels: int
    access_prob: float
    harvest_prob: float
    unit_energy: float = 1.0

    def __post_init__(self):
        if not (isinstance(self.levels, int) and self.levels >= 2):
            raise ValueError(f"levels must be an integer >= 2, got {self.levels!r}")
        if not 0.0 < self.access_prob < 1.0:
            raise ValueError(
                f"access probability must lie strictly in (0, 1), got {self.access_prob!r}; "
                "the battery chain's geometric ratio is undefined at the boundaries"
            )
        if not 0.0 <= self.harvest_prob <= 1.0:
            raise ValueError(f"harvest probability must lie in [0, 1], got {self.harvest_prob!r}")
        if not self.unit_energy > 0:
            raise ValueError(f"unit_energy must be positive, got {self.unit_energy!r}")

    @property
    def alpha(self) -> float:
        """Geometric ratio (1 - delta) e_on / (delta (1 - e_on)) of the chain."""
        if self.harvest_prob == 1.0:
            return math.inf
        return (1.0 - self.access_prob) * self.harvest_prob / (
            self.access_prob * (1.0 - self.harvest_prob)
        )

    def _alpha_minus_one(self) -> float:
        # (1-d)e - d(1-e) simplifies to e - d, which avoids cancellation.
        return (self.harvest_prob - self.access_prob) / (
            self.access_prob * (1.0 - self.harvest_prob)
        )


def battery_transition_matrix(b: BatteryModel) -> np.ndarray:
    """Row-stochastic tridiagonal transition matrix of the battery level.

    Level 0 cannot transmit, so it only moves up (harvest) or stays; an
    interior level moves down on access-without-harvest, up on
    harvest-without-access, and otherwise stays; the top level absorbs
    harvests into the cap.  Diagonals are the correctly-rounded complements
    of the off-diagonal mass (computed with error-free summation), so each
    row sums to 1.0 exactly under math.fsum and to within one ulp under
    naive summation.
    """
    levels, delta, e_on = b.levels, b.access_prob, b.harvest_prob
    down = delta * (1.0 - e_on)
    up = (1.0 - delta) * e_on
    stay = math.fsum((1.0, -down, -up))
    mat = np.zeros((levels, levels))
    mat[0, 0] = 1.0 - e_on
    mat[0, 1] = e_on
    for l in range(1, levels - 1):
        mat[l, l - 1] = down
        mat[l, l] = stay
        mat[l, l + 1] = up
    mat[levels - 1, levels - 2] = down
    mat[levels - 1, levels - 1] = 1.0 - down
    return mat


def outage_prob(b: BatteryModel) -> float:
    """Stationary probability pi_0 that the battery is empty.

    Closed form of the birth-death chain: with alpha the geometric ratio,

        pi_0 = (1 - delta)(1 - alpha) / (1 - alpha^L - delta (1 - alpha))

    for alpha != 1, and the limit (1 - delta) / ((1 - delta) + (L - 1)) at
    alpha == 1.  Evaluation goes through expm1/log1p in terms of
    d = alpha - 1, which is stable on both sides of alpha == 1 and does
    not overflow for large alpha^L.  Harvest-probability boundaries short
    circuit: never harvesting pins the battery at empty, harvesting every
    slot keeps it away from empty.
    """
    if b.harvest_prob == 0.0:
        return 1.0
    if b.harvest_prob == 1.0:
        return 0.0
    delta = b.access_prob
    d = b._alpha_minus_one()
    if d == 0.0:
        return (1.0 - delta) / (b.levels - delta)
    t = b.levels * math.log1p(d)
    if t > 700.0:
        # alpha^L overflows a double; pi_0 has underflowed to zero.
        return 0.0
    return (1.0 - delta) * d / (math.expm1(t) - delta * d) + 0.0


def battery_steady_state(b: BatteryModel) -> np.ndarray:
    """Full stationary vector [pi_0, ..., pi_{L-1}] of the battery chain.

    pi_l = alpha^l * pi_0 / (1 - delta) for l >= 1.  The vector is
    assembled from log-weights and normalised, which keeps the entries
    finite for any alpha and makes the sum exactly 1 up to rounding.
    """
    levels, delta = b.levels, b.access_prob
    if b.harvest_prob == 0.0:
        vec = np.zeros(levels)
        vec[0] = 1.0
        return vec
    if b.harvest_prob == 1.0:
        vec = np.zeros(levels)
        vec[-1] = 1.0
        return vec
    log_alpha = math.log1p(b._alpha_minus_one())
    logw = np.arange(levels) * log_alpha - math.log(1.0 - delta)
    logw[0] = 0.0
    w = np.exp(logw - logw.max())
    return w / w.sum()


def steady_state_numeric(matrix: np.ndarray) -> np.ndarray:
    """Stationary distribution of a row-stochastic matrix by direct solve.

    Replaces one equilibrium equation with the normalisation sum(pi) == 1
    and solves the resulting linear system.  Serves as the independent
    oracle for the closed-form battery law.

    Raises:
        NumericsError: singular / non-irreducible input, or a residual
            above 1e-12.
    """
    mat = np.asarray(matrix, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise NumericsError(f"transition matrix must be square, got shape {mat.shape}")
    n = mat.shape[0]
    rowsum = mat.sum(axis=1)
    if not np.allclose(rowsum, 1.0, rtol=0.0, atol=1e-9):
        raise NumericsError(f"matrix is not row-stochastic: row sums {rowsum}")
    system = mat.T - np.eye(n)
    system[-1, :] = 1.0
    rhs = np.zeros(n)
    rhs[-1] = 1.0
    try:
        pi = np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError as exc:
        raise NumericsError(
            f"stationary solve failed ({exc}); the chain is likely not irreducible"
        ) from exc
    residual = float(np.max(np.abs(pi @ mat - pi)))
    if residual > 1e-12 or pi.min() < -1e-10:
        raise NumericsError(
            f"stationary solve is unreliable: residual {residual:.3e}, min entry {pi.min():.3e}"
        )
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


@dataclass(frozen=True)
class Scenario:
    """Full description of one operating point of the link.

    ``spectrum`` is the idle/occupied chain (state A = idle), ``energy``
    the harvest arrival chain (state A = harvesting), ``battery_levels``
    the battery size L, ``slot_duration`` the slot length in seconds.
    """

    spectrum: TwoStateChain
    energy: TwoStateChain
    detector: DetectorConfig
    battery_levels: int
    slot_duration: float

    def __post_init__(self):
        if not (isinstance(self.battery_levels, int) and self.battery_levels >= 2):
            raise ValueError(f"battery_levels must be an integer >= 2, got {self.battery_levels!r}")
        if not self.slot_duration > 0:
            raise ValueError(f"slot_duration must be positive, got {self.slot_duration!r}")
        tau = self.detector.sensing_duration
        if tau > self.slot_duration:
            raise ValueError(
                f"sensing duration {tau!r} s exceeds the slot duration {self.slot_duration!r} s"
            )
        if tau > self.slot_duration / 10.0:
            warnings.warn(
                f"sensing duration {tau} s is more than a tenth of the slot "
                f"({self.slot_duration} s); the model assumes sensing is short",
                stacklevel=2,
            )

    @property
    def pi_idle(self) -> float:
        return steady_state(self.spectrum)[0]

    @property
    def e_on(self) -> float:
        return steady_state(self.energy)[0]


@dataclass(frozen=True)
class OperatingPoint:
    """All closed-form quantities of a scenario in one record."""

    pf: float
    pd: float
    delta: float
    pi_idle: float
    e_on: float
    alpha: float
    outage: float
    packet_loss: float


def operating_point(scenario: Scenario) -> OperatingPoint:
    """Evaluate every closed-form quantity for the scenario."""
    pf = false_alarm_prob(scenario.detector)
    pd = detection_prob(scenario.detector)
    pi_idle = scenario.pi_idle
    e_on = scenario.e_on
    delta = access_prob_from_rates(pf, pd, pi_idle)
    battery = BatteryModel(scenario.battery_levels, delta, e_on)
    pi0 = outage_prob(battery)
    loss = 1.0 - (1.0 - pi0) * (1.0 - pf) * pi_idle
    return OperatingPoint(
        pf=pf, pd=pd, delta=delta, pi_idle=pi_idle, e_on=e_on,
        alpha=battery.alpha, outage=pi0, packet_loss=loss,
    )


def packet_loss_prob(scenario: Scenario) -> float:
    """Per-slot packet loss probability 1 - (1 - pi_0)(1 - P_f) pi_idle."""
    return operating_point(scenario).packet_loss
