"""UWB time-of-arrival measurement model with an asymmetric error mixture.

Arrival errors are negative only through receiver noise (half-Gaussian
weighted by 2 - alpha) but can be large and positive under multipath or
non-line-of-sight propagation (half-Cauchy weighted by alpha):

    e < 0:   (2 - alpha) * N(e; 0, sigma^2)
    e >= 0:  alpha * Cauchy(e; 0, gamma)

Both halves together integrate to one for any alpha in [0, 2].  The pulse
transmit time is unknown and profiled out by a one-dimensional
golden-section maximization per measurement.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_LOG_2PI = np.log(2.0 * np.pi)
_INV_PHI = (np.sqrt(5.0) - 1.0) / 2.0

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class UwbErrorModel:
    """Mixture weights and scales of the arrival-error density (seconds)."""

    alpha: float = 0.2
    sigma: float = 0.1e-9
    gamma: float = 2.0e-9

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 2.0:
            raise ValueError("alpha must lie in [0, 2]")
        if self.sigma <= 0 or self.gamma <= 0:
            raise ValueError("sigma and gamma must be positive")

    def logpdf(self, e):
        """Log-density of arrival errors; e >= 0 falls in the Cauchy branch."""
        e = np.asarray(e, dtype=float)
        with np.errstate(divide="ignore"):
            log_gauss = (
                np.log(2.0 - self.alpha)
                - 0.5 * (_LOG_2PI + 2 * np.log(self.sigma))
                - 0.5 * (e / self.sigma) ** 2
            )
            log_cauchy = (
                np.log(self.alpha)
                - np.log(np.pi * self.gamma)
                - np.log1p((e / self.gamma) ** 2)
            )
        return np.where(e < 0, log_gauss, log_cauchy)

    def sample(self, gen: np.random.Generator, size) -> np.ndarray:
        """Draw arrival errors from the mixture."""
        positive = gen.random(size) < self.alpha / 2.0
        gauss = -np.abs(gen.normal(0.0, self.sigma, size))
        cauchy = np.abs(gen.standard_cauchy(size) * self.gamma)
        return np.where(positive, cauchy, gauss)


@dataclass(frozen=True)
class UwbScene:
    """Receiver geometry and timing of the positioning setup."""

    receivers: np.ndarray  # (n_receivers, 3), navigation frame, meters
    c: float = SPEED_OF_LIGHT
    imu_rate: float = 120.0
    uwb_every: int = 12  # one UWB pulse per this many IMU samples (~10 Hz)

    def __post_init__(self):
        object.__setattr__(self, "receivers", np.asarray(self.receivers, dtype=float))
        if self.receivers.ndim != 2 or self.receivers.shape[1] != 3:
            raise ValueError("receivers must be an (n, 3) array")
        # Positioning is unsolvable from a degenerate receiver cloud.
        centered = self.receivers - self.receivers.mean(axis=0)
        if np.linalg.matrix_rank(centered, tol=1e-9) < 3:
            raise ValueError("receiver positions must span three dimensions")

    @property
    def n_receivers(self) -> int:
        return self.receivers.shape[0]

    @property
    def sample_period(self) -> float:
        return 1.0 / self.imu_rate

    def ranges(self, p: np.ndarray) -> np.ndarray:
        """Distances (n, n_receivers) from positions (n, 3) to each receiver."""
        diff = p[:, None, :] - self.receivers[None, :, :]
        return np.linalg.norm(diff, axis=2)


def uwb_loglik(scene: UwbScene, err: UwbErrorModel, p, tau, y_row) -> np.ndarray:
    """Joint log-likelihood of one pulse's arrival times.

    p is (n, 3) positions, tau a scalar or length-n pulse time, y_row the
    per-receiver arrival times.  Returns (n,).
    """
    p = np.atleast_2d(np.asarray(p, dtype=float))
    tau = np.asarray(tau, dtype=float)
    residuals = np.asarray(y_row)[None, :] - tau.reshape(-1, 1) - scene.ranges(p) / scene.c
    return err.logpdf(residuals).sum(axis=1)


def profile_pulse_time(
    scene: UwbScene, err: UwbErrorModel, p, y_row, iterations: int = 24
):
    """Profile the unknown transmit time out of the arrival likelihood.

    Golden-section maximization of the joint log-likelihood over tau, run
    in parallel across the particle batch.  The search window spans from
    well below the earliest physically consistent pulse time (earliest
    arrival minus maximum range delay and Cauchy slack) up to just above it.
    Returns (profiled log-likelihood (n,), tau-hat (n,)).
    """
    p = np.atleast_2d(np.asarray(p, dtype=float))
    y_row = np.asarray(y_row, dtype=float)
    delays = scene.ranges(p) / scene.c
    tau_upper = np.min(y_row[None, :] - delays, axis=1) + 10.0 * err.sigma
    window = 30.0 * err.gamma + np.ptp(y_row) + (np.max(delays, axis=1) - np.min(delays, axis=1))
    a = tau_upper - window
    b = tau_upper

    def value(tau):
        residuals = y_row[None, :] - tau[:, None] - delays
        return err.logpdf(residuals).sum(axis=1)

    c1 = b - _INV_PHI * (b - a)
    c2 = a + _INV_PHI * (b - a)
    f1, f2 = value(c1), value(c2)
    for _ in range(iterations):
        take_left = f1 >= f2  # maximum bracketed in [a, c2] vs [c1, b]
        b = np.where(take_left, c2, b)
        a = np.where(take_left, a, c1)
        c1 = b - _INV_PHI * (b - a)
        c2 = a + _INV_PHI * (b - a)
        f1, f2 = value(c1), value(c2)
    tau_hat = (a + b) / 2.0
    return value(tau_hat), tau_hat
