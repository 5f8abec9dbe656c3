"""Multimodal likelihood-landscape model.

The observation likelihood is defined directly by a surface over (t, x):
two high-likelihood ridges both start near x = 0, the right ridge is
locally more likely early on but runs into a low-likelihood valley around
t = 70, while the left ridge continues to the end.  Dynamics are a Gaussian
random walk.  Filtering mass follows the right ridge and discovers the
valley too late; smoothing mass takes the left ridge from the start.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..ssm import StateSpaceModel

_LOG_2PI = np.log(2.0 * np.pi)


@dataclass(frozen=True)
class LandscapeSpec:
    """Parameters of the constructed two-ridge surface."""

    horizon: int = 100
    x_min: float = -5.0
    x_max: float = 5.0
    n_x_grid: int = 401
    ridge_slope: float = 0.03  # ridge centers at +/- slope * t
    ridge_width: float = 0.4
    amp_left: float = 1.0
    amp_right: float = 1.2
    valley_start: int = 65
    valley_end: int = 100  # right ridge does not resume after the valley
    log_floor: float = -15.0
    sigma: float = 0.4  # random-walk std
    init_std: float = 0.3


@dataclass(frozen=True)
class LandscapeModel:
    """Gridded log-likelihood surface with linear interpolation in x.

    grid[t-1, j] is log g at time t and state node x_grid[j]; values are
    finite and bounded above, so the weight function is bounded.
    """

    grid: np.ndarray
    x_grid: np.ndarray
    sigma: float
    spec: LandscapeSpec

    def log_g(self, t: int, x: np.ndarray) -> np.ndarray:
        """Interpolated log-likelihood at time t (1-based) for states (n, 1)."""
        return np.interp(
            x[:, 0], self.x_grid, self.grid[t - 1], left=self.spec.log_floor, right=self.spec.log_floor
        )

    @property
    def max_log_weight(self) -> float:
        return float(np.max(self.grid))


def ridge_centers(spec: LandscapeSpec, t: np.ndarray):
    """(left, right) ridge center positions at 1-based times t."""
    return -spec.ridge_slope * t, spec.ridge_slope * t


def build_surface(spec: LandscapeSpec) -> LandscapeModel:
    t = np.arange(1, spec.horizon + 1)
    x = np.linspace(spec.x_min, spec.x_max, spec.n_x_grid)
    left_c, right_c = ridge_centers(spec, t)
    amp_right = np.full(spec.horizon, spec.amp_right)
    in_valley = (t >= spec.valley_start) & (t <= spec.valley_end)
    amp_right[in_valley] = 0.0

    def bump(center, amp):
        # (T, n_x) log of amp * N(x; center, width^2), -inf where amp == 0
        with np.errstate(divide="ignore"):
            log_amp = np.log(amp)[:, None]
        z = (x[None, :] - center[:, None]) / spec.ridge_width
        return log_amp - 0.5 * (_LOG_2PI + 2 * np.log(spec.ridge_width)) - 0.5 * z**2

    pieces = np.stack(
        [
            bump(left_c, np.full(spec.horizon, spec.amp_left)),
            bump(right_c, amp_right),
            np.full((spec.horizon, spec.n_x_grid), spec.log_floor),
        ]
    )
    top = pieces.max(axis=0)
    grid = top + np.log(np.sum(np.exp(pieces - top), axis=0))
    return LandscapeModel(grid=grid, x_grid=x, sigma=spec.sigma, spec=spec)


def landscape_model(spec: LandscapeSpec = LandscapeSpec()):
    """Build the surface and wrap it as a bootstrap state-space model.

    Returns (StateSpaceModel, LandscapeModel); observations are implicit in
    the surface, so the observation sequence is a placeholder.
    """
    surface = build_surface(spec)
    sigma = spec.sigma

    def initial_logpdf(x1):
        return (
            -0.5 * (_LOG_2PI + 2 * np.log(spec.init_std))
            - 0.5 * (x1[:, 0] / spec.init_std) ** 2
        )

    def initial_sample(gen, n):
        return (spec.init_std * gen.standard_normal(n))[:, None]

    def transition_logpdf(t, x_t, x_next):
        z = (x_next[:, 0] - x_t[:, 0]) / sigma
        return -0.5 * (_LOG_2PI + 2 * np.log(sigma)) - 0.5 * z**2

    def transition_sample(t, x_t, gen):
        return x_t + sigma * gen.standard_normal(x_t.shape)

    def observation_logpdf(t, x_t, y_t):
        return surface.log_g(t, x_t)

    ssm = StateSpaceModel(
        state_dim=1,
        horizon=spec.horizon,
        observations=[0.0] * spec.horizon,
        initial_logpdf=initial_logpdf,
        initial_sample=initial_sample,
        transition_logpdf=transition_logpdf,
        transition_sample=transition_sample,
        observation_logpdf=observation_logpdf,
    )
    return ssm, surface


def write_grid_file(surface: LandscapeModel, path) -> None:
    """Plain-text grid: header line, time coordinates, state coordinates,
    then the log-likelihood matrix (rows = state nodes, columns = times)."""
    with open(path, "w") as fh:
        fh.write(
            f"# landscape log-likelihood grid: {surface.x_grid.size} state rows x "
            f"{surface.grid.shape[0]} time columns\n"
        )
        fh.write(" ".join(f"{v:.17g}" for v in np.arange(1, surface.grid.shape[0] + 1)) + "\n")
        fh.write(" ".join(f"{v:.17g}" for v in surface.x_grid) + "\n")
        np.savetxt(fh, surface.grid.T, fmt="%.17g")


def read_grid_file(path, spec: LandscapeSpec = LandscapeSpec()) -> LandscapeModel:
    with open(path) as fh:
        fh.readline()
        times = np.array([float(v) for v in fh.readline().split()])
        x_grid = np.array([float(v) for v in fh.readline().split()])
        grid = np.loadtxt(fh).T
    if grid.shape != (times.size, x_grid.size):
        raise ValueError("grid file shape does not match its coordinate vectors")
    return LandscapeModel(grid=grid, x_grid=x_grid, sigma=spec.sigma, spec=spec)
