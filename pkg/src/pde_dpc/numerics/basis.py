"""Gaussian actuator basis and perturbed-sinusoid excitation signals."""

import functools

import numpy as np

from ..dsl.models import ControlBasisConfig
from ..errors import ShapeError
from .grid import Grid1D
from .types import Array, ControlAmplitudes, Field


@functools.lru_cache(maxsize=32)
def basis_matrix(cfg: ControlBasisConfig, grid: Grid1D) -> Array:
    """Actuator profiles exp(−(x−μ_i)²/(2σ²)), shape (n_actuators, n_x)."""
    mu = np.asarray(cfg.mu, dtype=np.float64)
    d = grid.x[None, :] - mu[:, None]
    profiles = np.exp(-(d * d) / (2.0 * cfg.sigma**2))
    profiles.setflags(write=False)
    return profiles


def assemble_control_field(amps: ControlAmplitudes, cfg: ControlBasisConfig, grid: Grid1D) -> Field:
    """f(x) = Σ_i a_i·φ_i(x); leading batch axes of ``amps`` are kept."""
    amps = np.asarray(amps, dtype=np.float64)
    if amps.ndim == 0 or amps.shape[-1] != cfg.n_actuators:
        raise ShapeError(f"Expected {cfg.n_actuators} amplitudes, got shape {amps.shape}")
    return amps @ basis_matrix(cfg, grid)


def generate_training_amplitudes(
    cfg: ControlBasisConfig, n_steps: int, rng_seed: int
) -> ControlAmplitudes:
    """Clipped perturbed sinusoids, shape (n_steps, n_actuators).

    Per actuator: A·sin(2πωt + φ) + ε with t = k / n_steps the fraction of the
    horizon, so ω counts cycles per horizon.
    """
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    exc = cfg.excitation
    n = cfg.n_actuators
    rng = np.random.default_rng(rng_seed)
    amplitude = rng.uniform(exc.amplitude_low, exc.amplitude_high, size=n) * cfg.a_max
    frequency = rng.uniform(exc.frequency_low, exc.frequency_high, size=n)
    phase = rng.uniform(0.0, 2.0 * np.pi, size=n)
    noise = rng.normal(0.0, exc.noise_fraction * cfg.a_max, size=(n_steps, n))

    t = np.arange(n_steps, dtype=np.float64)[:, None] / n_steps
    signal = amplitude * np.sin(2.0 * np.pi * frequency * t + phase) + noise
    return np.clip(signal, -cfg.a_max, cfg.a_max)


def hold_amplitudes(amps: ControlAmplitudes, stride: int) -> ControlAmplitudes:
    """Zero-order hold: repeat every control-rate row ``stride`` times."""
    return np.repeat(np.asarray(amps, dtype=np.float64), stride, axis=0)
