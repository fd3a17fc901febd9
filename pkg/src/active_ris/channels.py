"""Rician channel synthesis for both link directions.

Uplink: H is the M x N RIS-to-BS matrix and g the length-N user-to-RIS
vector.  Downlink: H is the N x M BS-to-RIS matrix and g the length-N
RIS-to-user row vector (stored 1-D; it left-multiplies).  Each channel is

    sqrt(path_gain) * ( sqrt(K/(K+1)) * LoS + sqrt(1/(K+1)) * NLoS ),

with the LoS part built from steering vectors and the NLoS part i.i.d.
unit-variance circularly-symmetric complex Gaussian.  Sampling is
deterministic given an explicit Generator; batched draws consume the
stream in a fixed order (H first, then g).
"""

from dataclasses import dataclass

import numpy as np

from .config import SystemConfig
from .geometry import steering_vector

_SQRT_HALF = np.sqrt(0.5)


@dataclass
class ChannelRealization:
    """One random draw of (H, g) for a link direction."""

    H: np.ndarray
    g: np.ndarray
    direction: str


def los_components(cfg: SystemConfig, direction: str) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic LoS parts (Hbar, gbar) for the given direction.

    Hbar is rank one (outer product of the two steering vectors) with
    unit-modulus entries; gbar is the RIS-side steering vector, conjugated
    for the downlink where it acts as a row.
    """
    a = cfg.angles
    if direction == "up":
        a_bs = steering_vector(cfg.M, a.up_bs_az, a.up_bs_el)
        a_dep = steering_vector(cfg.N, a.up_ris_bs_az, a.up_ris_bs_el)
        Hbar = np.outer(a_bs, a_dep.conj())
        gbar = steering_vector(cfg.N, a.up_user_ris_az, a.up_user_ris_el)
    elif direction == "down":
        a_arr = steering_vector(cfg.N, a.down_bs_ris_az, a.down_bs_ris_el)
        a_bs = steering_vector(cfg.M, a.down_bs_az, a.down_bs_el)
        Hbar = np.outer(a_arr, a_bs.conj())
        gbar = steering_vector(cfg.N, a.down_ris_user_az, a.down_ris_user_el).conj()
    else:
        raise ValueError(f"direction must be 'up' or 'down', got {direction!r}")
    return Hbar, gbar


def _fading_params(cfg: SystemConfig, direction: str):
    if direction == "up":
        return cfg.alpha_u, cfg.k1, cfg.beta_u, cfg.k2
    return cfg.alpha_d, cfg.k3, cfg.beta_d, cfg.k4


def sample_channel_batch(
    cfg: SystemConfig, direction: str, rng: np.random.Generator, n: int
) -> tuple[np.ndarray, np.ndarray]:
    """Draw n i.i.d. realizations; returns H of shape (n, ., .), g of (n, N).

    A single stream read covers the whole batch, so a batch of n draws is
    bit-identical to the first n draws of any larger batch on the same
    stream.
    """
    Hbar, gbar = los_components(cfg, direction)
    alpha, k_h, beta, k_g = _fading_params(cfg, direction)
    rows, cols = Hbar.shape
    nh = n * rows * cols
    raw = rng.standard_normal(2 * (nh + n * gbar.size))
    zH = raw[: 2 * nh].view(np.complex128).reshape(n, rows, cols)
    zg = raw[2 * nh:].view(np.complex128).reshape(n, gbar.size)
    # In-place mix: z holds sqrt(alpha/(K+1)) * NLoS, then LoS is added.
    np.multiply(zH, np.sqrt(alpha / (k_h + 1.0)) * _SQRT_HALF, out=zH)
    zH += np.sqrt(alpha * k_h / (k_h + 1.0)) * Hbar
    np.multiply(zg, np.sqrt(beta / (k_g + 1.0)) * _SQRT_HALF, out=zg)
    zg += np.sqrt(beta * k_g / (k_g + 1.0)) * gbar
    return zH, zg


def sample_channel(
    cfg: SystemConfig, direction: str, rng: np.random.Generator
) -> ChannelRealization:
    """Draw one realization from the given stream."""
    H, g = sample_channel_batch(cfg, direction, rng, 1)
    return ChannelRealization(H=H[0], g=g[0], direction=direction)
