"""Uniform planar array (UPA) responses and RIS phase configurations.

Both the base-station array (M elements) and the RIS (N elements) are
square UPAs with half-wavelength spacing.  Element n sits at grid position
(x, y) with n = x*sqrt(X) + y, x the outer index.  The array response
toward (azimuth, elevation) carries per-element phase

    pi * (x * sin(az) * sin(el) + y * cos(el)),

and the RIS phase pattern couples to the link geometry only through the
scalar

    f = sum_n exp(j * (pi * (x_n * k + y_n * q) + theta_n)),

where (k, q) are sine/cosine differences of the arrival and departure
angles at the RIS.  Every closed-form quantity downstream depends on the
phases only through |f|^2.
"""

from dataclasses import dataclass, fields

import numpy as np

from .errors import DimensionError

TWO_PI = 2.0 * np.pi


def _side(X: int) -> int:
    """Side length of a square array with X elements; rejects non-squares."""
    if X < 1:
        raise DimensionError(f"array size must be >= 1, got {X}")
    side = int(round(np.sqrt(X)))
    if side * side != X:
        raise DimensionError(f"array size must be a perfect square, got {X}")
    return side


def grid_coords(X: int) -> tuple[np.ndarray, np.ndarray]:
    """Element grid coordinates (x, y) in index order n = x*sqrt(X) + y."""
    side = _side(X)
    x = np.repeat(np.arange(side), side)
    y = np.tile(np.arange(side), side)
    return x, y


def steering_vector(X: int, azimuth: float, elevation: float) -> np.ndarray:
    """Unit-modulus UPA response vector of length X (perfect square)."""
    x, y = grid_coords(X)
    phase = np.pi * (x * (np.sin(azimuth) * np.sin(elevation)) + y * np.cos(elevation))
    return np.exp(1j * phase)


@dataclass
class PhaseConfig:
    """RIS phase shifts, one per element, with their quantization depth.

    ``bits`` >= 1 means every theta lies on the uniform grid
    {0, 2*pi/2**bits, ...}; ``bits`` = 0 is the sentinel for continuous
    (unquantized) phases.
    """

    thetas: np.ndarray
    bits: int = 0

    def __post_init__(self):
        self.thetas = np.asarray(self.thetas, dtype=np.float64)
        if self.thetas.ndim != 1:
            raise DimensionError("thetas must be a 1-D vector")
        _side(self.thetas.size)
        if self.bits < 0:
            raise ValueError("bits must be >= 0")
        if self.bits > 0:
            step = TWO_PI / (1 << self.bits)
            idx = self.thetas / step
            if not np.allclose(idx, np.round(idx), atol=1e-9):
                raise ValueError(f"phases not on the {self.bits}-bit grid")

    def __len__(self) -> int:
        return self.thetas.size


def quantize_phases(thetas: np.ndarray, bits: int) -> np.ndarray:
    """Snap phases to the nearest point of the b-bit grid in [0, 2*pi).

    Exact midpoints round toward the smaller grid index, so the mapping is
    deterministic.
    """
    if bits == 0:
        return np.mod(np.asarray(thetas, dtype=np.float64), TWO_PI)
    step = TWO_PI / (1 << bits)
    wrapped = np.mod(np.asarray(thetas, dtype=np.float64), TWO_PI)
    idx = np.ceil(wrapped / step - 0.5).astype(np.int64) % (1 << bits)
    return idx * step


def geometry_phase(N: int, k: float, q: float) -> np.ndarray:
    """Per-element geometric phase pi*(x*k + y*q) for an N-element RIS."""
    x, y = grid_coords(N)
    return np.pi * (x * k + y * q)


def f_scalar(phases: PhaseConfig, k: float, q: float) -> complex:
    """Array-gain scalar f for a phase pattern and geometry pair (k, q).

    |f| <= N, with equality exactly when all summand phases coincide.
    """
    return f_scalar_batch(phases.thetas[None, :], k, q)[0]


def f_scalar_batch(thetas: np.ndarray, k: float, q: float) -> np.ndarray:
    """Vectorized f over a (batch, N) matrix of phase patterns."""
    thetas = np.atleast_2d(np.asarray(thetas, dtype=np.float64))
    geo = geometry_phase(thetas.shape[1], k, q)
    return np.exp(1j * (geo[None, :] + thetas)).sum(axis=1)


def aligned_phases(k: float, q: float, N: int, bits: int) -> PhaseConfig:
    """Phase pattern cancelling the geometric phase, then quantized.

    With bits = 0 the cancellation is exact and |f| = N; with bits >= 1
    each phase is snapped to the b-bit grid.
    """
    target = np.mod(-geometry_phase(N, k, q), TWO_PI)
    return PhaseConfig(quantize_phases(target, bits), bits)


@dataclass(frozen=True)
class AngleSet:
    """Azimuth/elevation pairs (radians) for every line-of-sight path.

    Uplink: arrival at the RIS from the user, departure from the RIS to
    the BS, and the BS-side angle of the RIS-BS channel.  Downlink:
    arrival at the RIS from the BS, the BS-side departure angle, and the
    departure from the RIS to the user.  Angles are normalized to
    [0, 2*pi) on construction.
    """

    up_user_ris_az: float = np.pi / 3
    up_user_ris_el: float = np.pi / 4
    up_ris_bs_az: float = np.pi / 6
    up_ris_bs_el: float = np.pi / 3
    up_bs_az: float = np.pi / 4
    up_bs_el: float = np.pi / 6
    down_bs_ris_az: float = np.pi / 6
    down_bs_ris_el: float = np.pi / 3
    down_bs_az: float = np.pi / 4
    down_bs_el: float = np.pi / 6
    down_ris_user_az: float = np.pi / 3
    down_ris_user_el: float = np.pi / 4

    def __post_init__(self):
        for f in fields(self):
            v = float(getattr(self, f.name))
            if not np.isfinite(v):
                raise ValueError(f"angle {f.name} must be finite")
            object.__setattr__(self, f.name, float(np.mod(v, TWO_PI)))


def angle_gains(angles: AngleSet, link: str) -> tuple[float, float]:
    """Geometry pair (k, q) feeding f for the given link direction.

    k is the difference of sin(az)*sin(el) between the RIS arrival and
    departure directions, q the difference of cos(el).  The downlink
    departure direction is the RIS-to-user path, which is the unique
    choice consistent with f defined from the RIS-side response vectors.
    """
    if link == "up":
        ra, re = angles.up_user_ris_az, angles.up_user_ris_el
        ta, te = angles.up_ris_bs_az, angles.up_ris_bs_el
    elif link == "down":
        ra, re = angles.down_bs_ris_az, angles.down_bs_ris_el
        ta, te = angles.down_ris_user_az, angles.down_ris_user_el
    else:
        raise ValueError(f"link must be 'up' or 'down', got {link!r}")
    k = np.sin(ra) * np.sin(re) - np.sin(ta) * np.sin(te)
    q = np.cos(re) - np.cos(te)
    return float(k), float(q)
