import numpy as np
import pytest
from dataclasses import replace

from active_ris.config import SystemConfig, default_config


@pytest.fixture
def cfg_default() -> SystemConfig:
    return default_config()


@pytest.fixture
def cfg_small() -> SystemConfig:
    """4x4 desk config with unit path gains (composite gain 1 at K=0)."""
    return replace(default_config(), M=4, N=4,
                   alpha_u=1.0, beta_u=1.0, alpha_d=1.0, beta_d=1.0,
                   k1=0.0, k2=0.0, k3=0.0, k4=0.0)


def zero_phases(N: int, bits: int = 0):
    from active_ris.geometry import PhaseConfig
    return PhaseConfig(np.zeros(N), bits)
