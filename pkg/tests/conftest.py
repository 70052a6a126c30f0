from __future__ import annotations

import numpy as np
import pytest
from hypothesis import settings

from compatnorm.hermit import SX, SY, SZ
from compatnorm.measure import EffectTuple

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

SEEDS = range(2**32)


@pytest.fixture
def pauli_pair() -> EffectTuple:
    return EffectTuple.of([(np.eye(2) + SX) / 2, (np.eye(2) + SZ) / 2])


@pytest.fixture
def pauli_triple() -> EffectTuple:
    return EffectTuple.of([(np.eye(2) + p) / 2 for p in (SX, SY, SZ)])
