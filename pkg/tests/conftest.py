import numpy as np
import pytest
from hypothesis import settings

from gerber_shiu import RiskParams, phi0
from gerber_shiu.risk_model import (
    ClaimCausingRuin,
    CombinationOfExponentials,
    DeficitAtRuin,
    Erlang2,
    Exponential,
    RuinIndicator,
)

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

EXACT_RUIN_AT_5 = 0.27054119887373695  # ODE oracle, cross-checked against the decay-condition formula


@pytest.fixture(scope="session")
def base_params():
    return RiskParams(c=1.2, lam=1.0, delta=0.01)


@pytest.fixture(scope="session")
def models():
    return {"exp": Exponential(1.0), "erlang2": Erlang2(2.0), "combexp": CombinationOfExponentials()}


@pytest.fixture(scope="session")
def penalties():
    return {"ruin": RuinIndicator(), "claimcause": ClaimCausingRuin(), "deficit": DeficitAtRuin()}


@pytest.fixture(scope="session")
def phi0_cache(base_params, models, penalties):
    cache = {}

    def get(model_key, pen_key):
        key = (model_key, pen_key)
        if key not in cache:
            cache[key] = phi0(base_params, models[model_key], penalties[pen_key]).value
        return cache[key]

    return get


@pytest.fixture
def rng():
    return np.random.default_rng(7)
