import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from scatgp.filterbank import FilterBankConfig, build_filterbank
from scatgp.scattering import (VARIANT_GLOBAL, VARIANT_ROTINV, VARIANT_WINDOWED,
                               ScatteringConfig)


@pytest.fixture(scope="session")
def bank_32_3_8():
    return build_filterbank(FilterBankConfig(32, 3, 8))


@pytest.fixture(scope="session")
def bank_32_4_8():
    return build_filterbank(FilterBankConfig(32, 4, 8))


@pytest.fixture(scope="session")
def global_cfg_32_3_8(bank_32_3_8):
    return ScatteringConfig(bank=bank_32_3_8.config, max_order=2,
                            variant=VARIANT_GLOBAL)


@pytest.fixture(scope="session")
def windowed_cfg_32_3_8(bank_32_3_8):
    return ScatteringConfig(bank=bank_32_3_8.config, max_order=2,
                            variant=VARIANT_WINDOWED)


@pytest.fixture(scope="session")
def rotinv_cfg_32_3_8(bank_32_3_8):
    return ScatteringConfig(bank=bank_32_3_8.config, max_order=2,
                            variant=VARIANT_ROTINV)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
