# pylint: disable=missing-function-docstring, missing-module-docstring, missing-class-docstring, duplicate-code

import numpy as np
from faker import Faker

FAKE = Faker()

APP_CONFIG = "src/config/config.ini"
TEST_CONFIG = "tests/config/config.ini"

CATALOG_FILES = {
    "free_schrodinger": "src/catalog/free_schrodinger.json",
    "harmonic": "src/catalog/harmonic.json",
    "heat": "src/catalog/heat.json",
    "davies": "src/catalog/davies.json",
    "kfp": "src/catalog/kfp.json",
}
TRIVIAL_SINGULAR_SPACE = ("harmonic", "davies", "kfp")

DAVIES_GAMMA = 2**-0.5
KFP_Q_RE = np.diag([0.0, 0.25, 0.0, 1.0])
KFP_Q_IM = np.array(
    [
        [0.0, 0.0, 0.0, -0.5],
        [0.0, 0.0, 0.5, 0.0],
        [0.0, 0.5, 0.0, 0.0],
        [-0.5, 0.0, 0.0, 0.0],
    ]
)

SUPPORTED_PQ = ((1.0, 1.0), (1.0, np.inf), (2.0, 2.0), (2.0, np.inf), (np.inf, np.inf))
