import numpy as np
import pytest

from coherence_duality import qmath


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def singlet_dm():
    return qmath.projector(np.array([0, 1, -1, 0]) / np.sqrt(2))
