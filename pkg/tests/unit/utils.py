import json
import os
from functools import lru_cache

import numpy as np
from hypothesis import strategies as st

from hermpert.core import parse_matrix
from hermpert.exceptions import HermPertException
from hermpert.harness import generate_instance
from hermpert.structs.error_report import ErrorReport
from hermpert.structs.matrix import HermitianMatrix
from hermpert.structs.study import EnsembleConfig

seeds = st.integers(min_value=0, max_value=2**32 - 1)
block_specs = st.sampled_from([(1, 1, 1), (2, 1), (1, 2), (2, 1, 1), (3, 1), (2, 2)])


@lru_cache
def get_fixture_text(filename: str) -> str:
    path = os.path.join(os.path.dirname(__file__), "fixtures", filename)
    with open(path) as f:
        return f.read()


@lru_cache
def get_fixture_matrix(filename: str) -> HermitianMatrix:
    return parse_matrix(get_fixture_text(filename), hermitian=True)


@lru_cache
def get_error_inputs():
    path = os.path.join(os.path.dirname(__file__), "fixtures", "error_inputs.json")
    with open(path) as f:
        return json.load(f)


def seeded_instance(seed: int, block_spec=(2, 1, 1), scale: float = 1.0):
    cfg = EnsembleConfig(seed=seed, n=sum(block_spec), block_spec=list(block_spec))
    a, f = generate_instance(cfg, 0)
    return a, f.scaled(scale)


def seeded_hermitian(seed: int, n: int) -> HermitianMatrix:
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return HermitianMatrix.from_array((x + x.conj().T) / 2)


def standard_order(u: np.ndarray) -> np.ndarray:
    """Column index of the eigenvector closest to each unit vector."""
    return np.argmax(np.abs(u), axis=1)


def validate_exception(error_input, excinfo):
    assert isinstance(excinfo.value.args[0], ErrorReport)
    assert isinstance(excinfo.value, HermPertException)
    if "code" in error_input:
        assert excinfo.value.code == error_input["code"]
    if "line" in error_input:
        assert excinfo.value.line == error_input["line"]
    if "column" in error_input:
        assert excinfo.value.column == error_input["column"]
