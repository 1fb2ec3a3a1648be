"""Randomized property suites; each runs at least 100 independent cases."""

import numpy as np

from helpers import (
    check_demand_scaling,
    check_diameter_monotonicity,
    check_flow_conservation,
    check_pathwalk_equivalence,
    check_roundtrip,
    check_total_order,
    check_transpose_duality,
)

CASES = 100


def test_transpose_duality_randomized():
    assert check_transpose_duality(np.random.default_rng(101), CASES) >= CASES


def test_flow_conservation_randomized():
    assert check_flow_conservation(np.random.default_rng(102), CASES) >= CASES


def test_pathwalk_matches_kernel_randomized():
    assert check_pathwalk_equivalence(np.random.default_rng(103), CASES) >= CASES


def test_diameter_monotonicity_randomized():
    assert check_diameter_monotonicity(np.random.default_rng(104), CASES) >= CASES


def test_demand_scaling_randomized():
    assert check_demand_scaling(np.random.default_rng(105), CASES) >= CASES


def test_total_order_laws_randomized():
    assert check_total_order(np.random.default_rng(106), CASES) >= CASES


def test_parse_serialize_roundtrip_randomized():
    assert check_roundtrip(np.random.default_rng(107), CASES) >= CASES
