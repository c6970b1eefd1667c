import json

import numpy as np
import pytest

from weakgroup.conformance import (
    COND_LIMIT,
    SUITE_CHECKS,
    GeneratorSpec,
    Plant,
    default_specs,
    generate_pair,
    make_rng,
    random_unitary,
    relation_triple,
    run_suite,
)
from weakgroup.errors import InputError
from weakgroup.spectral import index


def test_generate_pair_is_pure():
    spec = GeneratorSpec(3, 1, 2)
    a, b = generate_pair(spec, seed=(9, 4)), generate_pair(spec, seed=(9, 4))
    np.testing.assert_array_equal(a.A, b.A)
    np.testing.assert_array_equal(a.W, b.W)
    assert not np.array_equal(a.A, generate_pair(spec, seed=(9, 5)).A)


def test_generated_shapes_and_core():
    spec = GeneratorSpec(core_dim=2, nil_dim_x=3, nil_dim_y=1)
    truth = generate_pair(spec, seed=1)
    assert truth.A.shape == spec.shape == (3, 5)
    assert truth.W.shape == (5, 3)
    assert index(truth.A @ truth.W).stable_rank == 2
    assert index(truth.W @ truth.A).stable_rank == 2


def test_generated_core_is_separated():
    truth = generate_pair(GeneratorSpec(4, 3, 3), seed=2)
    cp = truth.pair
    for M in (cp.A1, cp.W1):
        assert np.linalg.cond(M) <= COND_LIMIT


def test_plants_are_realised():
    cp = generate_pair(GeneratorSpec(3, 2, 2, plant={Plant.A2_ZERO, Plant.W2_ZERO}), 0).pair
    np.testing.assert_array_equal(cp.A2, 0)
    np.testing.assert_array_equal(cp.W2, 0)
    cp = generate_pair(GeneratorSpec(3, 2, 2, plant={Plant.COMMUTING_CONDITION}), 0).pair
    np.testing.assert_allclose((cp.W1 @ cp.A2 + cp.W2 @ cp.A3) @ cp.W3 @ cp.A3, 0, atol=1e-12)


def test_spec_validation_and_round_trip():
    with pytest.raises(InputError):
        GeneratorSpec(0)
    with pytest.raises(InputError):
        GeneratorSpec(2, magnitude=0.0)
    with pytest.raises(InputError):
        GeneratorSpec.from_dict({"core_dim": 2, "colour": "red"})
    spec = GeneratorSpec(2, 1, 3, 2.0, {Plant.TRANSFER_LEFT})
    assert GeneratorSpec.from_dict(json.loads(json.dumps(spec.to_dict()))) == spec


def test_random_unitary(rng):
    Q = random_unitary(rng, 5)
    np.testing.assert_allclose(Q.conj().T @ Q, np.eye(5), atol=1e-12)


def test_make_rng_streams_differ():
    assert make_rng((1, 2)).random() != make_rng((1, 3)).random()
    assert make_rng(7).random() == make_rng(7).random()


def test_default_specs_cover_the_grid():
    specs = default_specs()
    assert len(specs) == 6 * 5 * 5
    assert {s.core_dim for s in specs} == set(range(1, 7))
    assert max(s.nil_dim_x for s in specs) == 4
    assert any(s.plant for s in specs)


def test_negative_triple_differs(pair):
    B = relation_triple(pair, "RIGHT", False, seed=0)
    assert B.shape == pair.A.shape


def test_run_suite_small():
    report = run_suite(default_specs(), trials=12, seed=3)
    assert report.passed
    assert set(report.checks) == set(SUITE_CHECKS)
    assert all(c.passed == 12 for c in report.checks.values())
    d = json.loads(report.to_json())
    assert d["seed"] == 3 and d["trials"] == 12 and d["failures"] == []


def test_run_suite_independent_of_jobs():
    specs = default_specs(3, 2)
    assert (run_suite(specs, 6, seed=1).to_json()
            == run_suite(specs, 6, seed=1, jobs=2).to_json())


def test_run_suite_rejects_bad_arguments():
    with pytest.raises(InputError):
        run_suite(default_specs(), 0, 1)
    with pytest.raises(InputError):
        run_suite([], 3, 1)
