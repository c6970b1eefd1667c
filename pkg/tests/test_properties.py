"""Property-based checks over generated pairs, squares and serialized matrices."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from weakgroup.conformance import GeneratorSpec, Plant, generate_pair, make_rng, random_square
from weakgroup.ginverse import (
    commutation_analysis,
    core_ep,
    weak_group,
    weighted_core_ep,
    weighted_weak_group,
    wwg_representations,
)
from weakgroup.matrixio import Format, parse_matrix, serialize_matrix
from weakgroup.numeric import residual
from weakgroup.relations import lemma_equiv_suite, relation_block_analysis, wg_below
from weakgroup.spectral import w_drazin

SETTINGS = settings(max_examples=40, deadline=None)

specs = st.builds(
    GeneratorSpec,
    core_dim=st.integers(1, 6),
    nil_dim_x=st.integers(0, 4),
    nil_dim_y=st.integers(0, 4),
    plant=st.sets(st.sampled_from([Plant.A2_ZERO, Plant.W2_ZERO, Plant.COMMUTING_CONDITION,
                                   Plant.TRANSFER_RIGHT, Plant.TRANSFER_LEFT]), max_size=2),
)
seeds = st.integers(0, 2**63 - 1)


@SETTINGS
@given(spec=specs, seed=seeds)
def test_weighted_inverses_equal_closed_forms(spec, seed):
    t = generate_pair(spec, seed)
    X = weighted_weak_group(t.A, t.W)
    assert residual(X, t.wwg_closed_form) <= 1e-8
    assert residual(w_drazin(t.A, t.W), t.wdrazin_closed_form) <= 1e-8
    assert residual(weighted_core_ep(t.A, t.W), t.wcoreep_closed_form) <= 1e-8
    AW = t.A @ t.W
    assert residual(AW @ X @ t.W @ X, X) <= 1e-8


@SETTINGS
@given(spec=specs, seed=seeds)
def test_routes_and_commutation_are_consistent(spec, seed):
    t = generate_pair(spec, seed)
    assert wwg_representations(t.A, t.W).max_pairwise_residual <= 1e-8
    assert commutation_analysis(t.A, t.W, strict=False).consistent


@SETTINGS
@given(spec=specs, seed=seeds)
def test_relation_reflexive_and_block_consistent(spec, seed):
    t = generate_pair(spec, seed)
    r = relation_block_analysis(t.A, t.W, t.A)
    assert r.consistent and r.direct_right and r.direct_left


@SETTINGS
@given(core=st.integers(0, 5), nil=st.integers(0, 3), seed=seeds)
def test_weak_group_on_random_squares(core, nil, seed):
    if core + nil == 0:
        return
    A = random_square(make_rng(seed), core, nil)
    X = weak_group(A)
    assert residual(A @ X @ X, X) <= 1e-8
    assert residual(A @ X, core_ep(A) @ A) <= 1e-8
    assert wg_below(A, A)
    assert lemma_equiv_suite(A, A).consistent


complex_entries = st.complex_numbers(allow_nan=False, allow_infinity=False)


@settings(max_examples=60, deadline=None)
@given(M=arrays(np.complex128, st.tuples(st.integers(0, 4), st.integers(0, 4)),
                elements=complex_entries),
       fmt=st.sampled_from(list(Format)))
def test_serialization_round_trip(M, fmt):
    back = parse_matrix(serialize_matrix(M, fmt)).matrix
    assert back.shape == M.shape
    assert np.array_equal(back.view(np.uint64), M.view(np.uint64))
