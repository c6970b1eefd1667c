"""Small worked examples with known answers, one per operation."""

import numpy as np
import pytest

from weakgroup.conformance import GeneratorSpec, Plant, generate_pair, make_rng, run_suite
from weakgroup.errors import IndexTooLarge, NotComplementary, NotConsistent
from weakgroup.ginverse import (
    Variant,
    characterization_check,
    commutation_analysis,
    core_ep,
    core_inverse,
    group_inverse,
    outer_inverse_prescribed,
    weak_group,
    weighted_core_ep,
    weighted_weak_group,
    wwg_representations,
)
from weakgroup.numeric import (
    SubspaceBasis,
    complement_basis,
    invert,
    moore_penrose,
    null_basis,
    numerical_rank,
    oblique_projector,
    orthogonal_projector,
    range_basis,
)
from weakgroup.relations import (
    EXAMPLE_A,
    EXAMPLE_B,
    EXAMPLE_C,
    lemma_equiv_suite,
    preorder_probe,
    relation_block_analysis,
)
from weakgroup.spectral import canonical_pair, drazin, index, series_TU, w_drazin

I3 = np.eye(3)
E1 = np.array([[1.0], [0.0], [0.0]])
A_SQUARED = np.array([[1, 1, 2], [0, 0, 0], [0, 0, 0]])
A_WG = np.array([[1, 1, 1], [0, 0, 0], [0, 0, 0]])


def span(*cols):
    return range_basis(np.array(cols, dtype=complex).T)


@pytest.mark.parametrize("M,r", [(I3, 3), (np.zeros((3, 3)), 0), (EXAMPLE_A, 2)])
def test_rank(M, r):
    assert numerical_rank(M) == r


def test_moore_penrose_small():
    np.testing.assert_allclose(moore_penrose(I3), I3, atol=1e-15)
    np.testing.assert_allclose(moore_penrose(np.diag([2.0, 0.0])), np.diag([0.5, 0.0]))


def test_range_basis_small():
    np.testing.assert_allclose(range_basis(np.eye(2)).frame, np.eye(2))
    assert range_basis(np.zeros((3, 3))).dim == 0
    np.testing.assert_allclose(range_basis(EXAMPLE_A @ EXAMPLE_A).frame, E1)


def test_complement_and_projectors_small():
    C = complement_basis(span([1, 0, 0]))
    np.testing.assert_allclose(orthogonal_projector(C), np.diag([0, 1, 1]), atol=1e-15)
    assert complement_basis(SubspaceBasis.full(3)).dim == 0
    np.testing.assert_allclose(orthogonal_projector(span([1, 0, 0])), np.diag([1, 0, 0]))
    np.testing.assert_allclose(orthogonal_projector(SubspaceBasis.full(2)), np.eye(2))


def test_oblique_projector_small():
    P = oblique_projector(span([1, 0]), span([0, 1]))
    np.testing.assert_allclose(P, np.diag([1, 0]), atol=1e-15)
    P = oblique_projector(span([1, 0, 0]), span([-1, 1, 0], [-2, 0, 1]))
    np.testing.assert_allclose(P, A_SQUARED, atol=1e-14)
    with pytest.raises(NotComplementary):
        oblique_projector(span([1, 0]), span([1, 0]))


def test_invert_small():
    np.testing.assert_allclose(invert(np.diag([2.0, 4.0])), np.diag([0.5, 0.25]))
    np.testing.assert_allclose(invert(np.eye(3)), np.eye(3))
    np.testing.assert_allclose(invert(np.array([[1.0, 1.0], [0.0, 1.0]])), [[1, -1], [0, 1]])


def test_index_small():
    assert index(np.diag([1.0, 2.0, 3.0])).index == 0
    assert index(np.eye(3, k=1)).index == 3
    assert index(EXAMPLE_A).index == 2


def test_drazin_small():
    M = np.array([[2.0, 1.0], [1.0, 1.0]])
    np.testing.assert_allclose(drazin(M), np.linalg.inv(M), atol=1e-14)
    np.testing.assert_array_equal(drazin(np.eye(3, k=1)), 0)
    np.testing.assert_allclose(drazin(EXAMPLE_A), A_SQUARED, atol=1e-14)


def test_w_drazin_small(pair):
    M = np.array([[2.0, 1.0], [1.0, 1.0]])
    np.testing.assert_allclose(w_drazin(M, np.eye(2)), np.linalg.inv(M), atol=1e-14)
    np.testing.assert_allclose(w_drazin(EXAMPLE_A, I3), A_SQUARED, atol=1e-14)
    np.testing.assert_allclose(w_drazin(pair.A, pair.W), pair.wdrazin_closed_form, atol=1e-10)


def test_canonical_pair_small():
    cp = canonical_pair(np.eye(4), np.eye(4))
    assert cp.core_dim == 4 and cp.A3.shape == (0, 0)
    np.testing.assert_allclose(cp.A1, np.eye(4), atol=1e-15)
    np.testing.assert_allclose(cp.W1, np.eye(4), atol=1e-15)
    cp = canonical_pair(EXAMPLE_A, I3)
    assert cp.p1.dim == 1
    np.testing.assert_allclose(cp.A1, [[1]], atol=1e-14)
    assert cp.A3.shape == (2, 2)
    np.testing.assert_allclose(cp.A3 @ cp.A3, 0, atol=1e-14)


def test_series_TU_small():
    cp = generate_pair(GeneratorSpec(2, 2, 2, plant={Plant.A2_ZERO, Plant.W2_ZERO}), 1).pair
    T, U = series_TU(cp)
    np.testing.assert_allclose(T, 0, atol=1e-15)
    np.testing.assert_allclose(U, 0, atol=1e-15)
    cp = canonical_pair(np.diag([2.0, 0.0]) + np.array([[0, 1.0], [0, 0]]), np.eye(2))
    # A3 = 0, so the series stops after its first term
    H = np.linalg.inv(cp.A1 @ cp.W1)
    np.testing.assert_allclose(cp.T, H @ H @ (cp.A1 @ cp.W2 + cp.A2 @ cp.W3), atol=1e-14)


def test_core_ep_small():
    M = np.array([[2.0, 1.0], [1.0, 1.0]])
    np.testing.assert_allclose(core_ep(M), np.linalg.inv(M), atol=1e-14)
    np.testing.assert_allclose(core_ep(EXAMPLE_A), np.diag([1, 0, 0]), atol=1e-14)
    np.testing.assert_array_equal(core_ep(np.eye(3, k=1)), 0)


def test_weighted_core_ep_small(pair):
    A = np.diag([1.0, 0.0])
    W = np.diag([1.0, 3.0])
    np.testing.assert_allclose(weighted_core_ep(A, W), np.diag([1, 0]), atol=1e-14)
    np.testing.assert_allclose(weighted_core_ep(EXAMPLE_A, I3), core_ep(EXAMPLE_A), atol=1e-14)
    np.testing.assert_allclose(weighted_core_ep(pair.A, pair.W), pair.wcoreep_closed_form,
                               atol=1e-10)


def test_weak_group_small():
    np.testing.assert_allclose(weak_group(EXAMPLE_A), A_WG, atol=1e-12)
    np.testing.assert_allclose(weak_group(EXAMPLE_B), [[1, 1, 0], [0, 0, 0], [0, 0, 0]],
                               atol=1e-12)
    np.testing.assert_allclose(weak_group(np.diag([2.0, 0.0])), np.diag([0.5, 0]), atol=1e-15)


def test_weighted_weak_group_small():
    A = np.diag([1.0, 0.0])
    W = np.diag([1.0, 3.0])
    np.testing.assert_allclose(weighted_weak_group(A, W), np.diag([1, 0]), atol=1e-14)
    np.testing.assert_allclose(weighted_weak_group(EXAMPLE_A, I3), A_WG, atol=1e-12)


def test_group_inverse_small():
    M = np.array([[2.0, 1.0], [1.0, 1.0]])
    np.testing.assert_allclose(group_inverse(M), np.linalg.inv(M), atol=1e-14)
    np.testing.assert_allclose(group_inverse(np.diag([3.0, 0.0])), np.diag([1 / 3, 0]))
    with pytest.raises(IndexTooLarge):
        group_inverse(EXAMPLE_A)


def test_core_inverse_small():
    M = np.array([[2.0, 1.0], [1.0, 1.0]])
    np.testing.assert_allclose(core_inverse(M), np.linalg.inv(M), atol=1e-14)
    np.testing.assert_allclose(core_inverse(np.diag([2.0, 0.0])), np.diag([0.5, 0]))
    rng = make_rng(3)
    S = rng.standard_normal((4, 4))
    M = S @ np.diag([1.5, -2.0, 0.7, 0.0]) @ np.linalg.inv(S)
    np.testing.assert_allclose(core_inverse(M), core_ep(M), atol=1e-10)


def test_outer_inverse_small():
    M = np.array([[2.0, 1.0], [1.0, 1.0]])
    X = outer_inverse_prescribed(M, SubspaceBasis.full(2), SubspaceBasis.zero(2))
    np.testing.assert_allclose(X, np.linalg.inv(M), atol=1e-14)
    # the weak group inverse is the outer inverse with range R(A^d), null space N(A^cEP A)
    T = range_basis(drazin(EXAMPLE_A))
    S = null_basis(core_ep(EXAMPLE_A) @ EXAMPLE_A)
    np.testing.assert_allclose(outer_inverse_prescribed(EXAMPLE_A, T, S), A_WG, atol=1e-12)
    # M maps span{e1} into span{e2}, which the null space swallows
    with pytest.raises(NotConsistent):
        outer_inverse_prescribed(np.array([[0.0, 0.0], [1.0, 0.0]]), span([1, 0]), span([0, 1]))


def test_routes_small():
    table = wwg_representations(EXAMPLE_A, I3)
    for X in table.entries.values():
        np.testing.assert_allclose(X, A_WG, atol=1e-10)
    table = wwg_representations(np.eye(3), np.eye(3))
    for X in table.entries.values():
        np.testing.assert_allclose(X, np.eye(3), atol=1e-12)


def test_characterization_small():
    truth = generate_pair(GeneratorSpec(3, 2, 2), 13)
    assert not commutation_analysis(truth.A, truth.W).commutes
    assert not characterization_check(truth.A, truth.W, truth.wdrazin_closed_form,
                                      variant=Variant.SYSTEM)
    assert not characterization_check(truth.A, truth.W, np.zeros_like(truth.A),
                                      variant=Variant.SYSTEM)


def test_commutation_small():
    report = commutation_analysis(EXAMPLE_A, I3)
    assert not report.commutes and report.consistent
    report = commutation_analysis(np.eye(3), np.eye(3))
    assert all([report.commutes, report.block_condition, report.square_identity,
                report.aw_square_identity, report.aw_block_condition, report.equals_wdrazin])
    truth = generate_pair(GeneratorSpec(3, 2, 2, plant={Plant.A2_ZERO, Plant.W2_ZERO}), 4)
    report = commutation_analysis(truth.A, truth.W)
    assert report.commutes and report.aw_square_identity and report.equals_wdrazin


def test_relation_analysis_small():
    r = relation_block_analysis(EXAMPLE_A, I3, EXAMPLE_B)
    assert r.direct_right and r.block_right
    cp = canonical_pair(EXAMPLE_A, I3)
    B1, _, B4, _ = cp.blocks_y_x(EXAMPLE_B)
    np.testing.assert_allclose(B1, cp.A1, atol=1e-14)
    np.testing.assert_allclose(B4, 0, atol=1e-14)
    r = relation_block_analysis(EXAMPLE_A, I3, EXAMPLE_A)
    assert r.direct_right and r.block_right and r.direct_left and r.block_left


def test_lemma_small():
    assert not any(lemma_equiv_suite(EXAMPLE_A, EXAMPLE_C).part_ii.values())
    report = lemma_equiv_suite(EXAMPLE_C, EXAMPLE_C)
    assert all(report.part_i.values()) and all(report.part_ii.values())


def test_preorder_trivial_triple():
    report = preorder_probe([(EXAMPLE_A, EXAMPLE_A, EXAMPLE_A)])
    assert report.transitivity_violations == [] and report.antisymmetry_violations == []


def test_generator_small():
    truth = generate_pair(GeneratorSpec(3), 0)
    np.testing.assert_allclose(truth.wwg_closed_form, truth.wdrazin_closed_form, atol=1e-12)
    np.testing.assert_allclose(truth.wwg_closed_form, truth.wcoreep_closed_form, atol=1e-12)
    truth = generate_pair(GeneratorSpec(2, 2, 2), 42)
    assert index(truth.A @ truth.W).index <= 3
    again = generate_pair(GeneratorSpec(2, 2, 2), 42)
    for a, b in ((truth.A, again.A), (truth.W, again.W), (truth.wwg_closed_form,
                                                           again.wwg_closed_form)):
        assert np.array_equal(a, b)


def test_suite_small():
    report = run_suite([GeneratorSpec(2)], trials=1, seed=0)
    assert report.passed
    assert max(c.max_residual for c in report.checks.values()) < 1e-12
    report = run_suite([GeneratorSpec(2, 2, 2, plant={Plant.COMMUTING_CONDITION})], 5, 1)
    assert report.checks["commutation.planted"].passed == 5
