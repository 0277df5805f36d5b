import pytest

from src.models.errors import LabelMismatchError, LayerIndexError, TruncationError, UngradedError
from src.models.simplicial import (
    Truncation, check_simplicial_map, direct_sum, eta_map, homotopy_groups, indecomposables,
    is_connected, moore_complex, power_object, total_homotopy, unnormalized_homology_dim, validate,
)
from src.services.fixtures import eilenberg_maclane, get_fixture
from src.services.schema import parse_schema


def identities(report):
    return {v.identity for v in report.violations}


class TestValidate:
    def test_eilenberg_maclane_objects_are_valid(self, field):
        for m in range(4):
            X = eilenberg_maclane(m, field, Truncation(4, 1))
            assert validate(X).violations == []

    def test_free_algebra_is_valid(self, free1):
        assert validate(free1).violations == []

    def test_two_generator_fixture_is_valid(self, build):
        assert validate(build('free2', N=3, W=3)).violations == []

    def test_mutated_face_is_rejected(self, build):
        report = validate(build('mutant-face', N=3, W=1))
        assert 'd_i d_j = d_{j-1} d_i' in identities(report)

    def test_mutated_product_is_rejected(self, build):
        report = validate(build('mutant-product', N=2, W=2))
        assert 'commutative' in identities(report)

    def test_face_index_checked(self, K1):
        with pytest.raises(LayerIndexError):
            K1.face(3, 2, 1)
        with pytest.raises(LayerIndexError):
            K1.face(0, 0, 1)

    def test_blocks_outside_truncation(self, K1):
        with pytest.raises(TruncationError):
            K1.basis(3, 1)
        with pytest.raises(TruncationError):
            K1.basis(1, 3)


class TestHomotopy:
    @pytest.mark.parametrize('m', [0, 1, 2, 3])
    def test_dold_kan(self, field, m):
        X = eilenberg_maclane(m, field, Truncation(4, 1))
        table = homotopy_groups(X, 3)
        assert table == {(q, 1): int(q == m) for q in range(4)}

    def test_direct_sum_is_componentwise(self, qq):
        X = get_fixture('sum12', qq, Truncation(3, 1))
        assert total_homotopy(homotopy_groups(X, 2)) == {0: 0, 1: 1, 2: 1}

    def test_direct_sum_needs_disjoint_labels(self, qq):
        K = eilenberg_maclane(1, qq, Truncation(2, 1))
        with pytest.raises(LabelMismatchError):
            direct_sum(K, eilenberg_maclane(1, qq, Truncation(2, 1)))

    def test_unsound_truncation_refused(self, K1):
        with pytest.raises(TruncationError):
            homotopy_groups(K1, 2)

    def test_ungraded_refused(self):
        X = parse_schema("field q\ntruncation 1 1\nbasis 1 a\n")
        with pytest.raises(UngradedError):
            homotopy_groups(X, 0)

    def test_degenerate_simplices_do_not_change_homology(self, qq):
        X = get_fixture('free1', qq, Truncation(3, 2))
        moore = moore_complex(X)
        for w in (1, 2):
            for q in (0, 1, 2):
                assert unnormalized_homology_dim(X, q, w) == moore.homology_dim(q, w)

    def test_connected(self, K1, build):
        assert is_connected(K1)
        assert not is_connected(build('K0'))

    def test_free_algebra_homotopy(self, qq):
        X = get_fixture('free1', qq, Truncation(3, 2))
        table = homotopy_groups(X, 2)
        assert table[(1, 1)] == 1
        assert table[(0, 2)] == 0


class TestFunctors:
    def test_powers(self, qq):
        X = get_fixture('free1', qq, Truncation(2, 2))
        P2 = power_object(X, 2)
        assert P2.block(1, 2).dim == X.dim(1, 2) == 1
        assert P2.block(1, 1).dim == 0
        assert power_object(X, 1).block(2, 1).dim == X.dim(2, 1)

    def test_indecomposables(self, qq):
        X = get_fixture('free1', qq, Truncation(2, 2))
        Q = indecomposables(X)
        assert Q.dim(2, 2) == 0
        assert Q.dim(2, 1) == X.dim(2, 1)
        assert validate(Q, check_algebra=False).violations == []

    def test_eta_is_simplicial(self, free1):
        f = eta_map(free1)
        assert check_simplicial_map(f).violations == []
        assert all(f(n, w).is_surjective() for n in range(3) for w in (1, 2))
