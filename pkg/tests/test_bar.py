import pytest

from src.models.errors import LayerIndexError, ResourceCapError, UngradedError
from src.models.freealg import height
from src.models.simplicial import check_simplicial_map, homotopy_groups, validate
from src.services.bar import (
    augmentation, bar, bar_map, build_bar, check_fused_operators, check_operator_identities,
    fused_face, homotopy_h, operator_normal_form, verify_appendix,
)
from src.services.schema import parse_schema


class TestBarObject:
    def test_ungraded_source_refused(self):
        X = parse_schema("field q\ntruncation 1 1\nbasis 1 a\n")
        with pytest.raises(UngradedError):
            bar(X)

    def test_bar_is_valid(self, K1):
        assert validate(bar(K1)).violations == []

    def test_block_size_estimate_is_exact(self, free1):
        B = bar(free1)
        for n in range(3):
            for w in (1, 2):
                assert B.block_size_estimate(n, w) == B.dim(n, w)

    def test_cap_refuses_large_blocks(self, K1):
        B = build_bar(K1, 1, cap=1)
        with pytest.raises(ResourceCapError) as info:
            B.basis(2, 2)
        assert (info.value.n, info.value.w) == (2, 2)

    def test_negative_iteration(self, K1):
        with pytest.raises(LayerIndexError):
            build_bar(K1, -1)

    def test_build_bar_zero_is_identity(self, K1):
        assert build_bar(K1, 0) is K1

    def test_weight_one_homotopy_unchanged(self, K1):
        ours = homotopy_groups(bar(K1), 1)
        theirs = homotopy_groups(K1, 1)
        assert {k: v for k, v in ours.items() if k[1] == 1} == {k: v for k, v in theirs.items() if k[1] == 1}

    def test_bar_is_shared(self, K1):
        assert bar(K1) is bar(K1)
        assert build_bar(K1, 2) is bar(bar(K1))


class TestOperators:
    def test_normal_form_identities_hold(self):
        assert check_operator_identities(3).violations == []

    def test_shifted_homotopy_breaks_identities(self):
        assert check_operator_identities(2, shift=1).violations

    def test_face_normal_form_depends_on_index(self):
        assert fused_face(2, 0, 2).normal_form[0] != fused_face(2, 1, 2).normal_form[0]

    def test_fused_operators_agree(self, K1):
        assert check_fused_operators(K1, 2, 2).violations == []

    def test_fused_operators_agree_on_free_algebra(self, qq, build):
        X = build('free1', qq, N=2, W=2)
        assert check_fused_operators(X, 2, 2).violations == []

    def test_normal_form_of_empty_word(self):
        assert operator_normal_form((), 3) == (0, 1, 2, 3)


class TestMaps:
    def test_augmentation_is_simplicial(self, K1):
        assert check_simplicial_map(augmentation(K1)).violations == []

    def test_bar_of_augmentation_is_simplicial(self, qq, build):
        X = build('K1', qq)
        assert check_simplicial_map(bar_map(augmentation(X))).violations == []

    def test_homotopy_component_shape(self, K1):
        h = homotopy_h(K1, 0, 1, 1)
        assert len(h.domain) == build_bar(K1, 2).dim(1, 1)
        assert len(h.codomain) == bar(K1).dim(2, 1)

    def test_homotopy_index_checked(self, K1):
        with pytest.raises(LayerIndexError):
            homotopy_h(K1, 2, 1, 1)


class TestAppendix:
    @pytest.mark.parametrize('name', ['K1', 'free1'])
    def test_homotopy_verified(self, field, build, name):
        X = build(name, field)
        report = verify_appendix(X, 1)
        assert report.violations == []
        assert report.measurements

    def test_shifted_homotopy_fails(self, K1):
        assert verify_appendix(K1, 1, shift=1).violations

    @pytest.mark.slow
    def test_homotopy_verified_to_degree_two(self, qq, build):
        X = build('free1', qq, N=3, W=2)
        assert verify_appendix(X, 2).violations == []

    @pytest.mark.slow
    @pytest.mark.parametrize('name', ['K1', 'free1'])
    def test_homotopy_verified_to_degree_three(self, field, build, name):
        X = build(name, field, N=4, W=3)
        report = verify_appendix(X, 3)
        assert report.violations == []
        assert report.skipped == []


def evaluate(Y, q, tree, base_height):
    """Multiply out every layer above the labels of Y, one node at a time"""
    if height(tree) == base_height:
        return {tree: Y.field.one}
    parts = [evaluate(Y, q, child, base_height) for child in tree]
    value = parts[0]
    for part in parts[1:]:
        value = Y.multiply(q, value, part)
    return value


class TestAugmentationByHand:
    @pytest.mark.parametrize('name', ['K1', 'free1'])
    def test_second_augmentation_multiplies_out(self, field, build, name):
        X = build(name, field)
        eps = augmentation(X, 2)
        Y = build_bar(X, 1)
        for q in range(3):
            for w in (1, 2):
                block = eps(q, w)
                for tree in eps.source.basis(q, w):
                    assert block.column(tree) == evaluate(Y, q, tree, Y.label_depth(q))

    def test_first_augmentation_uses_the_product(self, qq, build):
        X = build('free1', qq)
        eps = augmentation(X, 1)
        for tree in eps.source.basis(1, 2):
            assert eps(1, 2).column(tree) == evaluate(X, 1, tree, X.label_depth(1))
