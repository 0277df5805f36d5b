from math import comb

import pytest

from src.models.simplicial import Truncation
from src.services.fixtures import (
    DEFAULT_FIXTURES, FIXTURES, eilenberg_maclane, get_fixture, mutated_face, mutated_product, surjections,
)


class TestSurjections:
    def test_values(self):
        assert surjections(2, 1) == ['001', '011']
        assert surjections(1, 1) == ['01']
        assert surjections(1, 2) == []

    @pytest.mark.parametrize('n, m', [(3, 1), (4, 2), (4, 4)])
    def test_count(self, n, m):
        assert len(surjections(n, m)) == comb(n, m)


class TestFixtures:
    @pytest.mark.parametrize('m', [0, 1, 2, 3])
    def test_eilenberg_maclane_dimensions(self, qq, m):
        X = eilenberg_maclane(m, qq, Truncation(4, 1))
        assert [X.dim(n, 1) for n in range(5)] == [comb(n, m) for n in range(5)]

    def test_faces_delete_a_value(self, qq):
        X = eilenberg_maclane(1, qq, Truncation(2, 1))
        one = qq.one
        assert X.face(0, 2, 1).column('x.001') == {'x.01': one}
        assert X.face(0, 2, 1).column('x.011') == {}
        assert X.degeneracy(1, 1, 1).column('x.01') == {'x.011': one}

    def test_free_algebra_weights(self, build):
        X = build('free2', N=3, W=3)
        assert X.label_weight(2, 'y.012') == 2
        assert X.label_weight(2, 'x.001*y.012') == 3
        assert 'y.012*y.012' not in X.basis(2, 3)

    def test_free_algebra_products(self, build):
        X = build('free1')
        assert X.product(1, ('x.01', 'x.01')) == {'x.01*x.01': X.field.one}

    def test_registry(self):
        assert set(DEFAULT_FIXTURES) <= set(FIXTURES)
        assert not FIXTURES['K0'].connected
        assert {name for name, f in FIXTURES.items() if f.negative} == {'mutant-face', 'mutant-product'}

    def test_unknown_fixture(self, qq):
        with pytest.raises(KeyError):
            get_fixture('K9', qq, Truncation(2, 2))

    def test_mutations_need_room(self, qq):
        with pytest.raises(ValueError):
            mutated_face(qq, Truncation(2, 1))
        with pytest.raises(ValueError):
            mutated_product(qq, Truncation(2, 1))

    def test_every_fixture_builds(self, field):
        for name in FIXTURES:
            X = get_fixture(name, field, Truncation(3, 2))
            assert X.max_degree == 3
