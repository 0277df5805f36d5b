import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from src.models.errors import CanonicalFormError, LayerIndexError, NaturalityError
from src.models.exactlin import Field, LabeledBasis, LinearMap
from src.models.freealg import (
    AlgebraElement, LayerOperator, LayerStep, canonicalize, comult_layer, count_multisets,
    count_trees, counit_layer, diagonal_operator, enumerate_multisets, enumerate_trees, eta_at_layer,
    eta_indecomposables, height, is_canonical, leaves, multiply, multiset_expand,
    parse_monomial, render,
)
from src.models.simplicial import Truncation
from src.services.fixtures import get_fixture

QQ = Field(0)

labels = st.sampled_from(['a', 'b', 'c'])
depth1 = st.lists(labels, min_size=1, max_size=3)
depth2 = st.lists(depth1, min_size=1, max_size=3)
depth3 = st.lists(depth2, min_size=1, max_size=2)


def element(raw):
    tree = canonicalize(raw)
    return AlgebraElement.monomial(tree, 0, QQ)


class TestCanonicalForm:
    def test_sorts_every_layer(self):
        assert canonicalize([['b', 'a'], ['a']]) == (('a',), ('a', 'b'))

    def test_depth_checked(self):
        with pytest.raises(CanonicalFormError):
            canonicalize(['a'], depth=2)

    def test_empty_and_ragged_rejected(self):
        with pytest.raises(CanonicalFormError):
            canonicalize([])
        with pytest.raises(CanonicalFormError):
            canonicalize([['a'], 'b'])

    def test_render_and_parse(self):
        tree = canonicalize([['x.01', 'y.012'], ['x.01']])
        text = render(tree)
        assert text == '{{x.01},{x.01,y.012}}'
        assert parse_monomial(text) == tree

    @given(depth2)
    def test_canonicalize_idempotent(self, raw):
        tree = canonicalize(raw)
        assert is_canonical(tree)
        assert canonicalize(tree) == tree
        assert height(tree) == 2


class TestRewriting:
    def test_multiset_expand(self):
        one = QQ.one
        expanded = multiset_expand([{'a': one, 'b': one}, {'a': one}])
        assert expanded == {('a', 'a'): one, ('a', 'b'): one}

    def test_multiply_is_root_union(self):
        x, y = element([['a']]), element([['b', 'c']])
        assert multiply(x, y).terms == {(('a',), ('b', 'c')): QQ.one}

    @given(depth2, depth2)
    def test_multiply_commutative(self, a, b):
        assert multiply(element(a), element(b)) == multiply(element(b), element(a))

    @given(depth2, depth2, depth2)
    def test_multiply_associative(self, a, b, c):
        x, y, z = element(a), element(b), element(c)
        assert multiply(multiply(x, y), z) == multiply(x, multiply(y, z))

    @settings(max_examples=50)
    @given(depth3, st.sampled_from([1, 2]))
    def test_counit_laws(self, raw, layer):
        x = element(raw)
        lifted = comult_layer(x, layer)
        assert counit_layer(lifted, layer) == x
        assert counit_layer(lifted, layer + 1) == x

    @settings(max_examples=50)
    @given(depth3, st.sampled_from([0, 1, 2]))
    def test_coassociative(self, raw, layer):
        x = element(raw)
        once = comult_layer(x, layer)
        assert comult_layer(once, layer) == comult_layer(once, layer + 1)

    def test_innermost_counit_needs_product(self):
        x = element([['a', 'b']])
        with pytest.raises(ValueError):
            counit_layer(x, 0)
        product = lambda node: {'*'.join(node): 1}
        assert counit_layer(x, 0, product).terms == {('a*b',): QQ.one}

    def test_layer_out_of_range(self):
        with pytest.raises(LayerIndexError):
            comult_layer(element([['a']]), 2)

    def test_eta(self):
        x = element([['a', 'b'], ['c']]) + element([['a'], ['c']])
        assert eta_indecomposables(x).is_zero()
        kept = eta_at_layer(x, 0)
        assert kept.terms == {(('a',), ('c',)): QQ.one}

    def test_layer_operator_runs_in_order(self):
        x = element([['a'], ['b']])
        op = LayerOperator((LayerStep('s', 1), LayerStep('d', 2)))
        assert op.apply(x) == x
        with pytest.raises(ValueError):
            LayerStep('x', 0)

    def test_leaves(self):
        tree = canonicalize([['a', 'b'], ['a']])
        assert leaves(tree) == ['a', 'a', 'b']
        assert leaves(tree, 1) == [('a',), ('a', 'b')]


def multiply_out(tree, layer, product):
    """Collapse one layer by plain recursion and brute-force expansion"""
    if height(tree) == layer + 1:
        if layer == 0:
            return {label: QQ(c) for label, c in product(tree).items()}
        return {tuple(sorted(g for child in tree for g in child)): QQ.one}
    expanded = [list(multiply_out(child, layer, product).items()) for child in tree]
    result = {}
    for choice in itertools.product(*expanded):
        key = tuple(sorted(t for t, _ in choice))
        result[key] = result.get(key, 0) + math.prod(c for _, c in choice)
    return {key: QQ(c) for key, c in result.items() if c}


def two_term_product(node):
    if len(node) == 1:
        return {node[0]: 1}
    return {'*'.join(node): 1, node[0]: 2}


class TestMultiplyOut:
    @settings(max_examples=60, deadline=None)
    @given(depth3, st.sampled_from([0, 1, 2]))
    def test_counit_matches_recursive_evaluation(self, raw, layer):
        tree = canonicalize(raw)
        x = AlgebraElement.monomial(tree, 0, QQ)
        assert counit_layer(x, layer, two_term_product).terms == multiply_out(tree, layer, two_term_product)

    @settings(max_examples=30, deadline=None)
    @given(st.lists(depth3, min_size=1, max_size=2), st.sampled_from([0, 1, 3]))
    def test_counit_at_depth_four(self, raw, layer):
        tree = canonicalize(raw)
        x = AlgebraElement.monomial(tree, 0, QQ)
        assert counit_layer(x, layer, two_term_product).terms == multiply_out(tree, layer, two_term_product)

    def test_expansion_collects_repeated_terms(self):
        tree = canonicalize([['a', 'b'], ['a', 'b']])
        expected = {('a', 'a'): QQ(4), ('a', 'a*b'): QQ(4), ('a*b', 'a*b'): QQ(1)}
        assert multiply_out(tree, 0, two_term_product) == expected
        assert counit_layer(AlgebraElement.monomial(tree, 0, QQ), 0, two_term_product).terms == expected


class TestCounting:
    def test_count_multisets(self):
        assert count_multisets({1: 1}, 3) == {1: 1, 2: 1, 3: 1}
        assert count_multisets({1: 2}, 2) == {1: 2, 2: 3}

    def test_enumerate_multisets(self):
        found = enumerate_multisets({1: ['a', 'b'], 2: ['y']}, 2)
        assert found == [('a', 'a'), ('a', 'b'), ('b', 'b'), ('y',)]

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 3), st.integers(0, 2), st.integers(1, 3), st.integers(1, 4))
    def test_count_matches_enumeration(self, n1, n2, depth, total):
        leaves_by_weight = {1: [f"u{k}" for k in range(n1)], 2: [f"v{k}" for k in range(n2)]}
        trees = enumerate_trees(depth, leaves_by_weight, total)
        assert len(trees) == count_trees(depth, {1: n1, 2: n2}, total)
        assert len(set(trees)) == len(trees)
        assert all(is_canonical(t) and height(t) == depth for t in trees)


class TestDiagonalOperator:
    def leaf_map(self):
        basis_a, basis_b = LabeledBasis(['a', 'b']), LabeledBasis(['c'])
        return LinearMap(basis_a, basis_b, {'a': {'c': QQ.one}, 'b': {'c': QQ(2)}}, QQ)

    def test_natural_square_commutes(self):
        trees = LabeledBasis([canonicalize([['a', 'b']]), canonicalize([['a'], ['b']])])
        phi = LayerOperator((LayerStep('s', 1),))
        diagonal = diagonal_operator(phi, self.leaf_map(), trees, 2, 0)
        assert diagonal.column((('a', 'b'),)) == {((('c', 'c'),),): QQ(2)}
        assert diagonal.column((('a',), ('b',))) == {((('c',),), (('c',),)): QQ(2)}

    def test_broken_square_is_reported(self):
        trees = LabeledBasis([canonicalize([['a', 'b']])])
        phi = LayerOperator((LayerStep('d', 0),))
        with pytest.raises(NaturalityError):
            diagonal_operator(phi, self.leaf_map(), trees, 2, 0,
                              source_product=lambda node: {node[0]: 1},
                              target_product=lambda node: {node[0]: 1})


class TestIndecomposablesAsDiagonal:
    """Φ = η at the root against a face map of K(k,1)"""

    def face(self):
        X = get_fixture('K1', QQ, Truncation(2, 1))
        return X.face(0, 2, 1)

    def test_eta_is_natural_for_faces(self):
        trees = LabeledBasis([
            canonicalize([['x.001']]),
            canonicalize([['x.001', 'x.001']]),
            canonicalize([['x.001', 'x.011']]),
            canonicalize([['x.001'], ['x.011']]),
        ])
        phi = LayerOperator((LayerStep('e', 1),))
        diagonal = diagonal_operator(phi, self.face(), trees, 2, 2)
        assert diagonal.column((('x.001',),)) == {(('x.01',),): QQ.one}
        assert diagonal.column((('x.001', 'x.001'),)) == {(('x.01', 'x.01'),): QQ.one}
        assert diagonal.column((('x.001', 'x.011'),)) == {}
        assert diagonal.column((('x.001',), ('x.011',))) == {}

    def test_eta_then_counit_with_wrong_products_fails(self):
        trees = LabeledBasis([canonicalize([['x.001']])])
        phi = LayerOperator((LayerStep('e', 1), LayerStep('d', 0)))
        with pytest.raises(NaturalityError):
            diagonal_operator(phi, self.face(), trees, 2, 2,
                              source_product=lambda node: {node[0]: 1},
                              target_product=lambda node: {})

    def test_eta_step_kills_decomposable_roots(self):
        x = element([['a'], ['b']]) + element([['a', 'b']])
        assert LayerOperator((LayerStep('e', 1),)).apply(x) == element([['a', 'b']])
