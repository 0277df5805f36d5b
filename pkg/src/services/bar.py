"""
Simplicial bar construction b, its iterates, the augmentation and the
explicit homotopy between the two augmentations of b²X.

Level n of bY is T^{n+1}(Y_n): depth-(n+1) trees over the labels of Y_n.
Faces and degeneracies act on the leaves by Y's structure maps and then
collapse or split one block layer; d_i and s_i address block layer n - i.
"""

import logging
from dataclasses import dataclass
from itertools import chain
from typing import Callable, Dict, Optional, Sequence, Tuple

from src.models.errors import (
    LayerIndexError, ResourceCapError, TruncationError, UngradedError,
)
from src.models.exactlin import LabeledBasis, LinearMap, Subspace, Vector
from src.models.freealg import (
    AlgebraElement, LayerOperator, LayerStep, NodeRewriter,
    comult_layer, count_trees, counit_layer, enumerate_trees, leaves,
)
from src.models.report import CheckReport
from src.models.simplicial import (
    HomotopyFamily, SimplicialAlgebra, SimplicialMap,
    check_simplicial_homotopy, label_text,
)

logger = logging.getLogger(__name__)

# 𝔡_{i,q} or 𝔰_{i,q}
WordStep = Tuple[str, int, int]


class BarConstruction(SimplicialAlgebra):
    """b(Y) for a weight-graded simplicial algebra Y, realized block by block"""

    def __init__(self, source: SimplicialAlgebra, cap: Optional[int] = None, name: str = ''):
        if not source.graded:
            raise UngradedError(f"{source.name} has no weight grading; bar levels would be infinite")
        super().__init__(source.field, source.truncation, name or f"b({source.name})")
        self.source = source
        self.cap = cap
        self.r = source.r + 1 if isinstance(source, BarConstruction) else 1
        self.base = source.base if isinstance(source, BarConstruction) else source

    def label_depth(self, n: int) -> int:
        return self.source.label_depth(n) + n + 1

    def block_size_estimate(self, n: int, w: int) -> int:
        counts = {v: self.source.block_size_estimate(n, v) for v in range(1, w + 1)}
        return count_trees(n + 1, counts, w)

    def _build_basis(self, n, w):
        estimate = self.block_size_estimate(n, w)
        if self.cap is not None and estimate > self.cap:
            logger.warning("skipping %s block (n=%d, w=%d): %d > cap %d", self.name, n, w, estimate, self.cap)
            raise ResourceCapError(n, w, self.r, estimate, self.cap)
        leaves_by_weight = {v: list(self.source.basis(n, v)) for v in range(1, w + 1)}
        basis = LabeledBasis(enumerate_trees(n + 1, leaves_by_weight, w))
        logger.debug("%s block (n=%d, w=%d): %d trees", self.name, n, w, len(basis))
        return basis

    def _leaf_rewriter(self, n: int, column: Callable[[object], Vector]) -> NodeRewriter:
        return NodeRewriter(self.source.label_depth(n), column)

    def _build_face(self, i, n, w):
        Y = self.source
        rewriter = self._leaf_rewriter(n, lambda label: Y.face_column(i, n, label))
        base = lambda node: Y.product(n - 1, node)
        cols = {}
        for tree in self.basis(n, w):
            x = AlgebraElement(n + 1, n - 1, self.field, rewriter(tree), Y.label_depth(n - 1))
            cols[tree] = counit_layer(x, n - i, base).terms
        return LinearMap(self.basis(n, w), self.basis(n - 1, w), cols, self.field)

    def _build_degeneracy(self, i, n, w):
        Y = self.source
        rewriter = self._leaf_rewriter(n, lambda label: Y.degeneracy_column(i, n, label))
        cols = {}
        for tree in self.basis(n, w):
            x = AlgebraElement(n + 1, n + 1, self.field, rewriter(tree), Y.label_depth(n + 1))
            cols[tree] = comult_layer(x, n - i).terms
        return LinearMap(self.basis(n, w), self.basis(n + 1, w), cols, self.field)

    def label_weight(self, n, label):
        return sum(self.source.label_weight(n, leaf) for leaf in leaves(label, self.source.label_depth(n)))

    def product(self, n, labels):
        return {tuple(sorted(chain.from_iterable(labels))): self.field.one}

    def power_block(self, s, n, w):
        """Free algebra: s-fold products are the trees whose root has at least s children"""
        self._check_block(n, w)
        basis = self.basis(n, w)
        return Subspace.from_labels(basis, [t for t in basis if len(t) >= s], self.field)


def bar(Y: SimplicialAlgebra, cap: Optional[int] = None) -> BarConstruction:
    """b(Y), shared per (Y, cap) so that iterated bars reuse realized blocks"""
    bars = Y.__dict__.setdefault('_bars', {})
    if cap not in bars:
        bars[cap] = BarConstruction(Y, cap)
    return bars[cap]


def build_bar(X: SimplicialAlgebra, r: int, cap: Optional[int] = None) -> SimplicialAlgebra:
    """
    The iterated bar construction b^r X

    Args:
        X: Weight-graded simplicial algebra
        r: Number of iterations; 0 returns X
        cap: Largest block size realized (None for no limit)

    Returns:
        b(b(...b(X)))
    """
    if r < 0:
        raise LayerIndexError(f"bar iteration {r} is negative")
    Y = X
    for _ in range(r):
        Y = bar(Y, cap)
    return Y


# Operator normal forms

def operator_normal_form(word: Sequence[WordStep], source_level: int) -> Tuple[int, ...]:
    """
    Reduce a composite of counit and comultiplication layers to its monotone map

    Args:
        word: Steps ('d', i, q) for 𝔡_{i,q} or ('s', i, q) for 𝔰_{i,q},
            applied right to left
        source_level: M, so the composite starts on T^{M+1}

    Returns:
        Images of the surviving tensor positions, in order
    """
    positions = list(range(source_level + 1))
    for kind, i, q in reversed(word):
        if len(positions) != q + 1 or not 0 <= i <= q:
            raise LayerIndexError(f"{kind}_{{{i},{q}}} applied to T^{len(positions)}")
        if kind == 'd':
            del positions[i]
        elif kind == 's':
            positions.insert(i, positions[i])
        else:
            raise LayerIndexError(f"unknown operator kind {kind!r}")
    return tuple(positions)


def word_operator(word: Sequence[WordStep]) -> LayerOperator:
    """The LayerOperator of a word; 𝔡_{i,q} and 𝔰_{i,q} address layer q - i"""
    return LayerOperator(tuple(LayerStep(kind, q - i) for kind, i, q in reversed(word)))


@dataclass(frozen=True)
class FusedOperator:
    """Composite of layer operations and one structure map of the base algebra.

    Applying it maps the base labels by the structure map first and then runs
    the word right to left.
    """
    word: Tuple[WordStep, ...]
    source_level: int
    structure: Optional[Tuple[str, int]] = None

    @property
    def normal_form(self) -> Tuple[Tuple[int, ...], Optional[Tuple[str, int]]]:
        return operator_normal_form(self.word, self.source_level), self.structure

    def then(self, other: 'FusedOperator') -> Tuple[int, ...]:
        """Normal form of other ∘ self on the layer part"""
        return operator_normal_form(other.word + self.word, self.source_level)

    def apply_column(self, X: SimplicialAlgebra, n: int, tree) -> Dict:
        """Image of one tree of b^r X in degree n"""
        kind, i = self.structure if self.structure else (None, None)
        h = X.label_depth(n)
        if kind == 'd':
            target_level = n - 1
            rewriter = NodeRewriter(h, lambda label: X.face_column(i, n, label))
        elif kind == 's':
            target_level = n + 1
            rewriter = NodeRewriter(h, lambda label: X.degeneracy_column(i, n, label))
        else:
            target_level = n
            rewriter = NodeRewriter(h, lambda label: {label: X.field.one})
        depth = self.source_level + 1
        x = AlgebraElement(depth, target_level, X.field, rewriter(tree), X.label_depth(target_level))
        base = lambda node: X.product(target_level, node)
        return word_operator(self.word).apply(x, base).terms


def fused_face(r: int, i: int, q: int) -> FusedOperator:
    """d_i of b^r X in degree q: counits at block layers (r-b)(q+1)-1-i, outermost first"""
    word = tuple(('d', b * q + i, r * (q + 1) - b - 1) for b in reversed(range(r)))
    return FusedOperator(word, r * (q + 1) - 1, ('d', i))


def fused_degeneracy(r: int, i: int, q: int) -> FusedOperator:
    word = tuple(('s', b * (q + 2) + i, r * (q + 1) + b - 1) for b in reversed(range(r)))
    return FusedOperator(word, r * (q + 1) - 1, ('s', i))


def homotopy_word(j: int, q: int, shift: int = 0) -> Tuple[WordStep, ...]:
    """𝔡_{j+1,q+2} ∘ ... ∘ 𝔡_{j+1,2q+1}; empty when q = 0"""
    return tuple(('d', j + 1 + shift, m) for m in range(q + 2, 2 * q + 2))


def fused_homotopy(j: int, q: int, shift: int = 0) -> FusedOperator:
    return FusedOperator(homotopy_word(j, q, shift), 2 * q + 1, ('s', j))


def outer_augmentation_word(q: int) -> Tuple[WordStep, ...]:
    """ε of b(bX) in degree q: collapse the outer block"""
    return tuple(('d', 0, m) for m in range(q + 1, 2 * q + 2))


def inner_augmentation_word(q: int) -> Tuple[WordStep, ...]:
    """b(ε_X) in degree q: collapse the inner block"""
    return tuple(('d', m, m) for m in range(q + 1, 2 * q + 2))


def fused_map(X: SimplicialAlgebra, r: int, op: FusedOperator, n: int, w: int,
              cap: Optional[int] = None) -> LinearMap:
    """LinearMap of a fused face or degeneracy on b^r X, computed without recursion"""
    source = build_bar(X, r, cap)
    target_level = n - 1 if op.structure[0] == 'd' else n + 1
    domain = source.basis(n, w)
    cols = {tree: op.apply_column(X, n, tree) for tree in domain}
    return LinearMap(domain, source.basis(target_level, w), cols, X.field)


def check_fused_operators(X: SimplicialAlgebra, r: int, n_max: int, weights=None,
                          cap: Optional[int] = None) -> CheckReport:
    """The recursive structure maps of b^r X agree with the fused formulas"""
    report = CheckReport(f"fused operators r={r}")
    B = build_bar(X, r, cap)
    for w in (weights if weights is not None else B.weights()):
        for n in range(n_max + 1):
            for i in range(n + 1):
                if n >= 1:
                    left = B.face(i, n, w)
                    right = fused_map(X, r, fused_face(r, i, n), n, w, cap)
                    witness = left.first_difference(right)
                    if witness is not None:
                        report.fail('fused face', label_text(witness), i=i, n=n, w=w)
                if n + 1 <= min(n_max, B.max_degree):
                    left = B.degeneracy(i, n, w)
                    right = fused_map(X, r, fused_degeneracy(r, i, n), n, w, cap)
                    witness = left.first_difference(right)
                    if witness is not None:
                        report.fail('fused degeneracy', label_text(witness), i=i, n=n, w=w)
    return report


def check_operator_identities(q_max: int, shift: int = 0) -> CheckReport:
    """
    The layer parts of the homotopy identities as normal-form equalities

    Runs the five identity families and both boundary conditions on words
    alone, before any linear algebra.
    """
    report = CheckReport('operator normal forms')

    def face(i, q):
        return fused_face(2, i, q).word

    def degeneracy(i, q):
        return fused_degeneracy(2, i, q).word

    def h(j, q):
        return homotopy_word(j, q, shift)

    def same(identity, lhs, rhs, source_level, **indices):
        try:
            left = operator_normal_form(lhs, source_level)
            right = operator_normal_form(rhs, source_level)
        except LayerIndexError as exc:
            report.fail(identity, str(exc), **indices)
            return
        if left != right:
            report.fail(identity, f"{left} != {right}", **indices)

    for q in range(q_max + 1):
        M = 2 * q + 1
        for j in range(q + 1):
            for i in range(j):
                same('(1) d_i h_j = h_{j-1} d_i', (('d', i, q + 1),) + h(j, q),
                     h(j - 1, q - 1) + face(i, q), M, i=i, j=j, q=q)
            for i in range(j + 2, q + 2):
                same('(3) d_i h_j = h_j d_{i-1}', (('d', i, q + 1),) + h(j, q),
                     h(j, q - 1) + face(i - 1, q), M, i=i, j=j, q=q)
            if q + 1 <= q_max:
                for i in range(j + 1):
                    same('(4) s_i h_j = h_{j+1} s_i', (('s', i, q + 1),) + h(j, q),
                         h(j + 1, q + 1) + degeneracy(i, q), M, i=i, j=j, q=q)
                for i in range(j + 1, q + 2):
                    same('(5) s_i h_j = h_j s_{i-1}', (('s', i, q + 1),) + h(j, q),
                         h(j, q + 1) + degeneracy(i - 1, q), M, i=i, j=j, q=q)
        for j in range(q):
            same('(2) d_{j+1} h_j = d_{j+1} h_{j+1}', (('d', j + 1, q + 1),) + h(j, q),
                 (('d', j + 1, q + 1),) + h(j + 1, q), M, j=j, q=q)
        same('d_0 h_0 = f', (('d', 0, q + 1),) + h(0, q), outer_augmentation_word(q), M, q=q)
        same('d_{q+1} h_q = g', (('d', q + 1, q + 1),) + h(q, q), inner_augmentation_word(q), M, q=q)
    return report


# Maps

def augmentation(Y: SimplicialAlgebra, r: int = 1, cap: Optional[int] = None) -> SimplicialMap:
    """
    ε: b^r Y -> b^{r-1} Y, in degree q the composite 𝔡_{0,0} 𝔡_{0,1} ... 𝔡_{0,q}

    Args:
        Y: Simplicial algebra
        r: The augmentation of b(b^{r-1} Y)
        cap: Block cap for the bars involved

    Returns:
        Simplicial map multiplying out every block of the outermost bar
    """
    target = build_bar(Y, r - 1, cap)
    source = bar(target, cap)

    def component(q, w):
        word = tuple(('d', 0, m) for m in range(q + 1))
        op = word_operator(word)
        base = lambda node: target.product(q, node)
        cols = {}
        for tree in source.basis(q, w):
            x = AlgebraElement(q + 1, q, source.field, {tree: source.field.one}, target.label_depth(q))
            cols[tree] = op.apply(x, base).terms
        return LinearMap(source.basis(q, w), target.basis(q, w), cols, source.field)

    return SimplicialMap(source, target, component, f"eps({target.name})")


def bar_map(f: SimplicialMap, cap: Optional[int] = None) -> SimplicialMap:
    """b(f): in degree q, T^{q+1}(f_q) on the leaves"""
    K, L = f.source, f.target
    bK, bL = bar(K, cap), bar(L, cap)

    def component(q, w):
        rewriter = NodeRewriter(K.label_depth(q), lambda label: f(q, K.label_weight(q, label)).column(label))
        cols = {tree: rewriter(tree) for tree in bK.basis(q, w)}
        return LinearMap(bK.basis(q, w), bL.basis(q, w), cols, K.field)

    return SimplicialMap(bK, bL, component, f"b({f.name})")


def iterate_bar_map(f: SimplicialMap, times: int, cap: Optional[int] = None) -> SimplicialMap:
    for _ in range(times):
        f = bar_map(f, cap)
    return f


class HomotopyH:
    """h_{j,q}: (b²X)_q -> (bX)_{q+1}, the counits 𝔡_{j+1,m} for m = 2q+1 down to q+2 after s_j of X

    ``shift`` moves the counit position to j + 1 + shift; nonzero shifts give
    a deliberately wrong family.
    """

    def __init__(self, X: SimplicialAlgebra, cap: Optional[int] = None, shift: int = 0):
        self.X = X
        self.shift = shift
        self.source = build_bar(X, 2, cap)
        self.target = build_bar(X, 1, cap)
        self._cache: Dict[Tuple[int, int, int], LinearMap] = {}

    def __call__(self, j: int, q: int, w: int) -> LinearMap:
        key = (j, q, w)
        if key not in self._cache:
            self._cache[key] = self._build(j, q, w)
        return self._cache[key]

    def _build(self, j, q, w):
        X = self.X
        if not 0 <= j <= q:
            raise LayerIndexError(f"h_{{{j},{q}}} needs 0 <= j <= q")
        if q + 1 > X.max_degree:
            raise TruncationError(f"h_{{{j},{q}}} lands in degree {q + 1}, truncation has N={X.max_degree}")
        op = fused_homotopy(j, q, self.shift)
        domain = self.source.basis(q, w)
        cols = {tree: op.apply_column(X, q, tree) for tree in domain}
        return LinearMap(domain, self.target.basis(q + 1, w), cols, X.field)


def homotopy_h(X: SimplicialAlgebra, j: int, q: int, w: int, cap: Optional[int] = None, shift: int = 0) -> LinearMap:
    return HomotopyH(X, cap, shift)(j, q, w)


def lift_homotopy(h: HomotopyFamily, K: SimplicialAlgebra, L: SimplicialAlgebra,
                  cap: Optional[int] = None) -> HomotopyFamily:
    """
    b(h): (bK)_q -> (bL)_{q+1}, in degree q the map h_{j,q} on the leaves followed by 𝔰_{j,q}

    Args:
        h: Homotopy family K_q -> L_{q+1} made of algebra maps
        K: Source of h
        L: Target of h
        cap: Block cap for the bars involved

    Returns:
        The lifted family, memoized per (j, q, w)
    """
    bK, bL = bar(K, cap), bar(L, cap)
    cache: Dict[Tuple[int, int, int], LinearMap] = {}

    def lifted(j, q, w):
        key = (j, q, w)
        if key not in cache:
            rewriter = NodeRewriter(K.label_depth(q), lambda label: h(j, q, K.label_weight(q, label)).column(label))
            cols = {}
            for tree in bK.basis(q, w):
                x = AlgebraElement(q + 1, q + 1, K.field, rewriter(tree), L.label_depth(q + 1))
                cols[tree] = comult_layer(x, q - j).terms
            cache[key] = LinearMap(bK.basis(q, w), bL.basis(q + 1, w), cols, K.field)
        return cache[key]

    return lifted


def verify_appendix(X: SimplicialAlgebra, q_max: int, weights=None, cap: Optional[int] = None,
                    shift: int = 0) -> CheckReport:
    """
    Check that h is a simplicial homotopy from ε_{bX} to bε_X

    Args:
        X: Weight-graded simplicial algebra, realized to degree q_max + 1
        q_max: Highest degree of the homotopy checked
        weights: Weights to check (defaults to all)
        cap: Block cap for b X and b²X
        shift: Counit position shift, for negative tests

    Returns:
        Report with the normal-form checks followed by the linear checks
    """
    if q_max + 1 > X.max_degree:
        raise TruncationError(f"the homotopy up to degree {q_max} needs N >= {q_max + 1}")
    report = CheckReport('appendix homotopy')
    report.extend(check_operator_identities(q_max, shift))
    h = HomotopyH(X, cap, shift)
    f = augmentation(X, 2, cap)
    g = bar_map(augmentation(X, 1, cap), cap)
    for w in (weights if weights is not None else X.weights()):
        try:
            for q in range(q_max + 1):
                h.source.basis(q, w)
            for q in range(q_max + 2):
                h.target.basis(q, w)
        except ResourceCapError as exc:
            report.skipped.append(f"n={exc.n},w={exc.w},r={exc.r}")
            continue
        linear = check_simplicial_homotopy(h, f.component, g.component, h.source, h.target, q_max, [w])
        report.extend(linear)
        for q in range(q_max + 1):
            report.measure('dim b2X', h.source.dim(q, w), q=q, w=w)
    logger.info("appendix check on %s: %d violations", X.name, len(report.violations))
    return report
