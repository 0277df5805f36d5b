"""
Iterated monomials and the comonad structure of the free algebra functor T.

A tree of depth 0 is a basis label of the underlying algebra level. A tree
of depth d + 1 is a sorted tuple (a multiset) of depth-d trees. Labels of
the underlying level may themselves be trees (levels of an iterated bar
construction), so every rewriting routine addresses nodes by their height
above the bottom of the whole nested tuple.

Layers are numbered from the inside: layer 0 holds the nodes whose children
are underlying labels, layer d - 1 is the root.
"""

import re
from dataclasses import dataclass, field as dataclass_field
from itertools import chain
from typing import Callable, Dict, Hashable, List, Mapping, Optional, Sequence, Tuple

from src.models.errors import CanonicalFormError, LayerIndexError, NaturalityError
from src.models.exactlin import Field, LabeledBasis, LinearMap, Scalar, add_scaled

Tree = Hashable
Terms = Dict[Tree, Scalar]
NodeMap = Callable[[Tree], Mapping[Tree, Scalar]]
ProductOracle = Callable[[Tuple], Mapping[Tree, Scalar]]


@dataclass(frozen=True)
class Generator:
    """A basis label of an algebra level with its simplicial degree and weight"""
    symbol: str
    degree: int
    weight: int = 1

    def __post_init__(self):
        if self.weight < 1:
            raise ValueError(f"generator {self.symbol} must have weight >= 1")


def height(tree: Tree) -> int:
    """Nesting depth of a nested tuple; bare labels have height 0"""
    h = 0
    while isinstance(tree, tuple):
        tree = tree[0]
        h += 1
    return h


def leaves(tree: Tree, at_height: int = 0) -> List[Tree]:
    """All subtrees of the given height, with multiplicity, left to right"""
    if height(tree) <= at_height:
        return [tree]
    return list(chain.from_iterable(leaves(child, at_height) for child in tree))


def nodes_at(tree: Tree, at_height: int) -> List[Tree]:
    """Nodes of the given height (same as leaves, named for readability)"""
    return leaves(tree, at_height)


def canonicalize(raw, depth: Optional[int] = None) -> Tree:
    """
    Bring a raw monomial into canonical form

    Args:
        raw: A label, or a nonempty list/tuple/set of raw monomials
        depth: Expected depth, checked when given

    Returns:
        Nested sorted tuples
    """
    tree = _canonical(raw)
    if depth is not None and height(tree) != depth:
        raise CanonicalFormError(f"expected depth {depth}, got {height(tree)}")
    return tree


def _canonical(raw) -> Tree:
    if isinstance(raw, (list, tuple, set, frozenset)):
        if not raw:
            raise CanonicalFormError("empty multiset in monomial")
        children = [_canonical(child) for child in raw]
        heights = {height(child) for child in children}
        if len(heights) != 1:
            raise CanonicalFormError("children of one node have different depths")
        return tuple(sorted(children))
    return raw


def is_canonical(tree: Tree) -> bool:
    try:
        return _canonical(tree) == tree
    except (CanonicalFormError, TypeError):
        return False


def weight(tree: Tree, weight_of: Callable[[Tree], int], at_height: int = 0) -> int:
    return sum(weight_of(leaf) for leaf in leaves(tree, at_height))


def render(tree: Tree) -> str:
    """Text form, e.g. {{x.01},{x.01,y.012}}"""
    if isinstance(tree, tuple):
        return '{' + ','.join(render(child) for child in tree) + '}'
    return str(tree)


_TOKEN = re.compile(r"[{},]|[^\s{},]+")


def parse_monomial(text: str) -> Tree:
    """Inverse of render for trees over string labels"""
    tokens = [(m.group(), m.start() + 1) for m in _TOKEN.finditer(text)]
    if not tokens:
        raise CanonicalFormError("empty monomial text")

    def parse(i: int):
        token, col = tokens[i]
        if token in '},':
            raise CanonicalFormError(f"unexpected {token!r} at column {col}")
        if token != '{':
            return token, i + 1
        children = []
        i += 1
        while True:
            if i >= len(tokens):
                raise CanonicalFormError(f"unterminated multiset opened at column {col}")
            if tokens[i][0] == '}' and not children:
                raise CanonicalFormError(f"empty multiset at column {col}")
            child, i = parse(i)
            children.append(child)
            if i >= len(tokens):
                raise CanonicalFormError(f"unterminated multiset opened at column {col}")
            sep, sep_col = tokens[i]
            if sep == '}':
                return children, i + 1
            if sep != ',':
                raise CanonicalFormError(f"expected ',' or '}}' at column {sep_col}")
            i += 1

    raw, end = parse(0)
    if end != len(tokens):
        raise CanonicalFormError(f"trailing input at column {tokens[end][1]}")
    return canonicalize(raw)


# Term rewriting

def _sorted_insert(prefix: Tuple, item: Tree) -> Tuple:
    return tuple(sorted(prefix + (item,)))


def multiset_expand(parts: Sequence[Mapping[Tree, Scalar]]) -> Terms:
    """Multilinear expansion of the multiset {p_1, ..., p_k} with each p_i a linear combination"""
    partial: Dict[Tuple, Scalar] = {(): None}
    for part in parts:
        nxt: Dict[Tuple, Scalar] = {}
        for prefix, c in partial.items():
            for tree, d in part.items():
                key = _sorted_insert(prefix, tree)
                value = d if c is None else c * d
                total = nxt.get(key)
                total = value if total is None else total + value
                if total:
                    nxt[key] = total
                else:
                    nxt.pop(key, None)
        partial = nxt
        if not partial:
            return {}
    return {key: c for key, c in partial.items() if c}


class NodeRewriter:
    """Replaces every node of one height by a linear combination and re-expands.

    The replacement for a node must consist of trees of a single common
    height. Results are memoized per node.
    """

    def __init__(self, at_height: int, node_map: NodeMap):
        self.at_height = at_height
        self.node_map = node_map
        self._memo: Dict[Tree, Terms] = {}

    def __call__(self, tree: Tree) -> Terms:
        cached = self._memo.get(tree)
        if cached is not None:
            return cached
        h = height(tree)
        if h == self.at_height:
            result = {t: c for t, c in self.node_map(tree).items() if c}
        elif h < self.at_height:
            raise LayerIndexError(f"tree of height {h} has no nodes at height {self.at_height}")
        else:
            result = multiset_expand([self(child) for child in tree])
        self._memo[tree] = result
        return result

    def apply(self, terms: Mapping[Tree, Scalar]) -> Terms:
        acc: Terms = {}
        for tree, c in terms.items():
            add_scaled(acc, self(tree), c)
        return acc


def union_node(node: Tree) -> Dict[Tree, int]:
    """{{a..},{b..},..} -> {a..,b..,..}; coefficient 1"""
    return {tuple(sorted(chain.from_iterable(node))): 1}


def singleton_node(node: Tree) -> Dict[Tree, int]:
    """{m1,...,mk} -> {{m1},...,{mk}}"""
    return {tuple((child,) for child in node): 1}


@dataclass
class AlgebraElement:
    """Linear combination of canonical iterated monomials of one depth and simplicial degree.

    ``base_height`` is the height of the underlying labels inside the nested
    tuples (0 for plain string labels).
    """
    depth: int
    degree: int
    field: Field
    terms: Terms = dataclass_field(default_factory=dict)
    base_height: int = 0

    def __post_init__(self):
        self.terms = {t: c for t, c in self.terms.items() if c}

    @classmethod
    def monomial(cls, tree: Tree, degree: int, field: Field, base_height: int = 0) -> 'AlgebraElement':
        return cls(height(tree) - base_height, degree, field, {tree: field.one}, base_height)

    def _like(self, terms: Terms, depth: Optional[int] = None) -> 'AlgebraElement':
        return AlgebraElement(self.depth if depth is None else depth, self.degree, self.field,
                              terms, self.base_height)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: 'AlgebraElement') -> 'AlgebraElement':
        self._check_compatible(other)
        acc = dict(self.terms)
        add_scaled(acc, other.terms, self.field.one)
        return self._like(acc)

    def scale(self, c) -> 'AlgebraElement':
        c = self.field(c)
        return self._like({t: v * c for t, v in self.terms.items()})

    def __mul__(self, other: 'AlgebraElement') -> 'AlgebraElement':
        return multiply(self, other)

    def __eq__(self, other) -> bool:
        return (isinstance(other, AlgebraElement) and self.depth == other.depth
                and self.degree == other.degree and self.terms == other.terms)

    def _check_compatible(self, other: 'AlgebraElement'):
        if (self.depth, self.degree, self.base_height) != (other.depth, other.degree, other.base_height):
            raise CanonicalFormError("elements differ in depth or simplicial degree")

    def render(self) -> str:
        if not self.terms:
            return '0'
        pieces = []
        for tree in sorted(self.terms):
            c = self.field.render(self.terms[tree])
            pieces.append(render(tree) if c == '1' else f"{c}*{render(tree)}")
        return ' + '.join(pieces)


def multiply(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """Free product: bilinear extension of top-layer multiset union"""
    a._check_compatible(b)
    if a.depth < 1:
        raise CanonicalFormError("depth-0 elements multiply through the underlying algebra")
    acc: Terms = {}
    for ta, ca in a.terms.items():
        for tb, cb in b.terms.items():
            add_scaled(acc, {tuple(sorted(ta + tb)): ca * cb}, a.field.one)
    return a._like(acc)


def _layer_height(x: AlgebraElement, layer: int) -> int:
    if not 0 <= layer <= x.depth - 1:
        raise LayerIndexError(f"layer {layer} out of range for depth {x.depth}")
    return x.base_height + layer + 1


def counit_layer(x: AlgebraElement, layer: int, base: Optional[ProductOracle] = None) -> AlgebraElement:
    """
    Multiply out every node of one layer in the layer below

    Args:
        x: Element of depth >= 1
        layer: 0 is innermost; free layers (>= 1) collapse by multiset union
        base: Product of underlying labels, needed when layer is 0

    Returns:
        Element of depth one less
    """
    at = _layer_height(x, layer)
    if layer == 0:
        if base is None:
            raise ValueError("innermost counit needs the underlying multiplication")
        rewriter = NodeRewriter(at, base)
    else:
        rewriter = NodeRewriter(at, union_node)
    return x._like(_coerce(rewriter.apply(x.terms), x.field), x.depth - 1)


def comult_layer(x: AlgebraElement, layer: int) -> AlgebraElement:
    """Insert a layer of singletons under every node of one layer"""
    at = _layer_height(x, layer)
    return x._like(_coerce(NodeRewriter(at, singleton_node).apply(x.terms), x.field), x.depth + 1)


def eta_at_layer(x: AlgebraElement, layer: int) -> AlgebraElement:
    """Kill every term having a node of size >= 2 at the given layer"""
    at = _layer_height(x, layer)
    rewriter = NodeRewriter(at, lambda node: {node: 1} if len(node) == 1 else {})
    return x._like(_coerce(rewriter.apply(x.terms), x.field))


def eta_indecomposables(x: AlgebraElement) -> AlgebraElement:
    """Projection onto indecomposables: drop terms whose root has size >= 2"""
    if x.depth < 1:
        raise LayerIndexError("indecomposables are taken at depth >= 1")
    return x._like({t: c for t, c in x.terms.items() if len(t) == 1})


def map_leaves(x: AlgebraElement, leaf_map: NodeMap) -> AlgebraElement:
    """T^d(f): apply a linear map to the underlying labels"""
    rewriter = NodeRewriter(x.base_height, leaf_map)
    return x._like(_coerce(rewriter.apply(x.terms), x.field))


def _coerce(terms: Terms, field: Field) -> Terms:
    out = {}
    for t, c in terms.items():
        c = c if field.domain.of_type(c) else field(c)
        if c:
            out[t] = c
    return out


@dataclass(frozen=True)
class LayerStep:
    """One counit ('d'), comultiplication ('s') or indecomposables projection ('e') at a layer"""
    kind: str
    layer: int

    def __post_init__(self):
        if self.kind not in ('d', 's', 'e'):
            raise ValueError(f"unknown layer step kind {self.kind!r}")


@dataclass(frozen=True)
class LayerOperator:
    """Composite of layer steps applied left to right (first step first)"""
    steps: Tuple[LayerStep, ...] = ()

    def apply(self, x: AlgebraElement, base: Optional[ProductOracle] = None) -> AlgebraElement:
        for step in self.steps:
            if step.kind == 'd':
                x = counit_layer(x, step.layer, base)
            elif step.kind == 's':
                x = comult_layer(x, step.layer)
            else:
                x = eta_at_layer(x, step.layer)
        return x


def diagonal_operator(phi: LayerOperator, m: LinearMap, source_terms: LabeledBasis,
                      depth: int, degree: int,
                      source_product: Optional[ProductOracle] = None,
                      target_product: Optional[ProductOracle] = None,
                      codomain: Optional[LabeledBasis] = None) -> LinearMap:
    """
    [Φ]m: the diagonal of the naturality square of a layer operator

    Args:
        phi: Natural map F -> G built from layer steps
        m: Map of underlying levels A -> B (algebra map when phi touches layer 0)
        source_terms: Basis of F(A) (trees over A's labels)
        depth: Depth of the trees in source_terms
        degree: Simplicial degree of A
        source_product: Multiplication of A
        target_product: Multiplication of B
        codomain: Basis of G(B); collected from the images when omitted

    Returns:
        G(m) ∘ Φ_A, after checking it equals Φ_B ∘ F(m)
    """
    field = m.field
    columns: Dict[Tree, Terms] = {}
    for tree in source_terms:
        x = AlgebraElement(depth, degree, field, {tree: field.one})
        leg_a = map_leaves(phi.apply(x, source_product), m.column)
        leg_b = phi.apply(map_leaves(x, m.column), target_product)
        if leg_a.terms != leg_b.terms:
            raise NaturalityError(f"naturality square fails on {render(tree)}", tree)
        columns[tree] = leg_a.terms
    if codomain is None:
        codomain = LabeledBasis(sorted({t for col in columns.values() for t in col}))
    return LinearMap(source_terms, codomain, columns, field)


def enumerate_multisets(items_by_weight: Mapping[int, Sequence[Tree]], total: int) -> List[Tuple]:
    """All sorted tuples of items whose weights sum to total"""
    pool: List[Tuple[Tree, int]] = sorted(
        (item, w) for w, items in items_by_weight.items() for item in items
    )
    out: List[Tuple] = []

    def extend(start: int, remaining: int, prefix: List[Tree]):
        if remaining == 0:
            if prefix:
                out.append(tuple(prefix))
            return
        for k in range(start, len(pool)):
            item, w = pool[k]
            if w <= remaining:
                prefix.append(item)
                extend(k, remaining - w, prefix)
                prefix.pop()

    extend(0, total, [])
    out.sort()
    return out


def enumerate_trees(depth: int, leaves_by_weight: Mapping[int, Sequence[Tree]], total: int) -> List[Tree]:
    """All canonical depth-`depth` trees over the given leaves with total weight `total`"""
    by_weight: Dict[int, List[Tree]] = {w: list(v) for w, v in leaves_by_weight.items() if v}
    for _ in range(depth):
        by_weight = {
            w: enumerate_multisets(by_weight, w) for w in range(1, total + 1)
        }
        by_weight = {w: v for w, v in by_weight.items() if v}
    return sorted(by_weight.get(total, []))


def count_multisets(counts_by_weight: Mapping[int, int], max_total: int) -> Dict[int, int]:
    """Number of nonempty multisets of each total weight, from item counts per weight"""
    series = [1] + [0] * max_total
    for w, c in sorted(counts_by_weight.items()):
        if c <= 0 or w > max_total:
            continue
        # multiply by (1 - x^w)^(-c)
        for _ in range(c):
            for total in range(w, max_total + 1):
                series[total] += series[total - w]
    return {total: series[total] for total in range(1, max_total + 1) if series[total]}


def count_trees(depth: int, counts_by_weight: Mapping[int, int], total: int) -> int:
    """Exact size of the depth-`depth` tree block of weight `total`, without enumeration"""
    counts = dict(counts_by_weight)
    for _ in range(depth):
        counts = count_multisets(counts, total)
    return counts.get(total, 0)
