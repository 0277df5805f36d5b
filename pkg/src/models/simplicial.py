"""
Weight-graded simplicial vector spaces and algebras.

Objects are realized lazily, one (degree, weight) block at a time; every
block and structure map is built once and cached. The Moore complex uses
N_q = ∩_{i=1..q} ker d_i with differential d_0.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import wraps
from typing import Callable, Dict, Iterable, Mapping, Optional, Sequence, Tuple

from src.models.errors import (
    ContainmentError, EngineError, LabelMismatchError, LayerIndexError,
    NonComplexError, TruncationError, UngradedError,
)
from src.models.exactlin import (
    Field, Label, LabeledBasis, LinearMap, Subspace, Vector,
    add_scaled, homology_dims, linear_combination, stack,
)
from src.models.freealg import render
from src.models.report import CheckReport

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Truncation:
    """Maximal simplicial degree N and maximal weight W"""
    max_degree: int
    max_weight: int

    def __post_init__(self):
        if self.max_degree < 0 or self.max_weight < 1:
            raise TruncationError(f"invalid truncation ({self.max_degree}, {self.max_weight})")

    def degrees(self) -> range:
        return range(self.max_degree + 1)


def block_cached(method):
    """Memoize a block-valued method on its positional arguments"""
    name = method.__name__

    @wraps(method)
    def wrapper(self, *args):
        cache = self.__dict__.setdefault('_block_cache', {})
        key = (name,) + args
        if key not in cache:
            cache[key] = method(self, *args)
        return cache[key]

    return wrapper


def label_text(label: Label) -> str:
    return render(label) if isinstance(label, tuple) else str(label)


class SimplicialVectorSpace(ABC):
    """Truncated weight-graded simplicial vector space"""

    def __init__(self, field: Field, truncation: Truncation, name: str = '', graded: bool = True):
        self.field = field
        self.truncation = truncation
        self.name = name or type(self).__name__
        self.graded = graded

    @property
    def max_degree(self) -> int:
        return self.truncation.max_degree

    @property
    def max_weight(self) -> int:
        return self.truncation.max_weight

    def weights(self) -> Tuple[int, ...]:
        if not self.graded:
            return (0,)
        return tuple(range(1, self.max_weight + 1))

    def _check_block(self, n: int, w: int):
        if not 0 <= n <= self.max_degree:
            raise TruncationError(f"{self.name}: degree {n} outside truncation N={self.max_degree}")
        if w not in self.weights():
            raise TruncationError(f"{self.name}: weight {w} outside truncation W={self.max_weight}")

    def basis(self, n: int, w: int) -> LabeledBasis:
        self._check_block(n, w)
        return self._cached_basis(n, w)

    @block_cached
    def _cached_basis(self, n: int, w: int) -> LabeledBasis:
        return self._build_basis(n, w)

    def face(self, i: int, n: int, w: int) -> LinearMap:
        """d_i: V_{n,w} -> V_{n-1,w}"""
        if n < 1 or not 0 <= i <= n:
            raise LayerIndexError(f"{self.name}: no face d_{i} on degree {n}")
        self._check_block(n, w)
        return self._cached_face(i, n, w)

    @block_cached
    def _cached_face(self, i: int, n: int, w: int) -> LinearMap:
        return self._build_face(i, n, w)

    def degeneracy(self, i: int, n: int, w: int) -> LinearMap:
        """s_i: V_{n,w} -> V_{n+1,w}"""
        if not 0 <= i <= n:
            raise LayerIndexError(f"{self.name}: no degeneracy s_{i} on degree {n}")
        self._check_block(n + 1, w)
        return self._cached_degeneracy(i, n, w)

    @block_cached
    def _cached_degeneracy(self, i: int, n: int, w: int) -> LinearMap:
        return self._build_degeneracy(i, n, w)

    @abstractmethod
    def _build_basis(self, n: int, w: int) -> LabeledBasis:
        ...

    @abstractmethod
    def _build_face(self, i: int, n: int, w: int) -> LinearMap:
        ...

    @abstractmethod
    def _build_degeneracy(self, i: int, n: int, w: int) -> LinearMap:
        ...

    def dim(self, n: int, w: int) -> int:
        return len(self.basis(n, w))

    def block_size_estimate(self, n: int, w: int) -> int:
        """Size of block (n, w), computed without realizing larger blocks"""
        return self.dim(n, w)

    def label_weight(self, n: int, label: Label) -> int:
        for w in self.weights():
            if label in self.basis(n, w):
                return w
        raise LabelMismatchError(f"{label!r} is not a basis label in degree {n}")

    def label_depth(self, n: int) -> int:
        """Nesting height of the labels in degree n (0 for plain labels)"""
        return 0

    def face_column(self, i: int, n: int, label: Label) -> Vector:
        return self.face(i, n, self.label_weight(n, label)).column(label)

    def degeneracy_column(self, i: int, n: int, label: Label) -> Vector:
        return self.degeneracy(i, n, self.label_weight(n, label)).column(label)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name}, N={self.max_degree}, W={self.max_weight})"


class SimplicialAlgebra(SimplicialVectorSpace):
    """Simplicial vector space with a commutative, associative, weight-additive product"""

    @abstractmethod
    def product(self, n: int, labels: Sequence[Label]) -> Vector:
        """Product of one or more basis labels of degree n"""
        ...

    def multiply(self, n: int, a: Mapping[Label, object], b: Mapping[Label, object]) -> Vector:
        acc: Vector = {}
        for la, ca in a.items():
            for lb, cb in b.items():
                add_scaled(acc, self.product(n, (la, lb)), ca * cb)
        return acc

    def power_block(self, s: int, n: int, w: int) -> Subspace:
        """Span of s-fold products in block (n, w)"""
        self._check_block(n, w)
        return self._cached_power(s, n, w)

    @block_cached
    def _cached_power(self, s: int, n: int, w: int) -> Subspace:
        ambient = self.basis(n, w)
        if s <= 1:
            return Subspace.whole(ambient, self.field)
        one = self.field.one
        vectors = []
        if self.graded:
            splits = [(w1, w - w1) for w1 in range(1, w)]
        else:
            splits = [(0, 0)]
        for w1, w2 in splits:
            previous = self.power_block(s - 1, n, w1)
            for row in previous.rows:
                for b in self.basis(n, w2):
                    vectors.append(self.multiply(n, row, {b: one}))
        return Subspace.span(ambient, vectors, self.field)


class TableSimplicialAlgebra(SimplicialAlgebra):
    """Simplicial algebra given by explicit tables.

    levels maps a degree to an ordered {label: weight}; faces and
    degeneracies map (i, n) to {label: image vector}; products maps a degree
    to {(a, b): vector}, read symmetrically when only one order is given.
    Missing products are zero.
    """

    def __init__(self, field: Field, truncation: Truncation,
                 levels: Mapping[int, Mapping[Label, int]],
                 faces: Mapping[Tuple[int, int], Mapping[Label, Mapping[Label, object]]],
                 degeneracies: Mapping[Tuple[int, int], Mapping[Label, Mapping[Label, object]]],
                 products: Optional[Mapping[int, Mapping[Tuple[Label, Label], Mapping[Label, object]]]] = None,
                 name: str = '', graded: bool = True):
        super().__init__(field, truncation, name, graded)
        self.levels = {n: dict(level) for n, level in levels.items()}
        self.faces = {k: {l: dict(v) for l, v in t.items()} for k, t in faces.items()}
        self.degeneracies = {k: {l: dict(v) for l, v in t.items()} for k, t in degeneracies.items()}
        self.products = {n: {p: dict(v) for p, v in t.items()} for n, t in (products or {}).items()}

    def _build_basis(self, n: int, w: int) -> LabeledBasis:
        return LabeledBasis(label for label, wt in self.levels.get(n, {}).items() if wt == w)

    def _table_map(self, table, domain: LabeledBasis, codomain: LabeledBasis) -> LinearMap:
        return LinearMap(domain, codomain, {label: table.get(label, {}) for label in domain}, self.field)

    def _build_face(self, i: int, n: int, w: int) -> LinearMap:
        return self._table_map(self.faces.get((i, n), {}), self.basis(n, w), self.basis(n - 1, w))

    def _build_degeneracy(self, i: int, n: int, w: int) -> LinearMap:
        return self._table_map(self.degeneracies.get((i, n), {}), self.basis(n, w), self.basis(n + 1, w))

    def label_weight(self, n: int, label: Label) -> int:
        try:
            return self.levels[n][label]
        except KeyError:
            raise LabelMismatchError(f"{label!r} is not a basis label in degree {n}")

    def _pair(self, n: int, a: Label, b: Label) -> Vector:
        table = self.products.get(n, {})
        if (a, b) in table:
            return table[(a, b)]
        return table.get((b, a), {})

    def product(self, n: int, labels: Sequence[Label]) -> Vector:
        one = self.field.one
        acc: Vector = {labels[0]: one}
        for label in labels[1:]:
            acc = linear_combination((c, self._pair(n, a, label)) for a, c in acc.items())
            if not acc:
                break
        return acc


class ZeroSquare(SimplicialAlgebra):
    """K(V): a simplicial vector space with zero multiplication"""

    def __init__(self, source: SimplicialVectorSpace, name: str = ''):
        super().__init__(source.field, source.truncation, name or f"K({source.name})", source.graded)
        self.source = source

    def _build_basis(self, n, w):
        return self.source.basis(n, w)

    def _build_face(self, i, n, w):
        return self.source.face(i, n, w)

    def _build_degeneracy(self, i, n, w):
        return self.source.degeneracy(i, n, w)

    def label_weight(self, n, label):
        return self.source.label_weight(n, label)

    def label_depth(self, n):
        return self.source.label_depth(n)

    def block_size_estimate(self, n, w):
        return self.source.block_size_estimate(n, w)

    def product(self, n, labels):
        if len(labels) == 1:
            return {labels[0]: self.field.one}
        return {}

    def power_block(self, s, n, w):
        if s <= 1:
            return Subspace.whole(self.basis(n, w), self.field)
        return Subspace(self.basis(n, w), [], self.field)


class SubObject(SimplicialVectorSpace):
    """Sub-object of a parent given by one echelonized subspace per block.

    Labels are the pivot labels of the block subspaces. Faces and
    degeneracies are restricted from the parent; a structure map leaving the
    sub-object raises ContainmentError.
    """

    def __init__(self, parent: SimplicialVectorSpace, block: Callable[[int, int], Subspace], name: str = ''):
        super().__init__(parent.field, parent.truncation, name or f"sub({parent.name})", parent.graded)
        self.parent = parent
        self._block_fn = block

    def block(self, n: int, w: int) -> Subspace:
        self._check_block(n, w)
        return self._cached_block(n, w)

    @block_cached
    def _cached_block(self, n: int, w: int) -> Subspace:
        sub = self._block_fn(n, w)
        if sub.ambient != self.parent.basis(n, w):
            raise LabelMismatchError(f"{self.name}: block ({n}, {w}) not in the parent basis")
        return sub

    def _build_basis(self, n, w):
        return self.block(n, w).basis

    def _restrict(self, parent_map: LinearMap, source: Subspace, target: Subspace, what: str) -> LinearMap:
        cols = {}
        for pivot, row in zip(source.pivots, source.rows):
            try:
                cols[pivot] = target.coordinates(parent_map.apply(row))
            except ContainmentError as exc:
                raise ContainmentError(
                    f"{self.name}: {what} of {label_text(pivot)} leaves the sub-object", pivot
                ) from exc
        return LinearMap(source.basis, target.basis, cols, self.field)

    def _build_face(self, i, n, w):
        return self._restrict(self.parent.face(i, n, w), self.block(n, w), self.block(n - 1, w), f"d_{i}")

    def _build_degeneracy(self, i, n, w):
        return self._restrict(self.parent.degeneracy(i, n, w), self.block(n, w), self.block(n + 1, w), f"s_{i}")

    def label_weight(self, n, label):
        return self.parent.label_weight(n, label)

    def label_depth(self, n):
        return self.parent.label_depth(n)

    def block_size_estimate(self, n, w):
        return self.parent.block_size_estimate(n, w)

    def restrict_map(self, parent_map: LinearMap, target: 'SubObject', n: int, w: int, what: str = 'map') -> LinearMap:
        """Restriction of a parent-level map to this sub-object, landing in target"""
        return self._restrict(parent_map, self.block(n, w), target.block(n, w), what)


class QuotientObject(SimplicialVectorSpace):
    """Quotient of a parent by a sub-object given per block.

    Labels are the parent labels that are not pivots of the kernel block;
    a parent vector is projected by clearing the kernel pivots.
    """

    def __init__(self, parent: SimplicialVectorSpace, kernel: Callable[[int, int], Subspace], name: str = ''):
        super().__init__(parent.field, parent.truncation, name or f"quot({parent.name})", parent.graded)
        self.parent = parent
        self._kernel_fn = kernel

    def kernel_block(self, n: int, w: int) -> Subspace:
        self._check_block(n, w)
        return self._cached_kernel(n, w)

    @block_cached
    def _cached_kernel(self, n, w):
        return self._kernel_fn(n, w)

    def _build_basis(self, n, w):
        pivots = set(self.kernel_block(n, w).pivots)
        return LabeledBasis(label for label in self.parent.basis(n, w) if label not in pivots)

    def project(self, n: int, w: int, vec: Mapping[Label, object]) -> Vector:
        return self.kernel_block(n, w).reduce(vec)

    def _project_map(self, parent_map: LinearMap, n: int, m: int, w: int) -> LinearMap:
        cols = {label: self.project(m, w, parent_map.column(label)) for label in self.basis(n, w)}
        return LinearMap(self.basis(n, w), self.basis(m, w), cols, self.field)

    def _build_face(self, i, n, w):
        return self._project_map(self.parent.face(i, n, w), n, n - 1, w)

    def _build_degeneracy(self, i, n, w):
        return self._project_map(self.parent.degeneracy(i, n, w), n, n + 1, w)

    def label_weight(self, n, label):
        return self.parent.label_weight(n, label)

    def label_depth(self, n):
        return self.parent.label_depth(n)

    def block_size_estimate(self, n, w):
        return self.parent.block_size_estimate(n, w)


def direct_sum(*summands: SimplicialAlgebra, name: str = '') -> TableSimplicialAlgebra:
    """
    Direct sum of algebras with disjoint labels, materialized as tables

    Products between different summands vanish. The summands must share the
    field, the truncation and the grading.
    """
    first = summands[0]
    levels: Dict[int, Dict[Label, int]] = {}
    faces: Dict[Tuple[int, int], Dict[Label, Vector]] = {}
    degeneracies: Dict[Tuple[int, int], Dict[Label, Vector]] = {}
    products: Dict[int, Dict[Tuple[Label, Label], Vector]] = {}
    for X in summands:
        if (X.field, X.truncation, X.graded) != (first.field, first.truncation, first.graded):
            raise LabelMismatchError(f"{X.name} does not match {first.name} in field, truncation or grading")
        for n in X.truncation.degrees():
            level = levels.setdefault(n, {})
            for w in X.weights():
                for label in X.basis(n, w):
                    if label in level:
                        raise LabelMismatchError(f"label {label_text(label)} occurs in two summands")
                    level[label] = w
                    if n >= 1:
                        for i in range(n + 1):
                            faces.setdefault((i, n), {})[label] = X.face_column(i, n, label)
                    if n + 1 <= X.max_degree:
                        for i in range(n + 1):
                            degeneracies.setdefault((i, n), {})[label] = X.degeneracy_column(i, n, label)
            table = products.setdefault(n, {})
            for w1, w2, _ in _weight_pairs(X):
                for a in X.basis(n, w1):
                    for b in X.basis(n, w2):
                        value = X.product(n, (a, b))
                        if value:
                            table[(a, b)] = value
    return TableSimplicialAlgebra(
        first.field, first.truncation, levels, faces, degeneracies, products,
        name or '+'.join(X.name for X in summands), first.graded
    )


def power_object(X: SimplicialAlgebra, s: int) -> SubObject:
    """P^s X as a sub-object of X"""
    if s <= 1:
        return SubObject(X, lambda n, w: Subspace.whole(X.basis(n, w), X.field), f"P1({X.name})")
    return SubObject(X, lambda n, w: X.power_block(s, n, w), f"P{s}({X.name})")


def indecomposables(Y: SimplicialAlgebra) -> QuotientObject:
    """Q(Y) = Y / P²Y"""
    return QuotientObject(Y, lambda n, w: Y.power_block(2, n, w), f"Q({Y.name})")


def kq(Y: SimplicialAlgebra) -> ZeroSquare:
    """KQ(Y): indecomposables with zero multiplication"""
    return ZeroSquare(indecomposables(Y), f"KQ({Y.name})")


class SimplicialMap:
    """Weight-preserving map of simplicial objects given by its blocks"""

    def __init__(self, source: SimplicialVectorSpace, target: SimplicialVectorSpace,
                 component: Callable[[int, int], LinearMap], name: str = 'f'):
        self.source = source
        self.target = target
        self.name = name
        self._component = component
        self._cache: Dict[Tuple[int, int], LinearMap] = {}

    def component(self, q: int, w: int) -> LinearMap:
        key = (q, w)
        if key not in self._cache:
            f = self._component(q, w)
            if f.domain != self.source.basis(q, w) or f.codomain != self.target.basis(q, w):
                raise LabelMismatchError(f"{self.name}: component ({q}, {w}) has the wrong bases")
            self._cache[key] = f
        return self._cache[key]

    __call__ = component

    def compose(self, inner: 'SimplicialMap') -> 'SimplicialMap':
        """self ∘ inner"""
        return SimplicialMap(
            inner.source, self.target,
            lambda q, w: self.component(q, w).compose(inner.component(q, w)),
            f"{self.name}∘{inner.name}"
        )


def eta_map(Y: SimplicialAlgebra, target: Optional[SimplicialVectorSpace] = None) -> SimplicialMap:
    """η: Y -> KQY, the surjection onto indecomposables"""
    target = target or kq(Y)
    quotient = target.source if isinstance(target, ZeroSquare) else target

    def component(q, w):
        one = Y.field.one
        cols = {label: quotient.project(q, w, {label: one}) for label in Y.basis(q, w)}
        return LinearMap(Y.basis(q, w), target.basis(q, w), cols, Y.field)

    return SimplicialMap(Y, target, component, f"eta({Y.name})")


# Validation

class _MapFetcher:
    """Fetches structure maps for validation, turning construction errors into violations"""

    def __init__(self, V: SimplicialVectorSpace, report: CheckReport):
        self.V = V
        self.report = report
        self._memo = {}

    def get(self, kind: str, i: int, n: int, w: int) -> Optional[LinearMap]:
        key = (kind, i, n, w)
        if key not in self._memo:
            try:
                f = self.V.face(i, n, w) if kind == 'd' else self.V.degeneracy(i, n, w)
            except LabelMismatchError as exc:
                self.report.fail('structure maps preserve weight', str(exc), i=i, n=n, w=w)
                f = None
            except EngineError as exc:
                self.report.fail('structure map well-formed', str(exc), i=i, n=n, w=w)
                f = None
            self._memo[key] = f
        return self._memo[key]


def _compare(report: CheckReport, identity: str, lhs: Optional[LinearMap], rhs: Optional[LinearMap], **indices):
    if lhs is None or rhs is None:
        return
    witness = lhs.first_difference(rhs)
    if witness is not None:
        report.fail(identity, label_text(witness), **indices)


def validate(V: SimplicialVectorSpace, check_algebra: bool = True) -> CheckReport:
    """
    Check simplicial identities, weight preservation and multiplicativity

    Args:
        V: Object to validate
        check_algebra: Also check the product when V is a SimplicialAlgebra

    Returns:
        Report listing every violated identity with a witness
    """
    report = CheckReport('validate')
    maps = _MapFetcher(V, report)
    N = V.max_degree
    for w in V.weights():
        for n in range(N + 1):
            try:
                V.basis(n, w)
            except EngineError as exc:
                report.fail('basis well-formed', str(exc), n=n, w=w)
        for n in range(2, N + 1):
            for j in range(1, n + 1):
                for i in range(j):
                    a, b = maps.get('d', j, n, w), maps.get('d', i, n - 1, w)
                    c, d = maps.get('d', i, n, w), maps.get('d', j - 1, n - 1, w)
                    if None not in (a, b, c, d):
                        _compare(report, 'd_i d_j = d_{j-1} d_i', b.compose(a), d.compose(c), i=i, j=j, n=n, w=w)
        for n in range(N - 1):
            for j in range(n + 1):
                for i in range(j + 1):
                    a, b = maps.get('s', j, n, w), maps.get('s', i, n + 1, w)
                    c, d = maps.get('s', i, n, w), maps.get('s', j + 1, n + 1, w)
                    if None not in (a, b, c, d):
                        _compare(report, 's_i s_j = s_{j+1} s_i', b.compose(a), d.compose(c), i=i, j=j, n=n, w=w)
        for n in range(N):
            for j in range(n + 1):
                s = maps.get('s', j, n, w)
                if s is None:
                    continue
                if s.rank() != len(s.domain):
                    report.fail('s_j injective', '', j=j, n=n, w=w)
                for i in range(n + 2):
                    d = maps.get('d', i, n + 1, w)
                    if d is None:
                        continue
                    lhs = d.compose(s)
                    if i < j:
                        d_low, s_low = maps.get('d', i, n, w), maps.get('s', j - 1, n - 1, w)
                        if d_low is not None and s_low is not None:
                            _compare(report, 'd_i s_j = s_{j-1} d_i', lhs, s_low.compose(d_low), i=i, j=j, n=n, w=w)
                    elif i in (j, j + 1):
                        _compare(report, 'd_i s_j = id', lhs, LinearMap.identity(s.domain, V.field), i=i, j=j, n=n, w=w)
                    else:
                        d_low, s_low = maps.get('d', i - 1, n, w), maps.get('s', j, n - 1, w)
                        if d_low is not None and s_low is not None:
                            _compare(report, 'd_i s_j = s_j d_{i-1}', lhs, s_low.compose(d_low), i=i, j=j, n=n, w=w)
    if check_algebra and isinstance(V, SimplicialAlgebra):
        _validate_product(V, maps, report)
    logger.info("validated %s: %d violations", V.name, len(report.violations))
    return report


def _weight_pairs(V: SimplicialVectorSpace):
    if not V.graded:
        yield 0, 0, 0
        return
    for w1 in V.weights():
        for w2 in V.weights():
            if w1 + w2 <= V.max_weight:
                yield w1, w2, w1 + w2


def _validate_product(V: SimplicialAlgebra, maps: _MapFetcher, report: CheckReport):
    N = V.max_degree
    one = V.field.one
    for n in range(N + 1):
        for w1, w2, w12 in _weight_pairs(V):
            target = V.basis(n, w12)
            for a in V.basis(n, w1):
                for b in V.basis(n, w2):
                    ab = V.product(n, (a, b))
                    witness = f"{label_text(a)}*{label_text(b)}"
                    if ab != V.product(n, (b, a)):
                        report.fail('commutative', witness, n=n, w=w12)
                    if any(label not in target for label in ab):
                        report.fail('weight additive', witness, n=n, w=w12)
                        continue
                    for i in range(n + 1 if n >= 1 else 0):
                        d1, d2, d12 = maps.get('d', i, n, w1), maps.get('d', i, n, w2), maps.get('d', i, n, w12)
                        if None in (d1, d2, d12):
                            continue
                        if d12.apply(ab) != V.multiply(n - 1, d1.column(a), d2.column(b)):
                            report.fail('d_i multiplicative', witness, i=i, n=n, w=w12)
                    if n + 1 <= N:
                        for i in range(n + 1):
                            s1, s2, s12 = maps.get('s', i, n, w1), maps.get('s', i, n, w2), maps.get('s', i, n, w12)
                            if None in (s1, s2, s12):
                                continue
                            if s12.apply(ab) != V.multiply(n + 1, s1.column(a), s2.column(b)):
                                report.fail('s_i multiplicative', witness, i=i, n=n, w=w12)
        for w1, w2, w12 in _weight_pairs(V):
            for w3 in V.weights():
                if V.graded and w12 + w3 > V.max_weight:
                    continue
                for a in V.basis(n, w1):
                    for b in V.basis(n, w2):
                        ab = V.product(n, (a, b))
                        for c in V.basis(n, w3):
                            left = V.multiply(n, ab, {c: one})
                            right = V.multiply(n, {a: one}, V.product(n, (b, c)))
                            if left != right:
                                report.fail('associative', f"{label_text(a)}*{label_text(b)}*{label_text(c)}",
                                            n=n, w=w12 + w3 if V.graded else 0)


# Moore complex and homotopy

@dataclass
class HomologyBlock:
    """H_q in weight w, in coordinates of the Moore chain space"""
    q: int
    w: int
    chain_basis: LabeledBasis
    boundaries: Subspace
    representatives: Subspace

    @property
    def dim(self) -> int:
        return self.representatives.dim

    @property
    def basis(self) -> LabeledBasis:
        return self.representatives.basis

    def class_of(self, cycle: Mapping[Label, object]) -> Vector:
        """Coordinates of the class of a cycle in the representative basis"""
        return self.representatives.coordinates(self.boundaries.reduce(cycle))


class MooreComplex:
    """Normalized chain complex of a simplicial vector space"""

    def __init__(self, V: SimplicialVectorSpace):
        self.V = V
        self._chains: Dict[Tuple[int, int], Subspace] = {}
        self._differentials: Dict[Tuple[int, int], LinearMap] = {}
        self._homology: Dict[Tuple[int, int], HomologyBlock] = {}

    def chains(self, q: int, w: int) -> Subspace:
        """N_q = ∩_{i=1..q} ker d_i inside V_{q,w}"""
        key = (q, w)
        if key not in self._chains:
            V = self.V
            if q == 0:
                sub = Subspace.whole(V.basis(0, w), V.field)
            else:
                stacked = stack([V.face(i, q, w) for i in range(1, q + 1)])
                sub = stacked.kernel()
            logger.debug("N_%d in weight %d of %s: dim %d", q, w, V.name, sub.dim)
            self._chains[key] = sub
        return self._chains[key]

    def differential(self, q: int, w: int) -> LinearMap:
        """d_0: N_q -> N_{q-1} in chain-space coordinates (zero map out of N_0)"""
        key = (q, w)
        if key not in self._differentials:
            source = self.chains(q, w)
            if q == 0:
                d = LinearMap.zero(source.basis, LabeledBasis(), self.V.field)
            else:
                target = self.chains(q - 1, w)
                face = self.V.face(0, q, w)
                cols = {}
                for pivot, row in zip(source.pivots, source.rows):
                    try:
                        cols[pivot] = target.coordinates(face.apply(row))
                    except ContainmentError as exc:
                        raise NonComplexError(
                            f"d_0 of {label_text(pivot)} leaves the Moore complex in degree {q - 1}"
                        ) from exc
                d = LinearMap(source.basis, target.basis, cols, self.V.field)
            self._differentials[key] = d
        return self._differentials[key]

    def _check_sound(self, q: int):
        if q + 1 > self.V.max_degree:
            raise TruncationError(
                f"pi_{q} of {self.V.name} needs degree {q + 1}, truncation has N={self.V.max_degree}"
            )

    def homology_dim(self, q: int, w: int) -> int:
        self._check_sound(q)
        return homology_dims(self.differential(q + 1, w), self.differential(q, w))

    def homology(self, q: int, w: int) -> HomologyBlock:
        key = (q, w)
        if key not in self._homology:
            self._check_sound(q)
            d_out = self.differential(q, w)
            d_in = self.differential(q + 1, w)
            if not d_out.compose(d_in).is_zero():
                raise NonComplexError(f"Moore differentials of {self.V.name} do not square to zero")
            chain_basis = d_out.domain
            boundaries = d_in.image()
            cycles = d_out.kernel_basis()
            reduced = [boundaries.reduce(z) for z in cycles]
            reps = Subspace.span(chain_basis, [r for r in reduced if r], self.V.field)
            self._homology[key] = HomologyBlock(q, w, chain_basis, boundaries, reps)
        return self._homology[key]

    def induced_map(self, f: SimplicialMap, target: 'MooreComplex', q: int, w: int) -> LinearMap:
        """
        Map on π_q induced by a simplicial map

        Args:
            f: Simplicial map from self.V to target.V
            target: Moore complex of f's target
            q: Homotopy degree
            w: Weight

        Returns:
            LinearMap between the representative bases of the two homology blocks
        """
        source_h = self.homology(q, w)
        target_h = target.homology(q, w)
        component = f.component(q, w)
        source_chains = self.chains(q, w)
        target_chains = target.chains(q, w)

        def push(chain_vec):
            image = component.apply(source_chains.vector(chain_vec))
            try:
                return target_chains.coordinates(image)
            except ContainmentError as exc:
                raise ContainmentError(f"{f.name} does not preserve the Moore complex", exc.witness) from exc

        for row in source_h.boundaries.rows:
            if target_h.class_of(push(row)):
                raise ContainmentError(f"{f.name} sends a boundary to a nonzero class in degree {q}")
        cols = {pivot: target_h.class_of(push(row))
                for pivot, row in zip(source_h.representatives.pivots, source_h.representatives.rows)}
        return LinearMap(source_h.basis, target_h.basis, cols, self.V.field)


def _require_graded(V: SimplicialVectorSpace):
    if not V.graded:
        raise UngradedError(f"{V.name} has no weight grading; homotopy needs finite weight blocks")


def homotopy_groups(V: SimplicialVectorSpace, q_max: int, w_max: Optional[int] = None,
                    moore: Optional[MooreComplex] = None) -> Dict[Tuple[int, int], int]:
    """
    Dimensions of π_q per weight

    Args:
        V: Weight-graded simplicial vector space
        q_max: Highest homotopy degree; needs q_max + 1 <= N
        w_max: Highest weight (defaults to the truncation)
        moore: Reuse an existing Moore complex

    Returns:
        {(q, w): dim π_q in weight w}
    """
    _require_graded(V)
    if q_max + 1 > V.max_degree:
        raise TruncationError(f"pi_{q_max} needs degree {q_max + 1}, truncation has N={V.max_degree}")
    moore = moore or MooreComplex(V)
    top = V.max_weight if w_max is None else min(w_max, V.max_weight)
    return {(q, w): moore.homology_dim(q, w) for q in range(q_max + 1) for w in range(1, top + 1)}


def total_homotopy(table: Mapping[Tuple[int, int], int]) -> Dict[int, int]:
    """π_q summed over weights"""
    out: Dict[int, int] = {}
    for (q, _), dim in table.items():
        out[q] = out.get(q, 0) + dim
    return out


def is_connected(X: SimplicialVectorSpace) -> bool:
    """π_0 vanishes in every weight"""
    return all(dim == 0 for dim in homotopy_groups(X, 0).values())


def alternating_face_sum(V: SimplicialVectorSpace, q: int, w: int) -> LinearMap:
    """Σ (-1)^i d_i on V_{q,w}, the unnormalized differential"""
    total = LinearMap.zero(V.basis(q, w), V.basis(q - 1, w), V.field)
    for i in range(q + 1):
        face = V.face(i, q, w)
        total = total + face if i % 2 == 0 else total - face
    return total


def unnormalized_homology_dim(V: SimplicialVectorSpace, q: int, w: int) -> int:
    """Homology of the full chain complex, including degenerate simplices"""
    d_out = alternating_face_sum(V, q, w) if q > 0 else LinearMap.zero(V.basis(0, w), LabeledBasis(), V.field)
    return homology_dims(alternating_face_sum(V, q + 1, w), d_out)


# Maps and homotopies

def check_simplicial_map(f: SimplicialMap, q_max: Optional[int] = None) -> CheckReport:
    """f commutes with every face and degeneracy up to degree q_max"""
    report = CheckReport(f"simplicial map {f.name}")
    K, L = f.source, f.target
    top = min(K.max_degree, L.max_degree) if q_max is None else q_max
    for w in K.weights():
        for q in range(top + 1):
            for i in range(q + 1):
                if q >= 1:
                    _compare(report, 'f d_i = d_i f', f(q - 1, w).compose(K.face(i, q, w)),
                             L.face(i, q, w).compose(f(q, w)), i=i, q=q, w=w)
                if q + 1 <= top:
                    _compare(report, 'f s_i = s_i f', f(q + 1, w).compose(K.degeneracy(i, q, w)),
                             L.degeneracy(i, q, w).compose(f(q, w)), i=i, q=q, w=w)
    return report


HomotopyFamily = Callable[[int, int, int], LinearMap]
MapFamily = Callable[[int, int], LinearMap]


def check_simplicial_homotopy(h: HomotopyFamily, f: MapFamily, g: MapFamily,
                              source: SimplicialVectorSpace, target: SimplicialVectorSpace,
                              q_max: int, weights: Optional[Iterable[int]] = None) -> CheckReport:
    """
    Verify a simplicial homotopy h from f to g as exact LinearMap equalities

    Args:
        h: h(j, q, w): source_{q,w} -> target_{q+1,w} for 0 <= j <= q <= q_max
        f: f(q, w), the map at the d_0 end
        g: g(q, w), the map at the d_{q+1} end
        source: Domain object (realized to q_max)
        target: Codomain object (realized to q_max + 1)
        q_max: Highest degree checked
        weights: Weights to check (defaults to all of source)

    Returns:
        Report naming each failing identity with (i, j, q, w) and a witness
    """
    report = CheckReport('simplicial homotopy')
    K, L = source, target
    dK = lambda i, q, w: K.face(i, q, w)
    dL = lambda i, q, w: L.face(i, q, w)
    sK = lambda i, q, w: K.degeneracy(i, q, w)
    sL = lambda i, q, w: L.degeneracy(i, q, w)
    for w in (weights if weights is not None else K.weights()):
        for q in range(q_max + 1):
            for j in range(q + 1):
                for i in range(j):
                    _compare(report, '(1) d_i h_j = h_{j-1} d_i',
                             dL(i, q + 1, w).compose(h(j, q, w)), h(j - 1, q - 1, w).compose(dK(i, q, w)),
                             i=i, j=j, q=q, w=w)
            for j in range(q):
                _compare(report, '(2) d_{j+1} h_j = d_{j+1} h_{j+1}',
                         dL(j + 1, q + 1, w).compose(h(j, q, w)), dL(j + 1, q + 1, w).compose(h(j + 1, q, w)),
                         j=j, q=q, w=w)
            for j in range(q + 1):
                for i in range(j + 2, q + 2):
                    _compare(report, '(3) d_i h_j = h_j d_{i-1}',
                             dL(i, q + 1, w).compose(h(j, q, w)), h(j, q - 1, w).compose(dK(i - 1, q, w)),
                             i=i, j=j, q=q, w=w)
            if q + 1 <= q_max:
                for j in range(q + 1):
                    for i in range(j + 1):
                        _compare(report, '(4) s_i h_j = h_{j+1} s_i',
                                 sL(i, q + 1, w).compose(h(j, q, w)), h(j + 1, q + 1, w).compose(sK(i, q, w)),
                                 i=i, j=j, q=q, w=w)
                    for i in range(j + 1, q + 2):
                        _compare(report, '(5) s_i h_j = h_j s_{i-1}',
                                 sL(i, q + 1, w).compose(h(j, q, w)), h(j, q + 1, w).compose(sK(i - 1, q, w)),
                                 i=i, j=j, q=q, w=w)
            _compare(report, 'd_0 h_0 = f', dL(0, q + 1, w).compose(h(0, q, w)), f(q, w), q=q, w=w)
            _compare(report, 'd_{q+1} h_q = g', dL(q + 1, q + 1, w).compose(h(q, q, w)), g(q, w), q=q, w=w)
    logger.info("simplicial homotopy check: %d violations", len(report.violations))
    return report


def moore_complex(V: SimplicialVectorSpace) -> MooreComplex:
    """The Moore complex of V, shared by every caller"""
    if '_moore' not in V.__dict__:
        V.__dict__['_moore'] = MooreComplex(V)
    return V.__dict__['_moore']
