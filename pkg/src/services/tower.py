"""
The modified Adams tower D̃_r X inside b^r X, its tower maps δ, derived
powers D̃_t P^s, and the checks on their homotopy.

In degree n a label of b^r X is a tree of height r(n+1) over the labels of
X_n. The nodes at height i(n+1) above X are labels of b^i X; D̃_r X is
spanned by the trees having, for every i = 1..r, some such node whose root
has at least two children.
"""

import logging
from typing import Callable, Dict, Optional, Tuple

from src.models.errors import (
    ContainmentError, ResourceCapError, SurjectivityError, TruncationError,
)
from src.models.exactlin import LabeledBasis, LinearMap, Subspace, intersect
from src.models.freealg import NodeRewriter, leaves, nodes_at
from src.models.report import CheckReport
from src.models.simplicial import (
    SimplicialAlgebra, SimplicialMap, SimplicialVectorSpace, SubObject, ZeroSquare,
    check_simplicial_homotopy, eta_map, kq, label_text,
    moore_complex, power_object,
)
from src.services.bar import (
    HomotopyH, augmentation, bar, build_bar, iterate_bar_map, lift_homotopy,
)

logger = logging.getLogger(__name__)


def _memo(Y: SimplicialVectorSpace, slot: str) -> Dict:
    return Y.__dict__.setdefault(slot, {})


def _skip(report: CheckReport, exc: ResourceCapError):
    block = f"n={exc.n},w={exc.w},r={exc.r}"
    if block not in report.skipped:
        report.skipped.append(block)


# Tower levels

def _has_decomposable_node(tree, at_height: int) -> bool:
    return any(len(node) >= 2 for node in nodes_at(tree, at_height))


def tower_basis(X: SimplicialAlgebra, r: int, n: int, w: int, cap: Optional[int] = None) -> LabeledBasis:
    """
    Monomial basis of D̃_r X in block (n, w)

    Args:
        X: Weight-graded simplicial algebra
        r: Tower level; 0 gives the basis of X
        n: Simplicial degree
        w: Weight
        cap: Block cap for b^r X

    Returns:
        The trees of b^r X with a decomposable node at every height i(n+1), 1 <= i <= r
    """
    ambient = build_bar(X, r, cap).basis(n, w)
    h = X.label_depth(n)
    heights = [h + i * (n + 1) for i in range(1, r + 1)]
    return LabeledBasis(t for t in ambient if all(_has_decomposable_node(t, at) for at in heights))


def tower_kernel_oracle(X: SimplicialAlgebra, r: int, n: int, w: int, cap: Optional[int] = None) -> Subspace:
    """
    ∩_{i=1..r} ker b^{r-i}(η_{b^i X}) on b^r X, by elimination; the whole space when r = 0

    Each kernel comes from the real map b^{r-i}(η): b^r X -> b^{r-i}(KQ b^i X).
    """
    ambient = build_bar(X, r, cap).basis(n, w)
    kernels = []
    for i in range(1, r + 1):
        Y = build_bar(X, i, cap)
        eta = iterate_bar_map(eta_map(Y, _kq_of(Y)), r - i, cap)
        kernels.append(eta(n, w).kernel())
    return intersect(kernels, ambient, X.field)


class TowerLevel(SubObject):
    """D̃_r X as a sub-object of b^r X, spanned by its monomial basis"""

    def __init__(self, X: SimplicialAlgebra, r: int, cap: Optional[int] = None):
        self.X = X
        self.r = r
        self.cap = cap
        parent = build_bar(X, r, cap)
        super().__init__(parent, self._tower_block, f"D{r}({X.name})")

    def _tower_block(self, n, w):
        return Subspace.from_labels(self.parent.basis(n, w), tower_basis(self.X, self.r, n, w, self.cap), self.field)

    def product(self, n, labels):
        return self.parent.product(n, labels)


def tower_level(X: SimplicialAlgebra, r: int, cap: Optional[int] = None) -> TowerLevel:
    levels = _memo(X, '_tower')
    if (r, cap) not in levels:
        levels[(r, cap)] = TowerLevel(X, r, cap)
    return levels[(r, cap)]


def check_tower_level(X: SimplicialAlgebra, r: int, n_max: int, weights=None, cap: Optional[int] = None) -> CheckReport:
    """
    Monomial basis against the kernel oracle, and closure of D̃_r X

    Args:
        X: Weight-graded simplicial algebra
        r: Tower level
        n_max: Highest simplicial degree checked
        weights: Weights checked (defaults to all)
        cap: Block cap

    Returns:
        Report with per-block dimensions and any disagreement
    """
    report = CheckReport(f"tower basis r={r}")
    level = tower_level(X, r, cap)
    for w in (weights if weights is not None else X.weights()):
        for n in range(n_max + 1):
            try:
                block = level.block(n, w)
                oracle = tower_kernel_oracle(X, r, n, w, cap)
            except ResourceCapError as exc:
                _skip(report, exc)
                continue
            report.measure('dim', block.dim, r=r, n=n, w=w)
            if block != oracle:
                missing = [t for t in block.basis if not oracle.contains({t: X.field.one})]
                report.fail('tower basis spans the kernel intersection',
                            label_text(missing[0]) if missing else f"oracle dim {oracle.dim}", r=r, n=n, w=w)
            try:
                if n >= 1:
                    for i in range(n + 1):
                        level.face(i, n, w)
                if n + 1 <= n_max:
                    for i in range(n + 1):
                        level.degeneracy(i, n, w)
            except ContainmentError as exc:
                report.fail('tower level closed under structure maps', str(exc), r=r, n=n, w=w)
            except ResourceCapError as exc:
                _skip(report, exc)
    return report


def check_tower_products(X: SimplicialAlgebra, r: int, n: int, w1: int, w2: int, cap: Optional[int] = None) -> CheckReport:
    """D̃_r X is closed under the product of b^r X"""
    report = CheckReport(f"tower products r={r}")
    level = tower_level(X, r, cap)
    target = level.block(n, w1 + w2)
    for a in level.basis(n, w1):
        for b in level.basis(n, w2):
            if not target.contains(level.product(n, (a, b))):
                report.fail('tower level closed under products', f"{label_text(a)}*{label_text(b)}", r=r, n=n)
    return report


# Tower maps

def delta(X: SimplicialAlgebra, r: int, i: Optional[int] = None, cap: Optional[int] = None) -> SimplicialMap:
    """
    D̃_i δ: D̃_r X -> D̃_{r-1} X, the restriction of b^i ε b^{r-i-1}

    Args:
        X: Weight-graded simplicial algebra
        r: Source level, r >= 1
        i: Which bar the augmentation acts in, 0 <= i < r (defaults to r - 1)
        cap: Block cap

    Returns:
        Simplicial map; a component escaping D̃_{r-1} X raises ContainmentError
    """
    if r < 1:
        raise TruncationError("the tower map starts at level 1")
    i = r - 1 if i is None else i
    if not 0 <= i < r:
        raise TruncationError(f"tower map index {i} outside 0..{r - 1}")
    source, target = tower_level(X, r, cap), tower_level(X, r - 1, cap)
    Z = build_bar(X, r - i - 1, cap)

    def component(n, w):
        h = X.label_depth(n)
        inner = h + (r - i - 1) * (n + 1)
        rewriter = NodeRewriter(h + (r - i) * (n + 1), lambda node: Z.product(n, leaves(node, inner)))
        ambient = source.parent.basis(n, w)
        parent_map = LinearMap(ambient, target.parent.basis(n, w), {t: rewriter(t) for t in ambient}, X.field)
        return source.restrict_map(parent_map, target, n, w, f"delta_{i}")

    return SimplicialMap(source, target, component, f"delta{r},{i}")


def tower_map(X: SimplicialAlgebra, m: int, n: int, cap: Optional[int] = None) -> SimplicialMap:
    """Composite of the standard tower maps D̃_m X -> D̃_n X"""
    level = tower_level(X, m, cap)
    f = SimplicialMap(level, level, lambda q, w: LinearMap.identity(level.basis(q, w), X.field), 'id')
    for r in range(m, n, -1):
        f = delta(X, r, cap=cap).compose(f)
    return f


def power(X: SimplicialAlgebra, s: int) -> SubObject:
    """P^s X, the levelwise span of s-fold products"""
    return power_object(X, s)


def check_delta_powers(X: SimplicialAlgebra, r: int, n_max: int, weights=None, cap: Optional[int] = None) -> CheckReport:
    """δ^r(D̃_r X) ⊆ P^{r+1} X blockwise"""
    report = CheckReport(f"tower into powers r={r}")
    composite = tower_map(X, r, 0, cap)
    for w in (weights if weights is not None else X.weights()):
        for n in range(n_max + 1):
            try:
                f = composite(n, w)
            except ResourceCapError as exc:
                _skip(report, exc)
                continue
            except ContainmentError as exc:
                report.fail('delta lands in the next level', str(exc), r=r, n=n, w=w)
                continue
            target = X.power_block(r + 1, n, w)
            report.measure('rank', f.rank(), r=r, n=n, w=w)
            base = tower_level(X, 0, cap).block(n, w)
            for label in f.domain:
                image = base.vector(f.column(label))
                if not target.contains(image):
                    report.fail('delta^r lands in P^{r+1}', label_text(label), r=r, n=n, w=w)
                    break
    return report


# Derived functors of the tower

def _kq_of(Y: SimplicialAlgebra) -> ZeroSquare:
    if '_kq' not in Y.__dict__:
        Y.__dict__['_kq'] = kq(Y)
    return Y.__dict__['_kq']


def derived_functor(A: SimplicialAlgebra, t: int, inner: Callable[[SimplicialAlgebra], SubObject],
                    inner_depth: int, key: str, cap: Optional[int] = None) -> SubObject:
    """
    D̃_t F (A) = ker(D̃_{t-1} F(bA) -> D̃_{t-1} F(KQbA)), with D̃_0 F = F

    Args:
        A: Weight-graded simplicial algebra
        t: Number of derivations
        inner: F, returning a sub-object of b^{inner_depth} of its argument
        inner_depth: Bar iterations F uses
        key: Name of F for caching
        cap: Block cap

    Returns:
        Sub-object of b^{t + inner_depth} A; every kernel is of a surjection (asserted)
    """
    cache = _memo(A, '_derived')
    if (key, t, cap) in cache:
        return cache[(key, t, cap)]
    if t == 0:
        result = inner(A)
    else:
        bA = bar(A, cap)
        quotient = _kq_of(bA)
        parent = derived_functor(bA, t - 1, inner, inner_depth, key, cap)
        target = derived_functor(quotient, t - 1, inner, inner_depth, key, cap)
        eta = iterate_bar_map(eta_map(bA, quotient), t - 1 + inner_depth, cap)

        def block(n, w):
            restricted = parent.restrict_map(eta(n, w), target, n, w, 'eta')
            if not restricted.is_surjective():
                raise SurjectivityError(
                    f"{key}: eta restricted to block ({n}, {w}) has rank {restricted.rank()} < {len(restricted.codomain)}"
                )
            source_block = parent.block(n, w)
            vectors = [source_block.vector(v) for v in restricted.kernel_basis()]
            return Subspace.span(source_block.ambient, vectors, A.field)

        result = SubObject(parent.parent, block, f"D{t}{key}({A.name})")
    cache[(key, t, cap)] = result
    return result


def derived_power(A: SimplicialAlgebra, t: int, s: int, cap: Optional[int] = None) -> SubObject:
    """D̃_t P^s (A), inside b^t A"""
    return derived_functor(A, t, lambda Y: power_object(Y, s), 0, f"P{s}", cap)


def derived_power_basis(A: SimplicialAlgebra, t: int, s: int, n: int, w: int, cap: Optional[int] = None) -> LabeledBasis:
    """Unrolled description: root of size >= s and a decomposable node at every height i(n+1), 1 <= i < t"""
    if t < 1:
        raise TruncationError("the unrolled description starts at t = 1")
    ambient = build_bar(A, t, cap).basis(n, w)
    h = A.label_depth(n)
    heights = [h + i * (n + 1) for i in range(1, t)]
    return LabeledBasis(
        tree for tree in ambient
        if len(tree) >= s and all(_has_decomposable_node(tree, at) for at in heights)
    )


def iterated_tower(X: SimplicialAlgebra, s: int, t: int, cap: Optional[int] = None) -> SubObject:
    """D̃_s(D̃_t)(X), inside b^{s+t} X"""
    return derived_functor(X, s, lambda Y: tower_level(Y, t, cap), t, f"D{t}", cap)


def check_iterated_tower(X: SimplicialAlgebra, s: int, t: int, n_max: int, weights=None,
                         cap: Optional[int] = None) -> CheckReport:
    """D̃_s(D̃_t X) = D̃_{s+t} X on realized blocks"""
    report = CheckReport(f"iterated tower s={s} t={t}")
    nested = iterated_tower(X, s, t, cap)
    level = tower_level(X, s + t, cap)
    for w in (weights if weights is not None else X.weights()):
        for n in range(n_max + 1):
            try:
                left, right = nested.block(n, w), level.block(n, w)
            except ResourceCapError as exc:
                _skip(report, exc)
                continue
            report.measure('dim', right.dim, n=n, w=w)
            if left != right:
                report.fail('iterated tower equals the deeper level', f"{left.dim} != {right.dim}", n=n, w=w)
    return report


def tower_functor_map(f: SimplicialMap, r: int, cap: Optional[int] = None) -> SimplicialMap:
    """D̃_r(f): b^r(f) restricted to the tower levels"""
    K, L = f.source, f.target
    source, target = tower_level(K, r, cap), tower_level(L, r, cap)
    lifted = iterate_bar_map(f, r, cap)
    return SimplicialMap(source, target, lambda n, w: source.restrict_map(lifted(n, w), target, n, w, f"D{r}({f.name})"),
                         f"D{r}({f.name})")


def check_tower_surjectivity(f: SimplicialMap, r: int, n_max: int, weights=None, cap: Optional[int] = None) -> CheckReport:
    """A blockwise surjection f gives a blockwise surjection D̃_r(f)"""
    report = CheckReport(f"tower preserves surjections r={r}")
    g = tower_functor_map(f, r, cap)
    for w in (weights if weights is not None else f.source.weights()):
        for n in range(n_max + 1):
            if not f(n, w).is_surjective():
                continue
            try:
                block = g(n, w)
            except ResourceCapError as exc:
                _skip(report, exc)
                continue
            report.measure('rank', block.rank(), n=n, w=w)
            if not block.is_surjective():
                report.fail('D_r(f) surjective', f"rank {block.rank()} < {len(block.codomain)}", n=n, w=w)
    return report


# Homotopy of the tower

def connectivity_report(A: SimplicialAlgebra, t: int, s: int, q_max: int, weights=None,
                        cap: Optional[int] = None) -> CheckReport:
    """
    π_q(D̃_t P^s A) per weight; nonzero groups with q <= s - t are falsifications

    Args:
        A: Connected weight-graded simplicial algebra
        t: Derivations
        s: Power
        q_max: Highest homotopy degree (needs q_max + 1 <= N)
        weights: Weights computed (defaults to all)
        cap: Block cap

    Returns:
        Report with one 'pi' measurement per (q, w)
    """
    if q_max + 1 > A.max_degree:
        raise TruncationError(f"pi_{q_max} needs degree {q_max + 1}, truncation has N={A.max_degree}")
    report = CheckReport(f"connectivity t={t} s={s}")
    V = derived_power(A, t, s, cap)
    moore = moore_complex(V)
    for w in (weights if weights is not None else A.weights()):
        for q in range(q_max + 1):
            try:
                dim = moore.homology_dim(q, w)
            except ResourceCapError as exc:
                _skip(report, exc)
                continue
            report.measure('pi', dim, q=q, w=w)
            if dim and q <= s - t:
                report.fail('D_t P^s is (s-t)-connected', f"dim pi_{q} = {dim}", q=q, w=w)
    return report


def induced_rank(f: SimplicialMap, q: int, w: int) -> Tuple[int, int, LinearMap]:
    """Source dimension, target dimension and the induced map on π_q"""
    source, target = moore_complex(f.source), moore_complex(f.target)
    induced = source.induced_map(f, target, q, w)
    return source.homology(q, w).dim, target.homology(q, w).dim, induced


def convergence_check(X: SimplicialAlgebra, t: int, q: int, weights=None, cap: Optional[int] = None) -> CheckReport:
    """
    π_q(D̃_{2t+q-1} X) -> π_q(D̃_t X) is zero

    The chain-level composite of tower maps is passed to homotopy and
    compared with the composite of the induced maps of the single steps.
    The report is vacuous when every source group vanishes.
    """
    if q + 1 > X.max_degree:
        raise TruncationError(f"pi_{q} needs degree {q + 1}, truncation has N={X.max_degree}")
    m = 2 * t + q - 1
    report = CheckReport(f"convergence t={t} q={q}")
    composite = tower_map(X, m, t, cap)
    steps = [delta(X, r, cap=cap) for r in range(m, t, -1)]
    nonvacuous = False
    for w in (weights if weights is not None else X.weights()):
        try:
            source_dim, target_dim, induced = induced_rank(composite, q, w)
            stepwise = None
            for step in steps:
                _, _, g = induced_rank(step, q, w)
                stepwise = g if stepwise is None else g.compose(stepwise)
        except ResourceCapError as exc:
            _skip(report, exc)
            continue
        report.measure('dim source', source_dim, q=q, w=w)
        report.measure('dim target', target_dim, q=q, w=w)
        report.measure('rank', induced.rank(), q=q, w=w)
        nonvacuous = nonvacuous or source_dim > 0
        if stepwise is not None and stepwise != induced:
            report.fail('induced maps compose', '', q=q, w=w)
        if not induced.is_zero():
            witness = next(label for label in induced.domain if induced.column(label))
            report.fail('pi_q(D_{2t+q-1}) -> pi_q(D_t) is zero', label_text(witness), q=q, w=w)
    report.vacuous = not nonvacuous
    return report


def tower_limit_report(X: SimplicialAlgebra, q: int, n_max: int, weights=None, cap: Optional[int] = None) -> CheckReport:
    """
    The tower {π_q(D̃_n X)}_{n <= n_max}: dimensions, ranks of all maps and stable images

    Images from level m >= 2n+q-1 into level n >= 2 must vanish, which is
    what makes the tower Mittag-Leffler with zero limit.
    """
    if q + 1 > X.max_degree:
        raise TruncationError(f"pi_{q} needs degree {q + 1}, truncation has N={X.max_degree}")
    report = CheckReport(f"tower limit q={q}")
    for w in (weights if weights is not None else X.weights()):
        try:
            for n in range(n_max + 1):
                report.measure('pi', moore_complex(tower_level(X, n, cap)).homology(q, w).dim, n=n, q=q, w=w)
            for n in range(n_max + 1):
                for m in range(n + 1, n_max + 1):
                    _, _, induced = induced_rank(tower_map(X, m, n, cap), q, w)
                    rank = induced.rank()
                    report.measure('rank', rank, m=m, n=n, q=q, w=w)
                    if n >= 2 and m >= 2 * n + q - 1 and rank:
                        report.fail('image vanishes', f"rank {rank}", m=m, n=n, q=q, w=w)
        except ResourceCapError as exc:
            _skip(report, exc)
    return report


def twisting_check(X: SimplicialAlgebra, n: int, q_max: int, weights=None, cap: Optional[int] = None) -> CheckReport:
    """
    The maps D̃_i δ: D̃_n X -> D̃_{n-1} X agree on π_q for q <= q_max

    Consecutive maps are joined by b^i(h) for the homotopy h of
    b²(b^{n-i-2} X); the homotopy is restricted to the tower levels, with
    containment checked, and verified as a simplicial homotopy.
    """
    if q_max + 1 > X.max_degree:
        raise TruncationError(f"pi_{q_max} needs degree {q_max + 1}, truncation has N={X.max_degree}")
    report = CheckReport(f"twisting n={n}")
    maps = [delta(X, n, i, cap) for i in range(n)]
    source, target = tower_level(X, n, cap), tower_level(X, n - 1, cap)
    chosen = list(weights if weights is not None else X.weights())
    for w in chosen:
        try:
            for q in range(q_max + 1):
                induced = [induced_rank(f, q, w)[2] for f in maps]
                report.measure('rank', induced[0].rank(), n=n, q=q, w=w)
                for i in range(1, n):
                    if induced[i] != induced[0]:
                        report.fail('D_i delta induce equal maps', '', i=i, n=n, q=q, w=w)
        except ResourceCapError as exc:
            _skip(report, exc)
        except ContainmentError as exc:
            report.fail('delta lands in the next level', str(exc), n=n, w=w)
    for i in range(n - 1):
        Y = build_bar(X, n - i - 2, cap)
        h = HomotopyH(Y, cap)
        K, L = build_bar(Y, 2, cap), build_bar(Y, 1, cap)
        for _ in range(i):
            h = lift_homotopy(h, K, L, cap)
            K, L = bar(K, cap), bar(L, cap)

        def restricted(j, q, w, h=h):
            return _restrict_homotopy(h(j, q, w), source, target, q, w, j)

        for w in chosen:
            try:
                part = check_simplicial_homotopy(restricted, maps[i].component, maps[i + 1].component, source, target, q_max, [w])
            except ResourceCapError as exc:
                _skip(report, exc)
                continue
            except ContainmentError as exc:
                report.fail('homotopy restricts to the tower', label_text(exc.witness) if exc.witness else str(exc),
                            i=i, n=n, w=w)
                continue
            report.extend(part)
    logger.info("twisting check n=%d on %s: %d violations", n, X.name, len(report.violations))
    return report


def _restrict_homotopy(h: LinearMap, source: SubObject, target: SubObject, q: int, w: int, j: int) -> LinearMap:
    src, tgt = source.block(q, w), target.block(q + 1, w)
    cols = {}
    for pivot, row in zip(src.pivots, src.rows):
        image = h.apply(row)
        try:
            cols[pivot] = tgt.coordinates(image)
        except ContainmentError as exc:
            raise ContainmentError(f"h_{j} of {label_text(pivot)} leaves the tower", pivot) from exc
    return LinearMap(src.basis, tgt.basis, cols, source.field)


def augmentation_agrees_with_delta(X: SimplicialAlgebra, r: int, i: int, n_max: int, weights=None,
                                   cap: Optional[int] = None) -> CheckReport:
    """D̃_i δ equals b^i(ε) restricted, with ε the augmentation of b^{r-i-1} X"""
    report = CheckReport(f"delta via augmentation r={r} i={i}")
    Z = build_bar(X, r - i - 1, cap)
    lifted = iterate_bar_map(augmentation(Z, 1, cap), i, cap)
    f = delta(X, r, i, cap)
    source, target = f.source, f.target
    for w in (weights if weights is not None else X.weights()):
        for n in range(n_max + 1):
            try:
                expected = source.restrict_map(lifted(n, w), target, n, w)
                actual = f(n, w)
            except ResourceCapError as exc:
                _skip(report, exc)
                continue
            witness = actual.first_difference(expected)
            if witness is not None:
                report.fail('delta = b^i(eps)', label_text(witness), n=n, w=w)
    return report
