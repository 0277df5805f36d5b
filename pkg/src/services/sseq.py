"""
Power filtration of bA, symmetric coinvariants and the E⁰ page of the
filtration spectral sequence, compared as dimension tables.
"""

import logging
from itertools import combinations_with_replacement
from typing import Dict, Optional, Tuple

from src.models.errors import ResourceCapError, TruncationError
from src.models.exactlin import LabeledBasis, LinearMap, Subspace
from src.models.freealg import multiset_expand
from src.models.report import CheckReport
from src.models.simplicial import (
    QuotientObject, SimplicialAlgebra, SimplicialVectorSpace,
    indecomposables, moore_complex, power_object,
)
from src.services.bar import bar

logger = logging.getLogger(__name__)


class CoinvariantSpace(SimplicialVectorSpace):
    """(V^{⊗p})_{Σ_p}: orbits of p-tuples, i.e. size-p multisets of basis labels.

    Faces and degeneracies act diagonally; permutations carry no signs.
    """

    def __init__(self, source: SimplicialVectorSpace, p: int):
        super().__init__(source.field, source.truncation, f"Sym{p}({source.name})", source.graded)
        self.source = source
        self.p = p

    def _build_basis(self, n, w):
        V = self.source
        pool = sorted((label, v) for v in V.weights() for label in V.basis(n, v))
        return LabeledBasis(
            tuple(label for label, _ in combo)
            for combo in combinations_with_replacement(pool, self.p)
            if (sum(v for _, v in combo) if V.graded else 0) == w
        )

    def label_weight(self, n, label):
        if not self.graded:
            return 0
        return sum(self.source.label_weight(n, part) for part in label)

    def _diagonal(self, column, n, m, w) -> LinearMap:
        cols = {orbit: multiset_expand([column(part) for part in orbit]) for orbit in self.basis(n, w)}
        return LinearMap(self.basis(n, w), self.basis(m, w), cols, self.field)

    def _build_face(self, i, n, w):
        return self._diagonal(lambda label: self.source.face_column(i, n, label), n, n - 1, w)

    def _build_degeneracy(self, i, n, w):
        return self._diagonal(lambda label: self.source.degeneracy_column(i, n, label), n, n + 1, w)


def sym_coinvariants(V: SimplicialVectorSpace, p: int) -> SimplicialVectorSpace:
    """
    Symmetric coinvariants of the p-th tensor power

    Args:
        V: Simplicial vector space
        p: Power, p >= 1

    Returns:
        V itself when p = 1, else a CoinvariantSpace (shared per (V, p))
    """
    if p == 1:
        return V
    cache = V.__dict__.setdefault('_sym', {})
    if p not in cache:
        cache[p] = CoinvariantSpace(V, p)
    return cache[p]


def _sound(V: SimplicialVectorSpace, q_max: int):
    if q_max + 1 > V.max_degree:
        raise TruncationError(f"pi_{q_max} needs degree {q_max + 1}, truncation has N={V.max_degree}")


def dold_puppe_check(V: SimplicialVectorSpace, p: int, q_max: Optional[int] = None, weights=None) -> CheckReport:
    """
    π_q((V^{⊗p})_{Σ_p}) = 0 for q <= p - 1, for connected V

    Args:
        V: Connected simplicial vector space
        p: Power
        q_max: Highest degree in the table (defaults to N - 1)
        weights: Weights computed (defaults to all)

    Returns:
        Report with the full π table; nonzero groups below p are falsifications
    """
    q_max = V.max_degree - 1 if q_max is None else q_max
    _sound(V, q_max)
    report = CheckReport(f"dold-puppe p={p}")
    moore = moore_complex(sym_coinvariants(V, p))
    for w in (weights if weights is not None else V.weights()):
        for q in range(q_max + 1):
            dim = moore.homology_dim(q, w)
            report.measure('pi', dim, p=p, q=q, w=w)
            if dim and q <= p - 1:
                report.fail('coinvariants are (p-1)-connected', f"dim pi_{q} = {dim}", p=p, q=q, w=w)
    return report


def filtration_quotient(Y: SimplicialAlgebra, s: int, p: int) -> QuotientObject:
    """
    F_p / F_{p+1} for the filtration F_p = P^{max(p, s)} Y of P^s Y

    Rows p < s are quotients of P^s Y by itself. Shared per the pair of powers.
    """
    lo, hi = max(p, s), max(p + 1, s)
    cache = Y.__dict__.setdefault('_power_quotient', {})
    if (lo, hi) in cache:
        return cache[(lo, hi)]
    upper = power_object(Y, lo)

    def kernel(n, w):
        lower = Y.power_block(hi, n, w)
        block = upper.block(n, w)
        return Subspace.span(block.basis, [block.coordinates(row) for row in lower.rows], Y.field)

    cache[(lo, hi)] = QuotientObject(upper, kernel, f"P{lo}/P{hi}({Y.name})")
    return cache[(lo, hi)]


def power_quotient(Y: SimplicialAlgebra, p: int) -> QuotientObject:
    """P^p Y / P^{p+1} Y, shared per (Y, p)"""
    return filtration_quotient(Y, p, p)


def power_quotient_check(A: SimplicialAlgebra, p: int, q_max: int, weights=None,
                         cap: Optional[int] = None) -> CheckReport:
    """
    N_q(P^p(bA)/P^{p+1}(bA)) against N_q((QbA)^{⊗p}_{Σ_p}), blockwise

    Homotopy of both sides is recorded alongside the chain dimensions.
    """
    _sound(A, q_max)
    report = CheckReport(f"power quotient p={p}")
    bA = bar(A, cap)
    left = moore_complex(power_quotient(bA, p))
    right = moore_complex(sym_coinvariants(indecomposables(bA), p))
    for w in (weights if weights is not None else A.weights()):
        for q in range(q_max + 1):
            try:
                dim_left = left.chains(q, w).dim
                dim_right = right.chains(q, w).dim
                pi_left = left.homology_dim(q, w)
                pi_right = right.homology_dim(q, w)
            except ResourceCapError as exc:
                report.skipped.append(f"n={exc.n},w={exc.w},r={exc.r}")
                continue
            report.measure('N quotient', dim_left, p=p, q=q, w=w)
            report.measure('N coinvariants', dim_right, p=p, q=q, w=w)
            report.measure('pi quotient', pi_left, p=p, q=q, w=w)
            report.measure('pi coinvariants', pi_right, p=p, q=q, w=w)
            if dim_left != dim_right:
                report.fail('P^p/P^{p+1} matches coinvariants', f"{dim_left} != {dim_right}", p=p, q=q, w=w)
    return report


def e0_page(A: SimplicialAlgebra, s: int, p_max: int, q_max: int, weights=None,
            cap: Optional[int] = None) -> Tuple[Dict[Tuple[int, int, int], int], CheckReport]:
    """
    E⁰_{p,q} = N_q(F_p/F_{p+1}) for the filtration F_p = P^{max(p,s)}(bA) of P^s(bA)

    Args:
        A: Connected weight-graded simplicial algebra
        s: First filtration index
        p_max: Last row computed
        q_max: Highest degree (needs q_max + 1 <= N)
        weights: Weights computed (defaults to all)
        cap: Block cap for bA

    Returns:
        ({(p, q, w): dim}, report) where the report asserts the per-weight
        bound dim π_q(P^s(bA)) <= Σ_p dim E⁰_{p,q} and the vanishing of rows
        p < s and p > w
    """
    _sound(A, q_max)
    report = CheckReport(f"E0 page s={s}")
    bA = bar(A, cap)
    table: Dict[Tuple[int, int, int], int] = {}
    target = moore_complex(power_object(bA, s))
    for w in (weights if weights is not None else A.weights()):
        for q in range(q_max + 1):
            try:
                column = 0
                for p in range(1, p_max + 1):
                    dim = moore_complex(filtration_quotient(bA, s, p)).chains(q, w).dim
                    table[(p, q, w)] = dim
                    column += dim
                    report.measure('E0', dim, p=p, q=q, w=w)
                    if dim and p < s:
                        report.fail('rows below the start vanish', f"dim E0 = {dim}", p=p, q=q, w=w)
                    if dim and p > w:
                        report.fail('rows above the weight vanish', f"dim E0 = {dim}", p=p, q=q, w=w)
                pi = target.homology_dim(q, w)
            except ResourceCapError as exc:
                report.skipped.append(f"n={exc.n},w={exc.w},r={exc.r}")
                continue
            report.measure('pi', pi, q=q, w=w)
            if p_max >= w and pi > column:
                report.fail('E0 column bounds pi', f"{pi} > {column}", q=q, w=w)
    return table, report
