"""
Bundled simplicial algebras: Eilenberg-MacLane objects K(k, m), truncated
free algebras on them, a direct sum, and mutated objects for negative tests.

A label ``x.0011`` is the copy of the generator x indexed by the monotone
surjection [3] -> [1] with values 0, 0, 1, 1. Monomials of the free
algebras join their sorted factors with ``*``.
"""

import logging
from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from src.models.exactlin import Field
from src.models.freealg import Generator, enumerate_multisets
from src.models.simplicial import SimplicialAlgebra, TableSimplicialAlgebra, Truncation, direct_sum

logger = logging.getLogger(__name__)


def surjections(n: int, m: int) -> List[str]:
    """Monotone surjections [n] -> [m] as value strings"""
    values = set(range(m + 1))
    return [
        ''.join(str(v) for v in combo)
        for combo in combinations_with_replacement(range(m + 1), n + 1)
        if set(combo) == values
    ]


def _face(sigma: str, i: int, m: int) -> Optional[str]:
    image = sigma[:i] + sigma[i + 1:]
    return image if len(set(image)) == m + 1 else None


def _degeneracy(sigma: str, i: int) -> str:
    return sigma[:i + 1] + sigma[i:]


def _split(label: str) -> Tuple[str, str]:
    symbol, _, sigma = label.rpartition('.')
    return symbol, sigma


def _join(factors: Sequence[str]) -> str:
    return '*'.join(sorted(factors))


@dataclass(frozen=True)
class _Copies:
    """Labels of all generator copies per degree, with their weights and dimensions"""
    generators: Tuple[Generator, ...]

    def labels(self, n: int) -> Dict[str, int]:
        out = {}
        for g in self.generators:
            for sigma in surjections(n, g.degree):
                out[f"{g.symbol}.{sigma}"] = g.weight
        return out

    def degree_of(self, symbol: str) -> int:
        return next(g.degree for g in self.generators if g.symbol == symbol)

    def face(self, label: str, i: int) -> Optional[str]:
        symbol, sigma = _split(label)
        image = _face(sigma, i, self.degree_of(symbol))
        return None if image is None else f"{symbol}.{image}"

    def degeneracy(self, label: str, i: int) -> str:
        symbol, sigma = _split(label)
        return f"{symbol}.{_degeneracy(sigma, i)}"


def _tables(copies: _Copies, truncation: Truncation, field: Field, free: bool):
    one = field.one
    levels, faces, degeneracies, products = {}, {}, {}, {}
    for n in truncation.degrees():
        generators = copies.labels(n)
        if free:
            by_weight: Dict[int, List[str]] = {}
            for label, w in generators.items():
                by_weight.setdefault(w, []).append(label)
            monomials = {}
            for total in range(1, truncation.max_weight + 1):
                for factors in enumerate_multisets(by_weight, total):
                    monomials[factors] = total
        else:
            monomials = {(label,): w for label, w in generators.items()}
        levels[n] = {_join(m): w for m, w in monomials.items()}
        for factors in monomials:
            label = _join(factors)
            if n >= 1:
                for i in range(n + 1):
                    images = [copies.face(f, i) for f in factors]
                    faces.setdefault((i, n), {})[label] = {} if None in images else {_join(images): one}
            if n + 1 <= truncation.max_degree:
                for i in range(n + 1):
                    images = [copies.degeneracy(f, i) for f in factors]
                    degeneracies.setdefault((i, n), {})[label] = {_join(images): one}
        if free:
            table = products.setdefault(n, {})
            for a, wa in monomials.items():
                for b, wb in monomials.items():
                    if wa + wb <= truncation.max_weight:
                        table[(_join(a), _join(b))] = {_join(a + b): one}
    return levels, faces, degeneracies, products


def eilenberg_maclane(m: int, field: Field, truncation: Truncation, symbol: str = 'x') -> TableSimplicialAlgebra:
    """
    K(k, m) with zero multiplication, one weight-1 generator

    Args:
        m: Degree of the generator
        field: Ground field
        truncation: (N, W)
        symbol: Generator name

    Returns:
        The Dold-Kan object of k concentrated in degree m
    """
    copies = _Copies((Generator(symbol, m, 1),))
    levels, faces, degeneracies, products = _tables(copies, truncation, field, free=False)
    return TableSimplicialAlgebra(field, truncation, levels, faces, degeneracies, products, f"K{m}")


def free_algebra(generators: Sequence[Generator], field: Field, truncation: Truncation,
                 name: str = '') -> TableSimplicialAlgebra:
    """Free non-unital commutative algebra on K(k, m) copies, truncated by weight"""
    copies = _Copies(tuple(generators))
    levels, faces, degeneracies, products = _tables(copies, truncation, field, free=True)
    name = name or 'T(' + ','.join(f"{g.symbol}{g.degree}" for g in generators) + ')'
    return TableSimplicialAlgebra(field, truncation, levels, faces, degeneracies, products, name)


def mutated_face(field: Field, truncation: Truncation) -> TableSimplicialAlgebra:
    """K(k, 1) with d_0(x.011) = x.01 instead of 0"""
    if truncation.max_degree < 3:
        raise ValueError("the face mutation needs N >= 3 to be visible")
    X = eilenberg_maclane(1, field, truncation)
    faces = dict(X.faces)
    faces[(0, 2)] = dict(faces[(0, 2)])
    faces[(0, 2)]['x.011'] = {'x.01': field.one}
    return TableSimplicialAlgebra(field, truncation, X.levels, faces, X.degeneracies, X.products, 'K1-mutant-face')


def mutated_product(field: Field, truncation: Truncation) -> TableSimplicialAlgebra:
    """T(K(k, 1)) with the product x.001 * x.011 doubled in one order only"""
    X = free_algebra([Generator('x', 1, 1)], field, truncation)
    if truncation.max_degree < 2 or truncation.max_weight < 2:
        raise ValueError("the product mutation needs N >= 2 and W >= 2")
    products = {n: dict(table) for n, table in X.products.items()}
    products[2][('x.001', 'x.011')] = {'x.001*x.011': field(2)}
    return TableSimplicialAlgebra(field, truncation, X.levels, X.faces, X.degeneracies, products,
                                  'T(x1)-mutant-product')


@dataclass(frozen=True)
class Fixture:
    name: str
    description: str
    build: Callable[[Field, Truncation], SimplicialAlgebra]
    connected: bool = True
    negative: bool = False


FIXTURES: Dict[str, Fixture] = {
    fixture.name: fixture for fixture in [
        Fixture('K0', 'K(k,0), zero multiplication', lambda f, t: eilenberg_maclane(0, f, t), connected=False),
        Fixture('K1', 'K(k,1), zero multiplication', lambda f, t: eilenberg_maclane(1, f, t)),
        Fixture('K2', 'K(k,2), zero multiplication', lambda f, t: eilenberg_maclane(2, f, t)),
        Fixture('K3', 'K(k,3), zero multiplication', lambda f, t: eilenberg_maclane(3, f, t)),
        Fixture('free1', 'free algebra on x in degree 1, weight 1',
                lambda f, t: free_algebra([Generator('x', 1, 1)], f, t, 'free1')),
        Fixture('free2', 'free algebra on x (degree 1, weight 1) and y (degree 2, weight 2)',
                lambda f, t: free_algebra([Generator('x', 1, 1), Generator('y', 2, 2)], f, t, 'free2')),
        Fixture('sum12', 'K(k,1) + K(k,2)',
                lambda f, t: direct_sum(eilenberg_maclane(1, f, t, 'x'), eilenberg_maclane(2, f, t, 'y'),
                                        name='sum12')),
        Fixture('mutant-face', 'K(k,1) with one face entry changed', mutated_face, negative=True),
        Fixture('mutant-product', 'free1 with a non-commutative product entry', mutated_product, negative=True),
    ]
}

DEFAULT_FIXTURES = ('K1', 'free1')


def get_fixture(name: str, field: Field, truncation: Truncation) -> SimplicialAlgebra:
    """
    Build a bundled fixture

    Args:
        name: Registry name
        field: Ground field
        truncation: (N, W)

    Returns:
        The fixture object
    """
    try:
        fixture = FIXTURES[name]
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(FIXTURES)}")
    logger.debug("building fixture %s over %s at %s", name, field.tag, truncation)
    return fixture.build(field, truncation)
