"""
Exact scalars and sparse linear algebra over labeled bases.

Every vector is a plain dict mapping basis labels to field elements with no
stored zeros. Elimination is delegated to sympy's DomainMatrix over QQ or
GF(p), so arithmetic is exact and pivots are taken in column order.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, Hashable, Iterable, Iterator, List, Mapping, Optional, Sequence

from sympy import GF, QQ, Rational, isprime
from sympy.polys.matrices import DomainMatrix

from src.models.errors import ContainmentError, LabelMismatchError, NonComplexError

logger = logging.getLogger(__name__)

Label = Hashable
Scalar = Any
Vector = Dict[Label, Scalar]


@lru_cache(maxsize=None)
def _domain_for(characteristic: int):
    return QQ if characteristic == 0 else GF(characteristic)


@dataclass(frozen=True)
class Field:
    """Ground field: the rationals (characteristic 0) or a prime field F_p"""
    characteristic: int = 0

    def __post_init__(self):
        if self.characteristic != 0 and not isprime(self.characteristic):
            raise ValueError(f"field characteristic {self.characteristic} is not prime")

    @classmethod
    def parse(cls, text: str) -> 'Field':
        """
        Parse a field name of the form ``q`` or ``fp:<p>``

        Args:
            text: Field name as given on the command line or in an input file

        Returns:
            The corresponding Field
        """
        name = text.strip().lower()
        if name in ('q', 'qq', 'rational'):
            return cls(0)
        if name.startswith('fp:'):
            try:
                p = int(name[3:])
            except ValueError:
                raise ValueError(f"bad prime in field name {text!r}")
            return cls(p)
        raise ValueError(f"unknown field {text!r} (expected q or fp:<p>)")

    @property
    def domain(self):
        return _domain_for(self.characteristic)

    @property
    def tag(self) -> str:
        return 'q' if self.characteristic == 0 else f'fp:{self.characteristic}'

    @property
    def zero(self) -> Scalar:
        return self.domain.zero

    @property
    def one(self) -> Scalar:
        return self.domain.one

    def __call__(self, value) -> Scalar:
        """Convert an int, Fraction, rational string or field element into the field"""
        domain = self.domain
        if isinstance(value, bool):
            value = int(value)
        if isinstance(value, int):
            return domain(value)
        if isinstance(value, Fraction):
            return domain(value.numerator) / domain(value.denominator)
        if isinstance(value, str):
            r = Rational(value.strip())
            if self.characteristic and r.q % self.characteristic == 0:
                raise ValueError(f"{value} has no image in F_{self.characteristic}")
            return domain(int(r.p)) / domain(int(r.q))
        if domain.of_type(value):
            return value
        raise TypeError(f"cannot convert {value!r} into {self.tag}")

    def render(self, x: Scalar) -> str:
        """Normalized text form: lowest-terms rational or residue in [0, p)"""
        value = self.domain.to_sympy(x)
        if self.characteristic:
            return str(int(value) % self.characteristic)
        return str(value)


class LabeledBasis:
    """Ordered sequence of distinct labels"""

    __slots__ = ('labels', '_index')

    def __init__(self, labels: Iterable[Label] = ()):
        self.labels = tuple(labels)
        self._index = {label: i for i, label in enumerate(self.labels)}
        if len(self._index) != len(self.labels):
            raise LabelMismatchError("basis labels must be distinct")

    def index(self, label: Label) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise LabelMismatchError(f"label {label!r} not in basis")

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self) -> Iterator[Label]:
        return iter(self.labels)

    def __contains__(self, label) -> bool:
        return label in self._index

    def __eq__(self, other) -> bool:
        return isinstance(other, LabeledBasis) and self.labels == other.labels

    def __hash__(self) -> int:
        return hash(self.labels)

    def __repr__(self) -> str:
        return f"LabeledBasis({len(self.labels)} labels)"


# Sparse vector helpers

def add_scaled(acc: Vector, vec: Mapping[Label, Scalar], coeff: Scalar) -> Vector:
    """In place: acc += coeff * vec, dropping zeros"""
    if not coeff:
        return acc
    for label, value in vec.items():
        total = acc.get(label)
        total = value * coeff if total is None else total + value * coeff
        if total:
            acc[label] = total
        else:
            acc.pop(label, None)
    return acc


def linear_combination(terms: Iterable) -> Vector:
    """Sum of coeff * vec over (coeff, vec) pairs"""
    acc: Vector = {}
    for coeff, vec in terms:
        add_scaled(acc, vec, coeff)
    return acc


def _to_rows(vectors: Sequence[Mapping[Label, Scalar]], ambient: LabeledBasis) -> List[Dict[int, Scalar]]:
    rows = []
    for vec in vectors:
        rows.append({ambient.index(label): value for label, value in vec.items() if value})
    return rows


def _from_row(row: Mapping[int, Scalar], ambient: LabeledBasis) -> Vector:
    labels = ambient.labels
    return {labels[j]: row[j] for j in sorted(row)}


def _domain_matrix(rows: Sequence[Mapping[int, Scalar]], ncols: int, field: Field) -> DomainMatrix:
    elems = {i: dict(row) for i, row in enumerate(rows) if row}
    return DomainMatrix(elems, (len(rows), ncols), field.domain)


def _rref(rows: Sequence[Mapping[int, Scalar]], ncols: int, field: Field) -> List[Dict[int, Scalar]]:
    """Nonzero rows of the reduced row echelon form, ordered by pivot column"""
    if not any(rows):
        return []
    reduced, _ = _domain_matrix(rows, ncols, field).rref()
    sdm = reduced.to_sparse().rep
    out = [dict(sdm[i]) for i in sdm if sdm[i]]
    out.sort(key=min)
    return out


def _null_rows(rref_rows: Sequence[Mapping[int, Scalar]], ncols: int, field: Field) -> List[Dict[int, Scalar]]:
    """Null space of a matrix given in RREF, one vector per free column"""
    pivots = {min(row): row for row in rref_rows}
    one = field.one
    out = []
    for j in range(ncols):
        if j in pivots:
            continue
        vec = {j: one}
        for p, row in pivots.items():
            value = row.get(j)
            if value:
                vec[p] = -value
        out.append(vec)
    return out


def echelonize(vectors: Sequence[Mapping[Label, Scalar]], ambient: LabeledBasis, field: Field) -> List[Vector]:
    """
    Reduced row echelon basis of the span of vectors

    Args:
        vectors: Sparse vectors over ambient
        ambient: The labeled basis they live in
        field: Ground field

    Returns:
        RREF rows as sparse vectors, ordered by pivot label
    """
    rows = _rref(_to_rows(vectors, ambient), len(ambient), field)
    return [_from_row(row, ambient) for row in rows]


class Subspace:
    """Echelonized subspace of the span of a labeled basis.

    Rows are in reduced row echelon form: each row has coefficient 1 at its
    pivot label and every other row vanishes there. The sub-basis labels are
    the pivot labels.
    """

    def __init__(self, ambient: LabeledBasis, rows: Sequence[Vector], field: Field, unit: bool = False):
        self.ambient = ambient
        self.field = field
        self.rows = tuple(rows)
        self.pivots = tuple(min(row, key=ambient.index) for row in self.rows)
        self._row_at = dict(zip(self.pivots, self.rows))
        self._unit = unit

    @classmethod
    def span(cls, ambient: LabeledBasis, vectors: Sequence[Mapping[Label, Scalar]], field: Field) -> 'Subspace':
        return cls(ambient, echelonize(vectors, ambient, field), field)

    @classmethod
    def from_labels(cls, ambient: LabeledBasis, labels: Iterable[Label], field: Field) -> 'Subspace':
        """Coordinate subspace spanned by a subset of the ambient labels"""
        chosen = set(labels)
        for label in chosen:
            ambient.index(label)
        one = field.one
        rows = [{label: one} for label in ambient.labels if label in chosen]
        return cls(ambient, rows, field, unit=True)

    @classmethod
    def whole(cls, ambient: LabeledBasis, field: Field) -> 'Subspace':
        return cls.from_labels(ambient, ambient.labels, field)

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def is_coordinate(self) -> bool:
        return self._unit

    @property
    def basis(self) -> LabeledBasis:
        return LabeledBasis(self.pivots)

    def reduce(self, vec: Mapping[Label, Scalar]) -> Vector:
        """Residual of vec after clearing every pivot position"""
        residual = dict(vec)
        if self._unit:
            for label in vec:
                if label in self._row_at:
                    del residual[label]
            return residual
        for pivot, row in self._row_at.items():
            coeff = residual.get(pivot)
            if coeff:
                add_scaled(residual, row, -coeff)
        return residual

    def contains(self, vec: Mapping[Label, Scalar]) -> bool:
        if self._unit:
            return all(label in self._row_at for label in vec)
        return not self.reduce(vec)

    def coordinates(self, vec: Mapping[Label, Scalar]) -> Vector:
        """Coefficients of vec in the row basis, keyed by pivot label"""
        coords = {pivot: vec[pivot] for pivot in self.pivots if vec.get(pivot)}
        if self._unit:
            if len(coords) != len(vec):
                witness = next(label for label in vec if label not in self._row_at)
                raise ContainmentError(f"{witness!r} lies outside the subspace", witness)
            return coords
        residual = self.reduce(vec)
        if residual:
            witness = min(residual, key=self.ambient.index)
            raise ContainmentError(f"vector escapes the subspace at {witness!r}", witness)
        return coords

    def vector(self, coords: Mapping[Label, Scalar]) -> Vector:
        """Ambient vector with the given row-basis coordinates"""
        return linear_combination((c, self._row_at[p]) for p, c in coords.items())

    def is_subspace_of(self, other: 'Subspace') -> bool:
        return all(other.contains(row) for row in self.rows)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Subspace) and self.ambient == other.ambient
                and self.rows == other.rows)

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim} of {len(self.ambient)})"


class LinearMap:
    """Sparse matrix between labeled finite bases, stored by columns"""

    def __init__(self, domain: LabeledBasis, codomain: LabeledBasis,
                 columns: Mapping[Label, Mapping[Label, Scalar]], field: Field):
        self.domain = domain
        self.codomain = codomain
        self.field = field
        cols: Dict[Label, Vector] = {}
        for label, col in columns.items():
            if label not in domain:
                raise LabelMismatchError(f"column {label!r} is not a domain label")
            entries = {}
            for target, value in col.items():
                if not value:
                    continue
                if target not in codomain:
                    raise LabelMismatchError(f"entry {target!r} of column {label!r} is not a codomain label")
                entries[target] = value
            if entries:
                cols[label] = entries
        self._columns = cols
        self._rank: Optional[int] = None

    @classmethod
    def identity(cls, basis: LabeledBasis, field: Field) -> 'LinearMap':
        one = field.one
        return cls(basis, basis, {label: {label: one} for label in basis}, field)

    @classmethod
    def zero(cls, domain: LabeledBasis, codomain: LabeledBasis, field: Field) -> 'LinearMap':
        return cls(domain, codomain, {}, field)

    @property
    def columns(self) -> Dict[Label, Vector]:
        return self._columns

    def column(self, label: Label) -> Vector:
        if label not in self.domain:
            raise LabelMismatchError(f"{label!r} is not a domain label")
        return self._columns.get(label, {})

    def apply(self, vec: Mapping[Label, Scalar]) -> Vector:
        return linear_combination((c, self.column(label)) for label, c in vec.items())

    def compose(self, other: 'LinearMap') -> 'LinearMap':
        """self ∘ other"""
        if other.codomain != self.domain:
            raise LabelMismatchError("codomain of the inner map differs from domain of the outer map")
        cols = {label: self.apply(col) for label, col in other.columns.items()}
        return LinearMap(other.domain, self.codomain, cols, self.field)

    __matmul__ = compose

    def __add__(self, other: 'LinearMap') -> 'LinearMap':
        if self.domain != other.domain or self.codomain != other.codomain:
            raise LabelMismatchError("cannot add maps between different bases")
        cols = {label: dict(col) for label, col in self._columns.items()}
        for label, col in other.columns.items():
            add_scaled(cols.setdefault(label, {}), col, self.field.one)
        return LinearMap(self.domain, self.codomain, cols, self.field)

    def __neg__(self) -> 'LinearMap':
        cols = {label: {t: -v for t, v in col.items()} for label, col in self._columns.items()}
        return LinearMap(self.domain, self.codomain, cols, self.field)

    def __sub__(self, other: 'LinearMap') -> 'LinearMap':
        return self + (-other)

    def is_zero(self) -> bool:
        return not self._columns

    def first_difference(self, other: 'LinearMap') -> Optional[Label]:
        """First domain label on which the two maps differ, or None"""
        if self.domain != other.domain or self.codomain != other.codomain:
            raise LabelMismatchError("maps have different bases")
        for label in self.domain:
            if self._columns.get(label, {}) != other.columns.get(label, {}):
                return label
        return None

    def __eq__(self, other) -> bool:
        return (isinstance(other, LinearMap) and self.domain == other.domain
                and self.codomain == other.codomain and self._columns == other.columns)

    def _matrix_rows(self) -> List[Dict[int, Scalar]]:
        rows: List[Dict[int, Scalar]] = [dict() for _ in range(len(self.codomain))]
        for label, col in self._columns.items():
            j = self.domain.index(label)
            for target, value in col.items():
                rows[self.codomain.index(target)][j] = value
        return rows

    def to_domain_matrix(self) -> DomainMatrix:
        """Rows indexed by codomain, columns by domain"""
        return _domain_matrix(self._matrix_rows(), len(self.domain), self.field)

    def rank(self) -> int:
        if self._rank is None:
            if not self._columns:
                self._rank = 0
            else:
                self._rank = int(self.to_domain_matrix().rank())
            logger.debug("rank %d for %dx%d block", self._rank, len(self.codomain), len(self.domain))
        return self._rank

    def kernel_basis(self) -> List[Vector]:
        """Echelonized spanning set of the kernel"""
        if not self._columns:
            one = self.field.one
            return [{label: one} for label in self.domain]
        reduced = _rref(self._matrix_rows(), len(self.domain), self.field)
        self._rank = len(reduced)
        null = _null_rows(reduced, len(self.domain), self.field)
        rows = _rref(null, len(self.domain), self.field)
        return [_from_row(row, self.domain) for row in rows]

    def kernel(self) -> Subspace:
        return Subspace(self.domain, self.kernel_basis(), self.field)

    def image_basis(self) -> List[Vector]:
        return echelonize(list(self._columns.values()), self.codomain, self.field)

    def image(self) -> Subspace:
        return Subspace(self.codomain, self.image_basis(), self.field)

    def is_surjective(self) -> bool:
        return self.rank() == len(self.codomain)

    def __repr__(self) -> str:
        return f"LinearMap({len(self.domain)} -> {len(self.codomain)})"


# Module-level operations

def rank(f: LinearMap) -> int:
    return f.rank()


def kernel_basis(f: LinearMap) -> List[Vector]:
    return f.kernel_basis()


def compose(f: LinearMap, g: LinearMap) -> LinearMap:
    """f ∘ g, defined iff codomain(g) = domain(f)"""
    return f.compose(g)


def stack(maps: Sequence[LinearMap]) -> LinearMap:
    """Maps sharing a domain, combined into one with codomain labels (k, label)"""
    if not maps:
        raise ValueError("nothing to stack")
    domain = maps[0].domain
    codomain = LabeledBasis((k, label) for k, f in enumerate(maps) for label in f.codomain)
    cols: Dict[Label, Vector] = {}
    for k, f in enumerate(maps):
        if f.domain != domain:
            raise LabelMismatchError("stacked maps must share a domain")
        for label, col in f.columns.items():
            target = cols.setdefault(label, {})
            for t, v in col.items():
                target[(k, t)] = v
    return LinearMap(domain, codomain, cols, maps[0].field)


def _annihilator_rows(subspace: Subspace) -> List[Dict[int, Scalar]]:
    ambient = subspace.ambient
    rows = _to_rows(subspace.rows, ambient)
    return _null_rows(rows, len(ambient), subspace.field)


def intersect(subspaces: Sequence[Subspace], ambient: Optional[LabeledBasis] = None,
              field: Optional[Field] = None) -> Subspace:
    """
    Intersection of subspaces of one labeled basis

    Args:
        subspaces: Subspaces sharing an ambient basis
        ambient: Required when subspaces is empty; the result is then the whole space
        field: Required together with ambient when subspaces is empty

    Returns:
        Echelonized intersection
    """
    if not subspaces:
        if ambient is None or field is None:
            raise ValueError("empty intersection needs an ambient basis and field")
        return Subspace.whole(ambient, field)
    ambient = subspaces[0].ambient
    field = subspaces[0].field
    for sub in subspaces[1:]:
        if sub.ambient != ambient:
            raise LabelMismatchError("subspaces live in different ambient bases")
    if all(sub.is_coordinate for sub in subspaces):
        common = set(subspaces[0].pivots)
        for sub in subspaces[1:]:
            common &= set(sub.pivots)
        return Subspace.from_labels(ambient, common, field)
    if len(subspaces) == 1:
        return Subspace.span(ambient, subspaces[0].rows, field)
    constraints: List[Dict[int, Scalar]] = []
    for sub in subspaces:
        constraints.extend(_annihilator_rows(sub))
    reduced = _rref(constraints, len(ambient), field)
    null = _null_rows(reduced, len(ambient), field)
    rows = _rref(null, len(ambient), field)
    return Subspace(ambient, [_from_row(row, ambient) for row in rows], field)


def homology_dims(d_in: LinearMap, d_out: LinearMap) -> int:
    """
    Dimension of ker(d_out) / im(d_in)

    Args:
        d_in: Incoming differential
        d_out: Outgoing differential, with d_out ∘ d_in = 0

    Returns:
        dim ker(d_out) - rank(d_in)
    """
    if d_in.codomain != d_out.domain:
        raise LabelMismatchError("differentials do not meet at a common basis")
    composite = d_out.compose(d_in)
    if not composite.is_zero():
        witness = next(iter(composite.columns))
        raise NonComplexError(f"composite of differentials is nonzero on {witness!r}")
    return len(d_out.domain) - d_out.rank() - d_in.rank()
