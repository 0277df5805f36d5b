"""
Line-oriented text format for truncated simplicial algebras.

    # comment
    field q                      (or fp:<p>)
    truncation <N> <W>
    basis <n> <label> [<weight>]
    face <i> <n> <label> -> <combo>
    degeneracy <i> <n> <label> -> <combo>
    product <n> <a> <b> -> <combo>

A combo is ``0`` or terms joined by `` + ``; a term is ``label`` or
``coef*label`` with an integer or ``p/q`` coefficient. Labels may contain
``*`` (monomials), never whitespace. Omitted face and degeneracy entries
are zero, as are omitted products; a product line covers both orders.
Either every basis line carries a weight or none does.
"""

import logging
import re
from dataclasses import dataclass, field as dc_field
from typing import Dict, List, Optional, Tuple

from src.models.errors import EngineError, SchemaError
from src.models.exactlin import Field, Vector, add_scaled
from src.models.simplicial import SimplicialAlgebra, SimplicialVectorSpace, TableSimplicialAlgebra, Truncation, label_text

logger = logging.getLogger(__name__)

_WORD = re.compile(r"\S+")
_TERM = re.compile(r"^(-?\d+(?:/\d+)?)\*(.+)$")


@dataclass
class _Token:
    text: str
    column: int


@dataclass
class _Draft:
    """Tables accumulated while reading, before the basis is final"""
    field: Optional[Field] = None
    truncation: Optional[Truncation] = None
    levels: Dict[int, Dict[str, int]] = dc_field(default_factory=dict)
    weighted: Optional[bool] = None
    entries: List[Tuple[str, List[_Token], int]] = dc_field(default_factory=list)


def _tokens(line: str) -> List[_Token]:
    return [_Token(m.group(), m.start() + 1) for m in _WORD.finditer(line)]


def _int(token: _Token, line: int, what: str) -> int:
    try:
        return int(token.text)
    except ValueError:
        raise SchemaError(f"{what} must be an integer, got {token.text!r}", line, token.column)


def _arity(tokens: List[_Token], count: int, line: int, usage: str):
    if len(tokens) < count:
        end = tokens[-1].column + len(tokens[-1].text) if tokens else 1
        raise SchemaError(f"expected: {usage}", line, end)


def _split_arrow(tokens: List[_Token], line: int, head: int, usage: str) -> List[_Token]:
    _arity(tokens, head + 1, line, usage)
    if tokens[head].text != '->':
        raise SchemaError(f"expected '->' (usage: {usage})", line, tokens[head].column)
    combo = tokens[head + 1:]
    if not combo:
        raise SchemaError("missing right-hand side after '->'", line, tokens[head].column + 2)
    return combo


def _read_header(draft: _Draft, tokens: List[_Token], line: int):
    keyword = tokens[0].text
    if keyword == 'field':
        _arity(tokens, 2, line, 'field q|fp:<p>')
        try:
            draft.field = Field.parse(tokens[1].text)
        except ValueError as exc:
            raise SchemaError(str(exc), line, tokens[1].column)
    else:
        _arity(tokens, 3, line, 'truncation <N> <W>')
        N, W = _int(tokens[1], line, 'N'), _int(tokens[2], line, 'W')
        try:
            draft.truncation = Truncation(N, W)
        except EngineError as exc:
            raise SchemaError(str(exc), line, tokens[1].column)


def _read_basis(draft: _Draft, tokens: List[_Token], line: int):
    _arity(tokens, 3, line, 'basis <n> <label> [<weight>]')
    if len(tokens) > 4:
        raise SchemaError("unexpected text after basis entry", line, tokens[4].column)
    n = _int(tokens[1], line, 'degree')
    if n < 0:
        raise SchemaError("degree must be >= 0", line, tokens[1].column)
    label = tokens[2].text
    weighted = len(tokens) == 4
    if draft.weighted is None:
        draft.weighted = weighted
    elif draft.weighted != weighted:
        column = tokens[3].column if weighted else tokens[2].column + len(label)
        raise SchemaError("mixing weighted and unweighted basis lines", line, column)
    weight = _int(tokens[3], line, 'weight') if weighted else 0
    if weighted and weight < 1:
        raise SchemaError("weight must be >= 1", line, tokens[3].column)
    level = draft.levels.setdefault(n, {})
    if label in level:
        raise SchemaError(f"duplicate basis label {label!r} in degree {n}", line, tokens[2].column)
    level[label] = weight


def _parse_combo(tokens: List[_Token], field: Field, line: int) -> List[Tuple[_Token, object]]:
    """Terms of a right-hand side as (label token, coefficient)"""
    if len(tokens) == 1 and tokens[0].text == '0':
        return []
    terms = []
    expect_term = True
    for token in tokens:
        if not expect_term:
            if token.text != '+':
                raise SchemaError(f"expected '+', got {token.text!r}", line, token.column)
            expect_term = True
            continue
        if token.text == '+':
            raise SchemaError("missing term before '+'", line, token.column)
        match = _TERM.match(token.text)
        if match:
            try:
                coefficient = field(match.group(1))
            except ValueError as exc:
                raise SchemaError(str(exc), line, token.column)
            label = _Token(match.group(2), token.column + len(match.group(1)) + 1)
        else:
            coefficient, label = field.one, token
        terms.append((label, coefficient))
        expect_term = False
    if expect_term:
        raise SchemaError("combo ends with '+'", line, tokens[-1].column)
    return terms


def _require_label(draft: _Draft, n: int, token: _Token, line: int) -> int:
    level = draft.levels.get(n, {})
    if token.text not in level:
        raise SchemaError(f"unknown label {token.text!r} in degree {n}", line, token.column)
    return level[token.text]


def _resolve(draft: _Draft, n: int, combo: List[_Token], weight: Optional[int], line: int) -> Vector:
    vec: Vector = {}
    for token, coefficient in _parse_combo(combo, draft.field, line):
        w = _require_label(draft, n, token, line)
        if weight is not None and w != weight:
            raise SchemaError(f"{token.text!r} has weight {w}, expected {weight}", line, token.column)
        add_scaled(vec, {token.text: draft.field.one}, coefficient)
    return vec


def parse_schema(text: str, field: Optional[Field] = None,
                 truncation: Optional[Truncation] = None, name: str = 'input') -> TableSimplicialAlgebra:
    """
    Read a simplicial algebra from schema text

    Args:
        text: Schema source
        field: Field used when the text has no ``field`` line
        truncation: Truncation used when the text has no ``truncation`` line
        name: Name for the resulting object

    Returns:
        The table algebra described by the text

    Raises:
        SchemaError: With the 1-based line and column of the first problem
    """
    draft = _Draft(field=field, truncation=truncation)
    for number, raw in enumerate(text.splitlines(), start=1):
        tokens = _tokens(raw.split('#', 1)[0])
        if not tokens:
            continue
        keyword = tokens[0].text
        if keyword in ('field', 'truncation'):
            _read_header(draft, tokens, number)
        elif keyword == 'basis':
            _read_basis(draft, tokens, number)
        elif keyword in ('face', 'degeneracy', 'product'):
            draft.entries.append((keyword, tokens, number))
        else:
            raise SchemaError(f"unknown keyword {keyword!r}", number, tokens[0].column)

    if draft.field is None:
        raise SchemaError("no field given", 1, 1)
    if draft.truncation is None:
        raise SchemaError("no truncation given", 1, 1)
    N = draft.truncation.max_degree
    for n in draft.levels:
        if n > N:
            raise SchemaError(f"basis in degree {n} exceeds N={N}", 1, 1)

    faces: Dict[Tuple[int, int], Dict[str, Vector]] = {}
    degeneracies: Dict[Tuple[int, int], Dict[str, Vector]] = {}
    products: Dict[int, Dict[Tuple[str, str], Vector]] = {}
    weighted = bool(draft.weighted)
    for keyword, tokens, number in draft.entries:
        if keyword == 'product':
            combo = _split_arrow(tokens, number, 4, 'product <n> <a> <b> -> <combo>')
            n = _int(tokens[1], number, 'degree')
            wa = _require_label(draft, n, tokens[2], number)
            wb = _require_label(draft, n, tokens[3], number)
            target = wa + wb if weighted else None
            if weighted and target > draft.truncation.max_weight:
                raise SchemaError(f"product weight {target} exceeds W", number, tokens[2].column)
            key = (tokens[2].text, tokens[3].text)
            table = products.setdefault(n, {})
            if key in table or key[::-1] in table:
                raise SchemaError("product given twice", number, tokens[2].column)
            table[key] = _resolve(draft, n, combo, target, number)
            continue
        usage = f"{keyword} <i> <n> <label> -> <combo>"
        combo = _split_arrow(tokens, number, 4, usage)
        i, n = _int(tokens[1], number, 'index'), _int(tokens[2], number, 'degree')
        if keyword == 'face':
            if n < 1 or not 0 <= i <= n:
                raise SchemaError(f"no face d_{i} in degree {n}", number, tokens[1].column)
            m, table = n - 1, faces.setdefault((i, n), {})
        else:
            if not 0 <= i <= n or n + 1 > N:
                raise SchemaError(f"no degeneracy s_{i} in degree {n} with N={N}", number, tokens[1].column)
            m, table = n + 1, degeneracies.setdefault((i, n), {})
        w = _require_label(draft, n, tokens[3], number)
        if tokens[3].text in table:
            raise SchemaError(f"{keyword} of {tokens[3].text!r} given twice", number, tokens[3].column)
        table[tokens[3].text] = _resolve(draft, m, combo, w if weighted else None, number)

    levels = {n: draft.levels.get(n, {}) for n in draft.truncation.degrees()}
    logger.debug("parsed schema %s: %s", name, {n: len(level) for n, level in levels.items()})
    return TableSimplicialAlgebra(draft.field, draft.truncation, levels, faces, degeneracies,
                                  products, name, graded=weighted)


def _combo_text(vec: Vector, field: Field) -> str:
    if not vec:
        return '0'
    pieces = []
    for label in sorted(vec, key=label_text):
        c = field.render(vec[label])
        pieces.append(label_text(label) if c == '1' else f"{c}*{label_text(label)}")
    return ' + '.join(pieces)


def export_schema(X: SimplicialVectorSpace) -> str:
    """
    Render any object in schema text; bar objects export their tree labels as text

    Args:
        X: Simplicial vector space or algebra, every block realizable

    Returns:
        Schema text whose parse has the same blocks, faces, degeneracies and products
    """
    field = X.field
    N = X.max_degree
    lines = [f"# {X.name}", f"field {field.tag}", f"truncation {N} {X.max_weight}"]
    blocks = {(n, w): X.basis(n, w) for n in range(N + 1) for w in X.weights()}
    for n in range(N + 1):
        for w in X.weights():
            for label in blocks[(n, w)]:
                suffix = f" {w}" if X.graded else ''
                lines.append(f"basis {n} {label_text(label)}{suffix}")
    for n in range(1, N + 1):
        for i in range(n + 1):
            for w in X.weights():
                face = X.face(i, n, w)
                for label in blocks[(n, w)]:
                    column = face.column(label)
                    if column:
                        lines.append(f"face {i} {n} {label_text(label)} -> {_combo_text(column, field)}")
    for n in range(N):
        for i in range(n + 1):
            for w in X.weights():
                degeneracy = X.degeneracy(i, n, w)
                for label in blocks[(n, w)]:
                    lines.append(f"degeneracy {i} {n} {label_text(label)} -> "
                                 f"{_combo_text(degeneracy.column(label), field)}")
    if isinstance(X, SimplicialAlgebra):
        for n in range(N + 1):
            labels = [(label, w) for w in X.weights() for label in blocks[(n, w)]]
            for a_index, (a, wa) in enumerate(labels):
                for b, wb in labels[a_index:]:
                    if X.graded and wa + wb > X.max_weight:
                        continue
                    vec = X.product(n, (a, b))
                    if vec:
                        lines.append(f"product {n} {label_text(a)} {label_text(b)} -> {_combo_text(vec, field)}")
    return '\n'.join(lines) + '\n'
