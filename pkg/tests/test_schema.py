import pytest

from src.models.errors import SchemaError
from src.models.exactlin import Field
from src.models.simplicial import Truncation, homotopy_groups, validate
from src.services.bar import bar
from src.services.fixtures import get_fixture
from src.services.schema import export_schema, parse_schema

K1_TEXT = """\
# K(k,1) by hand
field q
truncation 2 1
basis 1 x.01 1
basis 2 x.001 1
basis 2 x.011 1
face 0 2 x.001 -> x.01
face 1 2 x.001 -> x.01
face 1 2 x.011 -> x.01
face 2 2 x.011 -> x.01
degeneracy 0 1 x.01 -> x.001
degeneracy 1 1 x.01 -> x.011
"""

COEFFICIENTS = """\
field q
truncation 1 1
basis 0 b 1
basis 0 c 1
basis 1 a 1
face 0 1 a -> 2*b + -1/3*c
face 1 1 a -> 0
"""


def schema_error(text, **kwargs):
    with pytest.raises(SchemaError) as info:
        parse_schema(text, **kwargs)
    return info.value


class TestParse:
    def test_hand_written_object(self):
        X = parse_schema(K1_TEXT)
        assert validate(X).violations == []
        assert X.dim(2, 1) == 2
        assert homotopy_groups(X, 1) == {(0, 1): 0, (1, 1): 1}

    def test_matches_bundled_fixture(self, qq):
        X = parse_schema(K1_TEXT)
        fixture = get_fixture('K1', qq, Truncation(2, 1))
        assert export_schema(X).splitlines()[1:] == export_schema(fixture).splitlines()[1:]

    def test_coefficients(self, qq):
        X = parse_schema(COEFFICIENTS)
        assert X.face(0, 1, 1).column('a') == {'b': qq(2), 'c': qq('-1/3')}
        assert X.face(1, 1, 1).column('a') == {}
        assert 'face 0 1 a -> 2*b + -1/3*c' in export_schema(X)

    def test_file_header_overrides_arguments(self):
        X = parse_schema("field fp:3\ntruncation 1 1\n", field=Field(0), truncation=Truncation(3, 3))
        assert X.field.characteristic == 3
        assert (X.max_degree, X.max_weight) == (1, 1)

    def test_arguments_fill_missing_header(self):
        X = parse_schema("basis 1 a 1\n", field=Field(2), truncation=Truncation(1, 1))
        assert X.field.characteristic == 2
        assert X.graded

    def test_unweighted_schema_is_ungraded(self):
        X = parse_schema("field q\ntruncation 1 1\nbasis 1 a\n")
        assert not X.graded

    def test_comments_and_blank_lines(self):
        X = parse_schema("# header\n\nfield q  # rationals\ntruncation 1 1\n")
        assert X.field.characteristic == 0


class TestExport:
    @pytest.mark.parametrize('name', ['K2', 'free1', 'sum12'])
    def test_export_parses_back(self, field, name):
        X = get_fixture(name, field, Truncation(2, 2))
        text = export_schema(X)
        Y = parse_schema(text, name=X.name)
        assert export_schema(Y) == text
        assert homotopy_groups(Y, 1) == homotopy_groups(X, 1)

    def test_bar_objects_export(self, qq):
        B = bar(get_fixture('K1', qq, Truncation(2, 2)))
        text = export_schema(B)
        assert text.startswith(f"# {B.name}\n")
        assert validate(parse_schema(text)).violations == []

    def test_products_stay_within_weight(self, qq):
        text = export_schema(get_fixture('free1', qq, Truncation(2, 2)))
        assert 'product 1 x.01 x.01 -> x.01*x.01' in text
        assert 'x.01 x.01*x.01' not in text


class TestErrors:
    def test_missing_truncation(self):
        err = schema_error("field q\n")
        assert (err.line, err.column) == (1, 1)
        assert 'truncation' in str(err)

    def test_missing_field(self):
        err = schema_error("truncation 1 1\n")
        assert 'field' in str(err)

    def test_unknown_keyword(self):
        err = schema_error("field q\ntruncation 1 1\n  cell 1 a\n")
        assert (err.line, err.column) == (3, 3)

    def test_unknown_label(self):
        err = schema_error("field q\ntruncation 1 1\nbasis 1 a 1\nface 0 1 b -> 0\n")
        assert (err.line, err.column) == (4, 10)

    def test_unknown_label_in_combo(self):
        err = schema_error("field q\ntruncation 1 1\nbasis 1 a 1\nface 0 1 a -> 3*z\n")
        assert (err.line, err.column) == (4, 17)

    def test_mixed_weights(self):
        err = schema_error("field q\ntruncation 1 1\nbasis 1 a 1\nbasis 1 b\n")
        assert err.line == 4

    def test_duplicate_label(self):
        err = schema_error("field q\ntruncation 1 1\nbasis 1 a 1\nbasis 1 a 1\n")
        assert (err.line, err.column) == (4, 9)

    def test_bad_face_index(self):
        err = schema_error("field q\ntruncation 1 1\nbasis 1 a 1\nface 2 1 a -> 0\n")
        assert (err.line, err.column) == (4, 6)

    def test_degree_above_truncation(self):
        err = schema_error("field q\ntruncation 1 1\nbasis 2 a 1\n")
        assert 'exceeds' in str(err)

    def test_weight_mismatch(self):
        text = "field q\ntruncation 1 2\nbasis 0 b 2\nbasis 1 a 1\nface 0 1 a -> b\n"
        err = schema_error(text)
        assert err.line == 5

    def test_product_over_weight_limit(self):
        text = "field q\ntruncation 0 1\nbasis 0 a 1\nproduct 0 a a -> 0\n"
        assert 'exceeds W' in str(schema_error(text))

    def test_product_given_twice(self):
        text = "field q\ntruncation 0 2\nbasis 0 a 1\nbasis 0 b 1\nproduct 0 a b -> 0\nproduct 0 b a -> 0\n"
        assert schema_error(text).line == 6

    def test_half_has_no_image_mod_two(self):
        text = "field fp:2\ntruncation 1 1\nbasis 0 b 1\nbasis 1 a 1\nface 0 1 a -> 1/2*b\n"
        err = schema_error(text)
        assert (err.line, err.column) == (5, 15)

    def test_missing_arrow(self):
        err = schema_error("field q\ntruncation 1 1\nbasis 1 a 1\nface 0 1 a b\n")
        assert 'expected' in str(err)

    def test_dangling_plus(self):
        text = "field q\ntruncation 1 1\nbasis 0 b 1\nbasis 1 a 1\nface 0 1 a -> b +\n"
        assert schema_error(text).line == 5
