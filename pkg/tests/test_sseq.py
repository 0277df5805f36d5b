import pytest

from src.models.errors import TruncationError
from src.models.simplicial import Truncation, homotopy_groups, moore_complex, validate
from src.services.bar import bar
from src.services.fixtures import eilenberg_maclane, get_fixture
from src.services.sseq import (
    dold_puppe_check, e0_page, filtration_quotient, power_quotient, power_quotient_check, sym_coinvariants,
)


class TestCoinvariants:
    def test_first_power_is_identity(self, K1):
        assert sym_coinvariants(K1, 1) is K1

    def test_coinvariants_are_simplicial(self, field):
        V = eilenberg_maclane(1, field, Truncation(3, 2))
        assert validate(sym_coinvariants(V, 2), check_algebra=False).violations == []

    def test_orbits_counted_as_multisets(self, qq):
        V = eilenberg_maclane(1, qq, Truncation(2, 2))
        S = sym_coinvariants(V, 2)
        k = V.dim(2, 1)
        assert S.dim(2, 2) == k * (k + 1) // 2
        assert S.dim(2, 1) == 0

    @pytest.mark.parametrize('p', [2, 3])
    def test_dold_puppe(self, field, p):
        V = eilenberg_maclane(1, field, Truncation(3, p))
        report = dold_puppe_check(V, p)
        assert report.violations == []
        assert len(report.measurements) == 3 * p

    def test_dold_puppe_needs_degree(self, qq):
        V = eilenberg_maclane(1, qq, Truncation(2, 2))
        with pytest.raises(TruncationError):
            dold_puppe_check(V, 2, q_max=2)


class TestPowerFiltration:
    @pytest.mark.parametrize('p', [1, 2])
    def test_quotients_match_coinvariants(self, K1, p):
        assert power_quotient_check(K1, p, 1).violations == []

    def test_quotient_is_simplicial(self, qq):
        X = get_fixture('K1', qq, Truncation(2, 2))
        Y = power_quotient(X, 1)
        assert validate(Y, check_algebra=False).violations == []
        assert power_quotient(X, 1) is Y

    def test_free_algebra_quotient_is_indecomposables(self, qq):
        X = get_fixture('free1', qq, Truncation(3, 2))
        table = homotopy_groups(power_quotient(X, 1), 2)
        assert table[(1, 1)] == 1
        assert table[(1, 2)] == 0


class TestFiltrationQuotient:
    def test_rows_from_the_start_are_power_quotients(self, qq):
        Y = bar(get_fixture('K1', qq, Truncation(2, 2)))
        assert filtration_quotient(Y, 2, 2) is power_quotient(Y, 2)
        assert filtration_quotient(Y, 1, 3) is power_quotient(Y, 3)

    def test_rows_below_the_start_are_computed_empty(self, qq):
        Y = bar(get_fixture('K1', qq, Truncation(2, 3)))
        F = filtration_quotient(Y, 3, 1)
        assert F is filtration_quotient(Y, 3, 2)
        assert validate(F, check_algebra=False).violations == []
        assert Y.power_block(3, 2, 3).dim > 0
        for n in range(3):
            for w in (1, 2, 3):
                assert F.kernel_block(n, w).dim == Y.power_block(3, n, w).dim
                assert F.dim(n, w) == 0


class TestE0Page:
    def test_rows_below_start_vanish(self, K1):
        table, report = e0_page(K1, 2, 2, 1)
        assert report.violations == []
        assert all(dim == 0 for (p, _, _), dim in table.items() if p < 2)
        measured = [m for m in report.measurements if m.measure == 'E0' and dict(m.key)['p'] < 2]
        assert measured and all(m.value == 0 for m in measured)

    def test_start_row_carries_the_power(self, qq):
        X = get_fixture('K1', qq, Truncation(2, 2))
        table, _ = e0_page(X, 2, 2, 1)
        assert table[(2, 1, 2)] == moore_complex(power_quotient(bar(X), 2)).chains(1, 2).dim

    def test_rows_above_weight_vanish(self, qq):
        X = get_fixture('K1', qq, Truncation(2, 2))
        table, report = e0_page(X, 1, 3, 1)
        assert report.violations == []
        assert all(dim == 0 for (p, _, w), dim in table.items() if p > w)
