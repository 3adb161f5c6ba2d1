"""Quadratic field tests
Squarefree parts, discriminants, Kronecker symbols, splitting and exact arithmetic
"""

import warnings
from fractions import Fraction

import pytest

from src.core.errors import BadReductionError, BudgetExceededError, FieldError
from src.fields.qfield import (QuadElem, QuadField, SplitType, field_discriminant,
                               is_squarefree, iter_fields_by_disc, kronecker,
                               reduction_context, squarefree_reduce, splitting_type)


class TestSquarefree:
    """Test squarefree reduction and discriminants"""

    @pytest.mark.parametrize("n, expected", [
        (-12, (-3, 2)),
        (50, (2, 5)),
        (-1, (-1, 1)),
        (72, (2, 6)),
        (49, (1, 7)),
        (12 * 10007 ** 2, (3, 2 * 10007)),
        (-5 * 10007 ** 2, (-5, 10007)),
        (10007, (10007, 1)),
    ])
    def test_squarefree_reduce(self, n, expected):
        assert squarefree_reduce(n) == expected

    def test_zero_rejected(self):
        with pytest.raises(FieldError):
            squarefree_reduce(0)

    def test_budget(self):
        with pytest.raises(BudgetExceededError):
            squarefree_reduce(10 ** 13, budget=10 ** 12)

    @pytest.mark.parametrize("d, disc", [(5, 5), (-1, -4), (2, 8), (-3, -3), (-5, -20), (3, 12)])
    def test_field_discriminant(self, d, disc):
        assert field_discriminant(d) == disc

    @pytest.mark.parametrize("d", [0, 1, 4, -8])
    def test_invalid_d(self, d):
        with pytest.raises(FieldError):
            QuadField(d)

    def test_is_squarefree(self):
        assert is_squarefree(-30)
        assert not is_squarefree(18)


class TestKroneckerAndSplitting:
    """Test Kronecker symbols and prime decomposition"""

    def test_kronecker_values(self):
        assert kronecker(2, 7) == 1
        assert kronecker(3, 7) == -1
        assert kronecker(5, 2) == -1
        assert kronecker(17, 2) == 1
        assert kronecker(6, 3) == 0

    def test_kronecker_emits_no_deprecation_warning(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error", DeprecationWarning)
            assert kronecker(-7, 15) == kronecker(-7, 3) * kronecker(-7, 5)
            assert kronecker(10, 21) == -1

    @pytest.mark.parametrize("d, expected", [
        (-7, SplitType.SPLIT),
        (17, SplitType.SPLIT),
        (5, SplitType.INERT),
        (-3, SplitType.INERT),
        (-1, SplitType.RAMIFIED),
        (2, SplitType.RAMIFIED),
    ])
    def test_splitting_at_two(self, d, expected):
        assert splitting_type(QuadField(d), 2) == expected

    def test_splitting_matches_factorization(self):
        """x^2 - d mod p has two, zero or one roots as p splits, is inert or ramifies"""
        expected_roots = {SplitType.SPLIT: 2, SplitType.INERT: 0, SplitType.RAMIFIED: 1}
        primes = [p for p in range(3, 101) if all(p % q for q in range(2, p))]
        for d in range(-50, 51):
            if d in (0, 1) or not is_squarefree(d):
                continue
            K = QuadField(d)
            for p in primes:
                roots = sum(1 for x in range(p) if (x * x - d) % p == 0)
                assert roots == expected_roots[splitting_type(K, p)], (d, p)


class TestQuadElem:
    """Test exact arithmetic in Q(sqrt(d))"""

    @pytest.fixture
    def K(self):
        return QuadField(2)

    def test_norm_and_product(self, K):
        x = K.element(1, 1)
        assert x * x.conjugate() == -1
        assert x.norm() == -1
        assert x.trace() == 2

    def test_inverse(self, K):
        x = K.element(3, Fraction(1, 2))
        assert x * x.inverse() == 1
        assert (1 / x) * x == K.one

    def test_division_by_zero(self, K):
        with pytest.raises(FieldError):
            K.one / K.zero

    def test_sqrt(self, K):
        root = K.element(3, 2).sqrt()
        assert root is not None and root * root == K.element(3, 2)
        assert K.element(2, 0).sqrt() == K.sqrt_d or K.element(2, 0).sqrt() == -K.sqrt_d
        assert K.element(3, 0).sqrt() is None

    def test_sqrt_of_rational_in_other_component(self):
        K = QuadField(6)
        root = K.element(Fraction(3, 8)).sqrt()
        assert root == K.element(0, Fraction(1, 4))

    def test_field_mismatch(self):
        with pytest.raises(FieldError):
            QuadField(2).one + QuadField(3).sqrt_d

    def test_json(self, K):
        x = K.element(Fraction(-2, 121), Fraction(-8, 121))
        assert x.to_json() == {"a": "-2/121", "b": "-8/121", "d": 2}
        assert QuadElem.from_json(x.to_json()) == x

    def test_rational_hash_matches(self, K):
        assert hash(K.element(5)) == hash(Fraction(5))
        assert K.element(5) == 5

    def test_contains_sqrt(self):
        assert QuadField(-7).contains_sqrt(-7)
        assert not QuadField(-7).contains_sqrt(17)


class TestFieldOrdering:
    """Test the |disc| ordering used by smallest-field searches"""

    def test_first_fields(self):
        ds = [K.d for K in iter_fields_by_disc(24)]
        assert ds == [-3, -1, 5, -7, 2, -2, -11, 3, 13, -15, 17, -19, -5, 21, -23, 6, -6]

    def test_positive_first_on_ties(self):
        ds = [K.d for K in iter_fields_by_disc(8)]
        assert ds.index(2) < ds.index(-2)


class TestReductionContext:
    """Test residue fields at primes of K"""

    def test_inert_prime_gives_fp2(self):
        ctx = reduction_context(QuadField(-7), 3)
        assert ctx.split_type == SplitType.INERT
        assert ctx.target.order == 9
        assert ctx.sqrt_image * ctx.sqrt_image == ctx.target(-7)

    def test_split_prime(self):
        ctx = reduction_context(QuadField(-7), 11)
        assert ctx.split_type == SplitType.SPLIT
        assert ctx.sqrt_image * ctx.sqrt_image == ctx.target(-7)

    def test_reduce_element(self):
        K = QuadField(-7)
        ctx = reduction_context(K, 11)
        x = K.element(3, 2)
        assert ctx.reduce(x) == ctx.target(3) + ctx.target(2) * ctx.sqrt_image

    def test_non_integral_rejected(self):
        ctx = reduction_context(None, 5)
        with pytest.raises(BadReductionError):
            ctx.reduce(Fraction(1, 5))

    def test_composite_rejected(self):
        with pytest.raises(FieldError):
            reduction_context(None, 9)
