"""Finite field tests
Prime fields, quadratic extensions and square roots mod p
"""

import pytest

from src.core.errors import FieldError
from src.fields.ffield import PrimeField, fp2_construct, quadratic_extension, sqrt_mod_p


class TestPrimeField:
    """Test F_p arithmetic"""

    def test_non_prime_rejected(self):
        with pytest.raises(FieldError):
            PrimeField(15)

    def test_inverse(self):
        F = PrimeField(13)
        for x in F.elements():
            if x:
                assert x * x.inverse() == 1

    def test_square_count(self):
        for p in (3, 5, 7, 11, 13):
            assert len(PrimeField(p).squares()) == (p + 1) // 2

    def test_sqrt_min_root(self):
        F = PrimeField(13)
        assert sqrt_mod_p(F(10)) == F(6)
        assert sqrt_mod_p(F(2)) is None
        assert sqrt_mod_p(F(0)) == F(0)

    def test_sqrt_all_residues(self):
        for p in (3, 5, 17, 41, 97):
            F = PrimeField(p)
            for x in F.elements():
                root = sqrt_mod_p(x * x)
                assert root * root == x * x
                assert int(root) <= p - int(root) or int(root) == 0


class TestQuadraticExtension:
    """Test F_{p^2} and the tower above it"""

    def test_two_rejected(self):
        with pytest.raises(FieldError):
            fp2_construct(2)

    def test_order_and_squares(self):
        F9 = fp2_construct(3)
        assert F9.order == 9
        assert len(list(F9.elements())) == 9
        assert len(F9.squares()) == 5

    def test_omega_squared(self):
        F = fp2_construct(7)
        assert F.omega * F.omega == F.t

    def test_frobenius_fixes_base(self):
        F = fp2_construct(5)
        for x in F.elements():
            fx = x.frobenius()
            assert (fx == x) == (not x.v)
            assert fx.frobenius() == x

    def test_inverse(self):
        F = fp2_construct(5)
        for x in F.elements():
            if x:
                assert x * x.inverse() == F.one
        with pytest.raises(FieldError):
            F.zero.inverse()

    def test_tower(self):
        F81 = quadratic_extension(fp2_construct(3))
        assert F81.order == 81
        assert len(F81.squares()) == 41

    def test_hash_agrees_with_base_field_equality(self):
        F3 = PrimeField(3)
        F9 = fp2_construct(3)
        F81 = quadratic_extension(F9)
        embedded = F9(F3(2))
        assert embedded == F3(2)
        assert hash(embedded) == hash(F3(2))
        assert len({embedded, F3(2)}) == 1

        lifted = F81(embedded)
        assert lifted == embedded
        assert hash(lifted) == hash(embedded)
        assert len({F9(x) for x in F3.elements()} | set(F3.elements())) == 3
