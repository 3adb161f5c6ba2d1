"""QuadTorsion fields module
Quadratic number fields and the finite fields they reduce to
"""

from .ffield import FiniteField, PrimeField, QuadraticExtension, fp2_construct
from .qfield import QuadElem, QuadField, SplitType, iter_fields_by_disc, splitting_type

__all__ = [
    'FiniteField', 'PrimeField', 'QuadraticExtension', 'fp2_construct',
    'QuadElem', 'QuadField', 'SplitType', 'iter_fields_by_disc', 'splitting_type',
]
