"""QuadTorsion curves module
Elliptic curves, genus 2 curves and the point search
"""

from .ellcurve import EllCurve, EllPoint, TorsionGroup, torsion_certify
from .genus2 import HyperCurve, jacobian_order, jacobian_order_ext, jacobian_torsion_gcd_bound

__all__ = [
    'EllCurve', 'EllPoint', 'TorsionGroup', 'torsion_certify',
    'HyperCurve', 'jacobian_order', 'jacobian_order_ext', 'jacobian_torsion_gcd_bound',
]
