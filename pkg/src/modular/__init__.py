"""QuadTorsion modular curves module
Catalog of X1(m,n) models and the facts ledger
"""

from .catalog import ModularCurveRecord, catalog, get_record, is_cusp, kenku_momose_Z18
from .ledger import FactEntry, FactKind, FactLedger, fact_lookup, get_ledger

__all__ = [
    'ModularCurveRecord', 'catalog', 'get_record', 'is_cusp', 'kenku_momose_Z18',
    'FactEntry', 'FactKind', 'FactLedger', 'fact_lookup', 'get_ledger',
]
