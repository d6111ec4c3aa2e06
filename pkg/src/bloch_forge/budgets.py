"""Resource caps.

Every potentially explosive computation checks one of these caps and raises
BudgetError instead of silently truncating.  The environment variable
BLOCH_FORGE_BUDGET, if set to a float, scales all numeric caps.
"""

import os
from dataclasses import dataclass, field, fields


class BudgetError(RuntimeError):
    """A resource cap was exceeded; the partial result is not trustworthy."""


@dataclass
class Budgets:
    ring_elements: int = 10**6          # max elements when enumerating a ring
    group_elements: int = 5000          # max order in group closure
    bar_order_deg3: int = 36            # max |G| for degree-3 bar homology
    bar_order_deg2: int = 150           # max |G| for degree-2 bar homology
    complex_generators: int = 5 * 10**5  # max generators per complex degree
    matrix_entry_bits: int = 10**5      # max bit size of an SNF/HNF entry
    matrix_nnz: int = 4 * 10**7         # max fill-in during elimination
    search_nodes: int = 10**7           # backtracking node budget

    def scaled(self, factor: float) -> "Budgets":
        kw = {f.name: max(1, int(getattr(self, f.name) * factor)) for f in fields(self)}
        return Budgets(**kw)


def default_budgets() -> Budgets:
    b = Budgets()
    raw = os.environ.get("BLOCH_FORGE_BUDGET")
    if raw:
        try:
            b = b.scaled(float(raw))
        except ValueError:
            pass
    return b


BUDGETS = default_budgets()
