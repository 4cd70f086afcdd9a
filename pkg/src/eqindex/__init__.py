"""Exact symbolic engine for S^1-equivariant indices at isolated fixed points.

Modules:

* :mod:`eqindex.ring` characters, bigraded series and factor lists
* :mod:`eqindex.bundle_expr` q-twisted bundle expressions and their characters
* :mod:`eqindex.localization` fixed-point sums and the dual-expansion checks
* :mod:`eqindex.shifts` shift operators and the identities they satisfy
* :mod:`eqindex.anomaly` hypotheses on the fixed-point data
* :mod:`eqindex.cli` command-line front end
"""

from .datum import FixedComponentDatum, ManifoldDatum
from .errors import EngineError, IncompatibleTwist, InvalidDatum, NotPolynomial
from .localization import (OPERATORS, dual_expansion_check, operator, rigidity_check, total_index,
                           vanishing_check)
from .ring import BigradedSeries, Character, Factor, FactorList, Region, kernel, set_kernel
from .verdict import Verdict

__version__ = "0.1.0"

__all__ = [
    "FixedComponentDatum", "ManifoldDatum", "EngineError", "IncompatibleTwist", "InvalidDatum", "NotPolynomial",
    "OPERATORS", "dual_expansion_check", "operator", "rigidity_check", "total_index", "vanishing_check",
    "BigradedSeries", "Character", "Factor", "FactorList", "Region", "kernel", "set_kernel", "Verdict",
]
