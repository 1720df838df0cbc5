"""Exact Frobenius power sums, L-functions and Swan conductors of Kloosterman sheaves."""

from .charsum import (
    AdditiveChar,
    MultChar,
    SheafSpec,
    base_change_gauss_sum,
    count_characters,
    exterior_power_sum,
    frob2_power_sum,
    gauss_sum,
    kloosterman_all,
    kloosterman_power_sum,
    kloosterman_table,
    kloosterman_trace,
    power_sum_row,
    symmetric_power_sum,
    tensor_power_sum,
)
from .conductor import ConductorReport, conductor_report, cross_check
from .cyclotomic import CycFrac, CycInt, root_of_unity
from .finite_field import EnumerationLimitError, ExtensionTower, FqElement, FqField, dlog, extend, make_field
from .lfunction import (
    PowerSums,
    RationalFunctionQ,
    discover_lfunction,
    predicted_exterior_L,
    predicted_swan,
    series_exp,
    sheaf_power_sums,
    swan_from_L,
    verify_candidate,
)

__version__ = "0.1.0"
