"""Multi-period stockpile blending: model, repair operators and differential evolution."""

from .model import (
    Bounds,
    ContractError,
    Instance,
    Material,
    ParcelOutcome,
    Solution,
    StockpileState,
    claim_from_stockpiles,
    max_cu_grade_spread,
    mix_parcel_grades,
    update_stockpile_month_start,
)
from .process import ProcessParams

__version__ = "0.1.0"
