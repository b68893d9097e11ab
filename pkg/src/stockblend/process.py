"""Processing-stage model: throughput, parcel volume, concentrate, recoveries, copper.

The plant's real processing functions are proprietary, so this module ships a
smooth surrogate with the same inputs. Each parcel's volume, concentrate and
copper are linear in its processing duration once the feed grades are fixed;
the duration repair relies on that.

All grades are mass fractions indexed by :class:`stockblend.model.Material`.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields

from .model import Material

CU = int(Material.Cu)
FE = int(Material.Fe)
AU = int(Material.Au)
U = int(Material.U)
F = int(Material.F)

#: Lower clamp on the copper fraction of the concentrate.
GAMMA_FLOOR = 0.05
#: Throughput never drops below this share of the base rate.
THROUGHPUT_FLOOR = 0.1


@dataclass(frozen=True)
class ProcessParams:
    """Plant coefficients.

    Attributes
    ----------
    discount : float
        Per-month discount factor, in (0, 1].
    base_throughput : float
        Feed rate in tonnes/hour before grade corrections.
    phi_au, phi_u, phi_fe, phi_cu : float
        Grade sensitivities of the chemical processing stage.
    gamma1, gamma2 : float
        Copper fraction of the produced concentrate, ``gamma1 + gamma2 * g_Cu``.
    mu_fl, mu_u : float
        F and U recovery slopes.
    mu_cu1, mu_cu2 : float
        Copper recovery intercept and slope.
    """

    discount: float = 0.98
    base_throughput: float = 100.0
    phi_au: float = 0.0
    phi_u: float = 0.0
    phi_fe: float = 0.5
    phi_cu: float = 5.0
    gamma1: float = 0.25
    gamma2: float = 0.0
    mu_fl: float = 20.0
    mu_u: float = 20.0
    mu_cu1: float = 0.7
    mu_cu2: float = 5.0

    def __post_init__(self):
        if not 0.0 < self.discount <= 1.0:
            raise ValueError(f"discount must be in (0, 1], got {self.discount}")
        if not self.base_throughput > 0.0:
            raise ValueError(f"base_throughput must be > 0, got {self.base_throughput}")
        if not self.gamma1 > 0.0:
            raise ValueError(f"gamma1 must be > 0, got {self.gamma1}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ProcessParams":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown process parameters: {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in data.items()})


def _clamp(x: float, lo: float, hi: float) -> float:
    return lo if x < lo else hi if x > hi else float(x)


def throughput(grades, params: ProcessParams) -> float:
    """Feed rate in tonnes/hour for a blend with the given grades."""
    rate = params.base_throughput * (
        1.0
        + params.phi_cu * grades[CU]
        + params.phi_fe * grades[FE]
        + params.phi_au * grades[AU]
        + params.phi_u * grades[U]
    )
    return float(max(rate, THROUGHPUT_FLOOR * params.base_throughput))


def parcel_volume_f2(t: float, grades, params: ProcessParams) -> float:
    """Tonnes of feed processed in ``t`` hours."""
    return t * throughput(grades, params)


def cu_recovery(g_cu: float, params: ProcessParams) -> float:
    return _clamp(params.mu_cu1 + params.mu_cu2 * float(g_cu), 0.0, 1.0)


def f_recovery_f4(g_f: float, params: ProcessParams) -> float:
    return _clamp(params.mu_fl * float(g_f), 0.0, 1.0)


def u_recovery_f5(g_u: float, params: ProcessParams) -> float:
    return _clamp(params.mu_u * float(g_u), 0.0, 1.0)


def concentrate_grade(g_cu: float, params: ProcessParams) -> float:
    """Copper fraction of the produced concentrate."""
    return _clamp(params.gamma1 + params.gamma2 * float(g_cu), GAMMA_FLOOR, 1.0)


def concentrate_rate(grades, params: ProcessParams) -> float:
    """Concentrate tonnes per processing hour; ``concentrate_f3(t) == t * rate``."""
    g_cu = float(grades[CU])
    return (
        throughput(grades, params)
        * g_cu
        * cu_recovery(g_cu, params)
        / concentrate_grade(g_cu, params)
    )


def concentrate_f3(t: float, grades, params: ProcessParams) -> float:
    """Tonnes of concentrate produced in ``t`` hours."""
    g_cu = float(grades[CU])
    w = parcel_volume_f2(t, grades, params)
    return w * g_cu * cu_recovery(g_cu, params) / concentrate_grade(g_cu, params)


def copper_tonnes_f1(t: float, grades, month: int, params: ProcessParams) -> float:
    """Discounted copper tonnes recovered from a parcel processed in ``month`` (1-based)."""
    if month < 1:
        raise ValueError(f"month is 1-based, got {month}")
    g_cu = float(grades[CU])
    w = parcel_volume_f2(t, grades, params)
    return params.discount ** (month - 1) * w * g_cu * cu_recovery(g_cu, params)
