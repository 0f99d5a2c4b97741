"""gridfreq: grid frequency dynamics with wind fast power reserve, and inertia estimation."""

__version__ = "0.1.0"

from .core import (
    PerUnitSystem,
    PhysicalRotor,
    PlantShare,
    TimeSeries,
    aggregate_rotational_inertia,
    aggregate_with_virtual,
    derivative,
    inertia_constant,
    kinetic_energy,
    moving_average,
)
from .errors import RankDeficientFit, SimulationDiverged, TraceFormatError, UndefinedEstimate
from .estimators import (
    METHODS,
    DisturbanceInfo,
    InertiaEstimate,
    ReducedOrderModel,
    RegressionResult,
    estimate_chassin,
    estimate_inoue,
    estimate_tuttelberg,
    estimate_wall,
    estimate_zografos17,
    estimate_zografos_r,
    fit_virtual_inertia_relation,
    identify_reduced_model,
)
from .plants import (
    HydroParams,
    HydroState,
    LoadParams,
    ThermalParams,
    ThermalState,
    hydro_derivatives,
    load_power,
    thermal_derivatives,
)
from .sim import (
    SCENARIO_SHARES,
    GenerationShares,
    NoiseSpec,
    ScenarioConfig,
    SimulationTrace,
    rocof_metric,
    scenario_preset,
    simulate,
    swing_step,
)
from .wind import (
    Mode,
    WindParams,
    WindState,
    build_recovery_parabola,
    command_power,
    controller_step,
    initial_wind_state,
    p_mech,
    p_mppt,
    recovery_law,
    wind_derivatives,
)
