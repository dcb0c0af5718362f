"""Exact stroboscopic simulation of spin-1/2 quantum batteries charged by a
periodically driven Ising charger."""

from .floquet import FloquetOperator, KickRecord, KickSeries, apply_kick, build_floquet, evolve
from .lattice import (
    Bond,
    BondTable,
    Boundary,
    ChargerParams,
    Range,
    build_bond_table,
    interaction_energy,
    magnetization,
)
from .observables import (
    BipartitionSpec,
    charging_power,
    detect_period,
    entanglement_entropy,
    max_stored_energy,
    reduced_density_matrix,
    stored_energy,
)
from .statevector import (
    StateVector,
    apply_diagonal_phase,
    energy_expectation_z,
    fwht_inplace,
    ground_state,
)

__all__ = [
    "BipartitionSpec", "Bond", "BondTable", "Boundary", "ChargerParams", "FloquetOperator",
    "KickRecord", "KickSeries", "Range", "StateVector", "apply_diagonal_phase", "apply_kick",
    "build_bond_table", "build_floquet", "charging_power", "detect_period",
    "energy_expectation_z", "entanglement_entropy", "evolve", "fwht_inplace", "ground_state",
    "interaction_energy", "magnetization", "max_stored_energy", "reduced_density_matrix",
    "stored_energy",
]
