"""Emission-credit accounting for data centers under a cap.

Each account holds an emission cap in kg CO2e and a realized emission
total. The difference is its credit position: under-emitters sell the
surplus, over-emitters buy the shortfall, both at one market price per kg.
Cash flow is linear in price, and a settlement is just the per-account
positions priced and summed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidScenario
from .simulate import SimulationReport


@dataclass(frozen=True)
class DataCenterAccount:
    """One data center's cap and realized emissions, both in kg CO2e."""

    name: str
    cap_kg: float
    emissions_kg: float

    def __post_init__(self):
        if not self.name:
            raise InvalidScenario("account name must be nonempty")
        if not math.isfinite(self.cap_kg) or self.cap_kg < 0.0:
            raise InvalidScenario(f"cap_kg must be >= 0, got {self.cap_kg}")
        if not math.isfinite(self.emissions_kg) or self.emissions_kg < 0.0:
            raise InvalidScenario(f"emissions_kg must be >= 0, got {self.emissions_kg}")


def cer_position(account: DataCenterAccount) -> float:
    """Credit position in kg: positive = surplus to sell, negative = deficit."""
    return account.cap_kg - account.emissions_kg


@dataclass(frozen=True)
class SettlementEntry:
    name: str
    cap_kg: float
    emissions_kg: float
    position_kg: float
    cash_flow: float


@dataclass(frozen=True)
class MarketSettlement:
    """Priced positions for a set of accounts at one clearing price."""

    price_per_kg: float
    entries: tuple[SettlementEntry, ...]
    total_position_kg: float
    total_cash_flow: float


def settle(accounts: list[DataCenterAccount], price_per_kg: float) -> MarketSettlement:
    """Price every account's position at a single market price.

    Sellers (cap above emissions) receive position * price; buyers pay it.
    Totals are exact sums over entries, so a set of accounts whose caps
    match their collective emissions settles to zero net cash.
    """
    if not accounts:
        raise InvalidScenario("settlement needs at least one account")
    if not math.isfinite(price_per_kg) or price_per_kg < 0.0:
        raise InvalidScenario(f"price_per_kg must be >= 0, got {price_per_kg}")
    entries = []
    for account in accounts:
        position = cer_position(account)
        entries.append(
            SettlementEntry(
                name=account.name,
                cap_kg=account.cap_kg,
                emissions_kg=account.emissions_kg,
                position_kg=position,
                cash_flow=position * price_per_kg,
            )
        )
    return MarketSettlement(
        price_per_kg=price_per_kg,
        entries=tuple(entries),
        total_position_kg=sum(e.position_kg for e in entries),
        total_cash_flow=sum(e.cash_flow for e in entries),
    )


def emissions_from_report(report: SimulationReport) -> float:
    """Emission total (kg) recomputed from a report's energy figures.

    Cross-checks energy * carbon intensity against the report's own
    aggregate and rejects the report if the two drift apart.
    """
    recomputed = report.total_energy_kwh * report.scenario.carbon_intensity
    stated = report.total_emissions_kg
    scale = max(abs(recomputed), abs(stated), 1.0)
    if abs(recomputed - stated) > 1e-12 * scale:
        raise InvalidScenario(
            f"report emissions {stated} inconsistent with "
            f"energy * carbon_intensity = {recomputed}"
        )
    return recomputed


def derive_co2_rate(energy_full: float, carbon_intensity: float, price_per_kg: float) -> float:
    """Per-step CO2e cost rate at full provisioning.

    Converts a market price into the cost-model channel: energy at full
    provisioning times grid carbon intensity times credit price.
    """
    for label, value in (
        ("energy_full", energy_full),
        ("carbon_intensity", carbon_intensity),
        ("price_per_kg", price_per_kg),
    ):
        if not math.isfinite(value) or value < 0.0:
            raise InvalidScenario(f"{label} must be >= 0, got {value}")
    return energy_full * carbon_intensity * price_per_kg
