"""Sliding-scale error detection: acceptance filters over decoded shots.

A filter trades acceptance fraction for fidelity in data analysis only:
weight mode thresholds the total correction weight, count mode thresholds
the number of fired detectors, ranked mode thresholds a precomputed
syndrome rank (lower rank = more likely syndrome).
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = ["AcceptanceFilter", "sliding_scale_accept"]


@dataclass(frozen=True)
class AcceptanceFilter:
    mode: str  # "weight" | "count" | "ranked"
    threshold: float
    ranks: tuple[int, ...] = ()  # ranked mode: syndrome -> rank lookup

    def __post_init__(self):
        if self.mode not in ("weight", "count", "ranked"):
            raise ValueError(f"unknown filter mode {self.mode!r}")


def sliding_scale_accept(filter: AcceptanceFilter, syndrome: int,
                         correction_weight: float | None = None) -> bool:
    if filter.mode == "weight":
        if correction_weight is None:
            raise ValueError("weight mode needs the decoded correction weight")
        return correction_weight <= filter.threshold
    if filter.mode == "count":
        return bin(syndrome).count("1") <= filter.threshold
    return filter.ranks[syndrome] <= filter.threshold
