from __future__ import annotations

from dataclasses import asdict, dataclass

DEFAULT_FRONTIER_CAP = 10**6


@dataclass(frozen=True)
class GenerationConfig:
    max_len: int = 3
    rng_seed: int = 0
    max_chain_depth: int = 2
    allow_pointer_deref: bool = False
    frontier_cap: int = DEFAULT_FRONTIER_CAP

    def __post_init__(self) -> None:
        if self.max_len < 1:
            raise ValueError("max_len must be >= 1")
        if self.max_chain_depth < 1:
            raise ValueError("max_chain_depth must be >= 1")
        if not 0 <= self.rng_seed < 2**64:
            raise ValueError("rng_seed must fit in 64 bits")
        if self.frontier_cap < 1:
            raise ValueError("frontier_cap must be positive")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "GenerationConfig":
        return cls(**data)
