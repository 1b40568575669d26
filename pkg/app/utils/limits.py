from dataclasses import dataclass
from typing import Any, Mapping

from config import Config


@dataclass(frozen=True)
class Limits:
    """Size guards and worker count shared by the computations."""
    field_bits: int = Config.FIELD_GUARD_BITS
    group_enum: int = Config.GROUP_ENUM_LIMIT
    count_enum: int = Config.COUNT_ENUM_LIMIT
    oracle_dim: int = Config.ORACLE_MAX_DIM
    workers: int = Config.WORKERS

    @classmethod
    def from_config(cls, cfg: Mapping[str, Any]) -> 'Limits':
        return cls(
            field_bits=int(cfg.get('FIELD_GUARD_BITS', Config.FIELD_GUARD_BITS)),
            group_enum=int(cfg.get('GROUP_ENUM_LIMIT', Config.GROUP_ENUM_LIMIT)),
            count_enum=int(cfg.get('COUNT_ENUM_LIMIT', Config.COUNT_ENUM_LIMIT)),
            oracle_dim=int(cfg.get('ORACLE_MAX_DIM', Config.ORACLE_MAX_DIM)),
            workers=max(1, int(cfg.get('WORKERS', Config.WORKERS))),
        )

    def field_fits(self, p: int, n: int) -> bool:
        return p ** n <= 2 ** self.field_bits


DEFAULT_LIMITS = Limits()
