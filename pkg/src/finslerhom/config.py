"""Central tolerance record used by checks, search and the acceptance suite."""

from dataclasses import dataclass, asdict, fields


@dataclass(frozen=True)
class Tolerances:
    structural: float = 1e-8  # symmetry / torsion / Berwald spread
    fd_oracle: float = 1e-6  # agreement with finite-difference oracles
    metric_compat: float = 1e-7
    euler: float = 1e-10
    t_residual: float = 1e-8
    v_residual: float = 1e-8
    lemma2: float = 1e-8
    sup_distance: float = 1e-6
    angular: float = 1e-4  # dedup / zero-set matching, radians
    speed_drift: float = 1e-7

    def __post_init__(self):
        for f in fields(self):
            if not getattr(self, f.name) > 0:
                raise ValueError(f"tolerance {f.name} must be positive")

    def as_dict(self):
        return asdict(self)


DEFAULT = Tolerances()
