"""Scheme configuration and dispatch."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

from ..detmodel import GainEnsemble
from ..errors import ConfigError, UnsupportedCombination
from ..rationals import parse_rational
from ..region import CSIT, ChannelParams, Regime, ScenarioTag, Topology, classify_regime
from .jamming import JammingScheme
from .lattice import LatticeScheme


@dataclass(frozen=True)
class ZeroForcingScheme:
    params: ChannelParams
    ensemble: GainEnsemble
    kind: str = "zeroforcing"


Scheme = Union[LatticeScheme, JammingScheme, ZeroForcingScheme]


@dataclass(frozen=True)
class SchemeConfig:
    params: ChannelParams
    topology: Topology = Topology.IC
    csit: CSIT = CSIT.PERFECT
    epsilon: float = 0.05
    preset: str = "calibrated"
    exponent_overrides: Optional[Mapping[str, tuple]] = None
    ensemble: GainEnsemble = field(default_factory=GainEnsemble)

    @property
    def scenario(self) -> ScenarioTag:
        return ScenarioTag(self.topology, self.csit)

    @property
    def regime(self):
        return classify_regime(self.params, self.scenario)

    @classmethod
    def from_json(cls, obj: dict) -> "SchemeConfig":
        params = ChannelParams(parse_rational(str(obj["alpha"])), parse_rational(str(obj["beta"])))
        scen = ScenarioTag.parse(obj.get("topology", "IC"), obj.get("csit", "p"))
        ens = GainEnsemble(**obj["ensemble"]) if "ensemble" in obj else GainEnsemble()
        over = {k: tuple(v) for k, v in obj.get("exponent_overrides", {}).items()} or None
        return cls(params, scen.topology, scen.csit, float(obj.get("epsilon", 0.05)),
                   obj.get("preset", "calibrated"), over, ens)


def build_scheme(config: SchemeConfig) -> Scheme:
    """Pick and validate the achievability scheme for a configuration.

    Lattice alignment for IC Regimes 1-2 under perfect CSIT, Gaussian
    jamming for Regimes 1, 2 and 4 under finite precision CSIT, and
    zero-forcing for the broadcast channel under perfect CSIT.
    """
    if not config.epsilon > 0:
        raise ConfigError(f"epsilon must be positive, got {config.epsilon}")
    reg = config.regime.id
    a, b = float(config.params.alpha), float(config.params.beta)
    if config.csit is CSIT.PERFECT:
        if config.topology is Topology.BC:
            return ZeroForcingScheme(config.params, config.ensemble)
        if reg in (Regime.R1, Regime.R2):
            scheme = LatticeScheme.from_preset(reg.value, a, b, config.epsilon, config.preset,
                                               config.exponent_overrides)
            scheme.audit_power()
            return scheme
    elif reg in (Regime.R1, Regime.R2, Regime.R4):
        return JammingScheme(reg.value, a, b, config.ensemble)
    raise UnsupportedCombination(
        f"no scheme for {config.topology.value}/{config.csit.value} in {reg.value}")
