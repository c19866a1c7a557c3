"""MDP state, action and strategy models."""

from typing import Dict, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from .base import ArrayModel
from .grid import ControlInput, GridState

WindState = Tuple[int, ...]


class AugmentedState(ArrayModel):
    """Grid state paired with the wind DTMC state (one bin index per farm)."""

    x: GridState
    s_w: WindState
    layer: int = Field(default=0, ge=0)

    @classmethod
    def of(cls, x: GridState, s_w: WindState, layer: int) -> "AugmentedState":
        return cls.model_construct(x=x, s_w=tuple(s_w), layer=layer)


class DiscreteAction(ArrayModel):
    """A grid point of the reduced control space and its full control input.

    ``coordinates`` holds the free variables in the order
    [dP_gen/dt of generators 1..n_g-1, R_gen of every generator,
    R_stor of batteries 1..n_s-1]. Without batteries R_gen covers
    generators 1..n_g-1 only.
    """

    grid_index: Tuple[int, ...]
    coordinates: Tuple[float, ...]
    control: ControlInput


class Strategy(BaseModel):
    """Memoryless deterministic strategy with the cost-to-go it induces."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    root: int
    actions: Dict[int, DiscreteAction] = Field(default_factory=dict)
    value: Dict[int, float] = Field(default_factory=dict)

    def action_for(self, node_id: int) -> Optional[DiscreteAction]:
        return self.actions.get(node_id)

    @property
    def root_value(self) -> float:
        return self.value[self.root]
