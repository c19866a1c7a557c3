"""Grid topology, state and input models."""

from collections import deque
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, model_validator

from .base import ArrayModel, Vector, freeze


class NodeSpec(BaseModel):
    """Swing-equation parameters of one grid node."""

    model_config = ConfigDict(frozen=True)

    inertia: float = Field(gt=0, description="m_n in MW*s^2/rad")
    damping: float = Field(gt=0, description="d_n in MW*s/rad")
    load_share: float = Field(default=0.0, ge=0, description="Share of system load at this node")


class LineSpec(BaseModel):
    """Transmission line between two nodes."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    from_node: int = Field(alias="from", ge=0)
    to_node: int = Field(alias="to", ge=0)
    susceptance: float = Field(gt=0, description="b_{n,p} in MW")
    capacity: float = Field(gt=0, description="Maximum |flow| in MW")


class GeneratorSpec(BaseModel):
    """Conventional generator with spinning reserves."""

    model_config = ConfigDict(frozen=True)

    node: int = Field(ge=0)
    p_min: float = Field(default=0.0, ge=0)
    p_max: float = Field(gt=0)
    ramp: float = Field(gt=0, description="Maximum |dP/dt| in MW/s")
    reserve_down: float = Field(gt=0, description="Scheduled down-spinning reserve R_ds (MW)")
    reserve_up: float = Field(gt=0, description="Scheduled up-spinning reserve R_us (MW)")


class WindFarmSpec(BaseModel):
    """Wind farm; ``share`` splits the system wind forecast across farms."""

    model_config = ConfigDict(frozen=True)

    node: int = Field(ge=0)
    share: float = Field(default=1.0, gt=0)


class BatterySpec(BaseModel):
    """Battery offering demand-side flexibility."""

    model_config = ConfigDict(frozen=True)

    node: int = Field(ge=0)
    capacity_mwh: float = Field(gt=0)
    rate_mw: float = Field(gt=0)
    flex_down: float = Field(gt=0, description="Scheduled decreased-demand flexibility R_dd (MW)")
    flex_up: float = Field(gt=0, description="Scheduled increased-demand flexibility R_id (MW)")
    efficiency: float = Field(default=1.0, gt=0, le=1.0)
    initial_soc: float = Field(default=0.5, ge=0, le=1.0)


class GridArrays:
    """Dense numpy views of a GridSpec, computed once per spec."""

    def __init__(self, spec: "GridSpec"):
        n_t, n_g, n_f, n_s = spec.n_t, spec.n_g, spec.n_f, spec.n_s

        self.inertia = freeze(np.array([n.inertia for n in spec.nodes], dtype=float))
        self.damping = freeze(np.array([n.damping for n in spec.nodes], dtype=float))
        self.load_share = freeze(np.array([n.load_share for n in spec.nodes], dtype=float))

        susceptance = np.zeros((n_t, n_t))
        for line in spec.lines:
            susceptance[line.from_node, line.to_node] = line.susceptance
            susceptance[line.to_node, line.from_node] = line.susceptance
        self.susceptance = freeze(susceptance)

        self.line_from = freeze(np.array([l.from_node for l in spec.lines], dtype=int))
        self.line_to = freeze(np.array([l.to_node for l in spec.lines], dtype=int))
        self.line_b = freeze(np.array([l.susceptance for l in spec.lines], dtype=float))
        self.line_capacity = freeze(np.array([l.capacity for l in spec.lines], dtype=float))

        self.gen_incidence = freeze(self._incidence(n_t, [g.node for g in spec.generators]))
        self.farm_incidence = freeze(self._incidence(n_t, [f.node for f in spec.wind_farms]))
        self.battery_incidence = freeze(self._incidence(n_t, [b.node for b in spec.batteries]))

        self.gen_p_min = freeze(np.array([g.p_min for g in spec.generators], dtype=float))
        self.gen_p_max = freeze(np.array([g.p_max for g in spec.generators], dtype=float))
        self.gen_ramp = freeze(np.array([g.ramp for g in spec.generators], dtype=float))
        self.reserve_down = freeze(np.array([g.reserve_down for g in spec.generators], dtype=float))
        self.reserve_up = freeze(np.array([g.reserve_up for g in spec.generators], dtype=float))

        self.farm_share = freeze(np.array([f.share for f in spec.wind_farms], dtype=float))

        self.battery_capacity = freeze(np.array([b.capacity_mwh for b in spec.batteries], dtype=float))
        self.battery_rate = freeze(np.array([b.rate_mw for b in spec.batteries], dtype=float))
        self.flex_down = freeze(np.array([b.flex_down for b in spec.batteries], dtype=float))
        self.flex_up = freeze(np.array([b.flex_up for b in spec.batteries], dtype=float))
        self.battery_efficiency = freeze(np.array([b.efficiency for b in spec.batteries], dtype=float))
        self.initial_soc = freeze(np.array([b.initial_soc for b in spec.batteries], dtype=float))

    @staticmethod
    def _incidence(n_t: int, placement: List[int]) -> np.ndarray:
        matrix = np.zeros((n_t, len(placement)))
        for column, node in enumerate(placement):
            matrix[node, column] = 1.0
        return matrix


class GridSpec(BaseModel):
    """Static topology and asset parameters of a storage-integrated grid."""

    model_config = ConfigDict(frozen=True)

    name: str = "grid"
    nodes: List[NodeSpec] = Field(min_length=1)
    lines: List[LineSpec] = Field(default_factory=list)
    generators: List[GeneratorSpec] = Field(min_length=1)
    wind_farms: List[WindFarmSpec] = Field(default_factory=list)
    batteries: List[BatterySpec] = Field(default_factory=list)
    freq_limit: float = Field(default=0.1, gt=0, description="omega_max in Hz")
    dt: float = Field(default=300.0, gt=0, description="Discretisation step in seconds")

    _arrays: Optional[GridArrays] = PrivateAttr(default=None)

    @model_validator(mode="after")
    def _check_topology(self) -> "GridSpec":
        n_t = len(self.nodes)
        placements = (
            [("generator", g.node) for g in self.generators]
            + [("wind farm", f.node) for f in self.wind_farms]
            + [("battery", b.node) for b in self.batteries]
        )
        for kind, node in placements:
            if node >= n_t:
                raise ValueError(f"{kind} placed at node {node}, grid has {n_t} nodes")

        seen = set()
        for line in self.lines:
            if line.from_node >= n_t or line.to_node >= n_t:
                raise ValueError(f"line {line.from_node}-{line.to_node} references a missing node")
            if line.from_node == line.to_node:
                raise ValueError(f"line at node {line.from_node} has no far end")
            key = tuple(sorted((line.from_node, line.to_node)))
            if key in seen:
                raise ValueError(f"duplicate line {key[0]}-{key[1]}")
            seen.add(key)

        adjacency: Dict[int, List[int]] = {n: [] for n in range(n_t)}
        for line in self.lines:
            adjacency[line.from_node].append(line.to_node)
            adjacency[line.to_node].append(line.from_node)
        reached, queue = {0}, deque([0])
        while queue:
            for neighbour in adjacency[queue.popleft()]:
                if neighbour not in reached:
                    reached.add(neighbour)
                    queue.append(neighbour)
        if len(reached) != n_t:
            raise ValueError(f"grid is not connected; unreachable nodes {sorted(set(range(n_t)) - reached)}")

        for g in self.generators:
            if g.p_min > g.p_max:
                raise ValueError(f"generator at node {g.node} has p_min > p_max")

        load_total = sum(n.load_share for n in self.nodes)
        if abs(load_total - 1.0) > 1e-9:
            raise ValueError(f"node load shares must sum to 1, got {load_total}")
        if self.wind_farms:
            farm_total = sum(f.share for f in self.wind_farms)
            if abs(farm_total - 1.0) > 1e-9:
                raise ValueError(f"wind farm shares must sum to 1, got {farm_total}")
        return self

    @property
    def n_t(self) -> int:
        return len(self.nodes)

    @property
    def n_g(self) -> int:
        return len(self.generators)

    @property
    def n_f(self) -> int:
        return len(self.wind_farms)

    @property
    def n_s(self) -> int:
        return len(self.batteries)

    @property
    def arrays(self) -> GridArrays:
        if self._arrays is None:
            self._arrays = GridArrays(self)
        return self._arrays

    def susceptance_map(self) -> Dict[Tuple[int, int], float]:
        """Symmetric sparse map (n, p) -> b_{n,p}."""
        result: Dict[Tuple[int, int], float] = {}
        for line in self.lines:
            result[(line.from_node, line.to_node)] = line.susceptance
            result[(line.to_node, line.from_node)] = line.susceptance
        return result

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GridSpec):
            return NotImplemented
        return self.model_dump() == other.model_dump()

    __hash__ = None  # type: ignore[assignment]


class GridState(ArrayModel):
    """Continuous state x(k) = [delta, omega, p_gen, soc]."""

    delta: Vector
    omega: Vector
    p_gen: Vector
    soc: Vector
    k: int = 0

    @classmethod
    def from_arrays(
        cls,
        delta: np.ndarray,
        omega: np.ndarray,
        p_gen: np.ndarray,
        soc: np.ndarray,
        k: int,
    ) -> "GridState":
        """Build a state from arrays that are already validated float vectors."""
        return cls.model_construct(
            delta=freeze(delta), omega=freeze(omega), p_gen=freeze(p_gen), soc=freeze(soc), k=k
        )

    @classmethod
    def zeros(cls, spec: GridSpec, k: int = 0) -> "GridState":
        return cls(
            delta=np.zeros(spec.n_t),
            omega=np.zeros(spec.n_t),
            p_gen=np.zeros(spec.n_g),
            soc=np.zeros(spec.n_s),
            k=k,
        )


class ControlInput(ArrayModel):
    """Control vector u(k) = [dP_gen/dt, R_gen, R_stor]."""

    dp_gen: Vector
    r_gen: Vector
    r_stor: Vector

    @classmethod
    def zeros(cls, spec: GridSpec) -> "ControlInput":
        return cls(dp_gen=np.zeros(spec.n_g), r_gen=np.zeros(spec.n_g), r_stor=np.zeros(spec.n_s))


class KnownInput(ArrayModel):
    """Uncontrollable known inputs v(k) = [P_load per node, P_wind_fc per farm, P_stor per battery]."""

    p_load: Vector
    p_wind_fc: Vector
    p_stor: Vector


class Disturbance(ArrayModel):
    """Wind forecast error per farm (MW)."""

    dp_wind: Vector

    @classmethod
    def zeros(cls, spec: GridSpec) -> "Disturbance":
        return cls(dp_wind=np.zeros(spec.n_f))
