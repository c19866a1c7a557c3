"""Layered exploration tree of the finite-horizon MDP."""

import logging
from enum import Enum
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import ActionExhaustedError, ProtocolError
from ..models.grid import GridSpec, GridState, KnownInput
from ..models.mdp import AugmentedState, DiscreteAction, WindState
from ..models.wind import WindDtmc
from .actions import expand

logger = logging.getLogger(__name__)

VIOLATION_PENALTY = 1e6


class NodeStatus(str, Enum):
    INTERNAL = "internal"
    GOAL = "goal"
    INFEASIBLE = "infeasible"
    DEADLOCK = "deadlock"


class ActionEdge:
    """An action of a node and its (child id, probability) pairs."""

    __slots__ = ("action", "children")

    def __init__(self, action: DiscreteAction, children: List[Tuple[int, float]]):
        self.action = action
        self.children = children


class TreeNode:
    __slots__ = ("id", "aug", "layer", "cost", "status", "edges", "parent")

    def __init__(
        self,
        id: int,
        aug: Optional[AugmentedState],
        layer: int,
        cost: float,
        status: NodeStatus,
        parent: Optional[int] = None,
    ):
        self.id = id
        self.aug = aug
        self.layer = layer
        self.cost = cost
        self.status = status
        self.edges: List[ActionEdge] = []
        self.parent = parent

    @property
    def is_leaf(self) -> bool:
        return not self.edges


def node_cost(x: GridState) -> float:
    """Immediate cost: summed absolute frequency deviation (Hz)."""
    return float(np.abs(x.omega).sum())


class MdpTree:
    """Arena of tree nodes keyed by id.

    ``v_window[l]`` is the known input used to step from layer ``l`` to
    ``l + 1``. Node ids are never reused, so ids within a retained subtree
    stay valid across horizon shifts.
    """

    def __init__(
        self,
        spec: Optional[GridSpec],
        dtmc: Optional[WindDtmc],
        horizon: int,
        lam: int,
        v_window: Optional[List[KnownInput]] = None,
        penalty: float = VIOLATION_PENALTY,
    ):
        self.spec = spec
        self.dtmc = dtmc
        self.horizon = horizon
        self.lam = lam
        self.v_window = list(v_window or [])
        self.penalty = penalty
        self.nodes: Dict[int, TreeNode] = {}
        self.root = -1
        self._next_id = 0

    def add_node(
        self,
        aug: Optional[AugmentedState],
        layer: int,
        cost: float,
        status: NodeStatus,
        parent: Optional[int] = None,
    ) -> TreeNode:
        node = TreeNode(self._next_id, aug, layer, cost, status, parent)
        self.nodes[node.id] = node
        self._next_id += 1
        return node

    def __len__(self) -> int:
        return len(self.nodes)

    def __getitem__(self, node_id: int) -> TreeNode:
        return self.nodes[node_id]

    @property
    def root_node(self) -> TreeNode:
        return self.nodes[self.root]

    @property
    def goal_set(self) -> List[int]:
        return [n.id for n in self.nodes.values() if n.status is NodeStatus.GOAL]

    @property
    def n_actions(self) -> int:
        return sum(len(n.edges) for n in self.nodes.values())

    def size(self) -> Tuple[int, int]:
        """(states, actions) of the MDP."""
        return len(self.nodes), self.n_actions

    def layers(self) -> List[List[int]]:
        """Node ids grouped by layer, each group in ascending id order."""
        grouped: List[List[int]] = [[] for _ in range(self.horizon + 1)]
        for node in self.nodes.values():
            while node.layer >= len(grouped):
                grouped.append([])
            grouped[node.layer].append(node.id)
        return grouped

    def subtree(self, node_id: int) -> Iterator[int]:
        stack = [node_id]
        while stack:
            current = stack.pop()
            yield current
            for edge in reversed(self.nodes[current].edges):
                stack.extend(child for child, _ in reversed(edge.children))

    def expand_node(self, node: TreeNode, v: KnownInput) -> None:
        """Attach the surviving actions of a feasible leaf and their children."""
        assert self.spec is not None and self.dtmc is not None and node.aug is not None
        expansion = expand(self.spec, node.aug, v, self.dtmc, self.lam)
        if not expansion.actions:
            node.status = NodeStatus.DEADLOCK
            return
        node.status = NodeStatus.INTERNAL
        layer = node.layer + 1
        for action, children in zip(expansion.actions, expansion.children):
            edge = ActionEdge(action, [])
            for child in children:
                status = NodeStatus.GOAL if child.feasible else NodeStatus.INFEASIBLE
                created = self.add_node(
                    AugmentedState.of(child.state, child.s_w, layer),
                    layer,
                    node_cost(child.state),
                    status,
                    parent=node.id,
                )
                edge.children.append((created.id, child.probability))
            node.edges.append(edge)

    def to_records(self, max_nodes: Optional[int] = None) -> List[Dict[str, Any]]:
        """Breadth-first node records for a debugging dump."""
        records = []
        for layer in self.layers():
            for node_id in layer:
                if max_nodes is not None and len(records) >= max_nodes:
                    return records
                node = self.nodes[node_id]
                records.append(
                    {
                        "id": node.id,
                        "layer": node.layer,
                        "status": node.status.value,
                        "s_w": list(node.aug.s_w) if node.aug else None,
                        "omega": node.aug.x.omega.tolist() if node.aug else None,
                        "cost": node.cost,
                        "actions": [
                            {
                                "grid_index": list(edge.action.grid_index),
                                "children": [[c, p] for c, p in edge.children],
                            }
                            for edge in node.edges
                        ],
                    }
                )
        return records


def _as_wind_state(s_w: Union[int, Sequence[int]]) -> WindState:
    if isinstance(s_w, (int, np.integer)):
        return (int(s_w),)
    return tuple(int(s) for s in s_w)


def build_tree(
    spec: GridSpec,
    x0: GridState,
    s_w0: Union[int, Sequence[int]],
    v_horizon: Sequence[KnownInput],
    dtmc: WindDtmc,
    horizon: int,
    lam: int,
    penalty: float = VIOLATION_PENALTY,
) -> MdpTree:
    """Explore ``horizon`` steps from ``(x0, s_w0)``.

    ``v_horizon[l]`` is the known input at time ``x0.k + l + 1``.
    """
    if horizon < 0:
        raise ValueError(f"horizon must be non-negative, got {horizon}")
    if len(v_horizon) < horizon:
        raise ValueError(f"known inputs cover {len(v_horizon)} steps, horizon needs {horizon}")
    if lam < 2:
        raise ValueError(f"lambda must be at least 2, got {lam}")

    s_w0 = _as_wind_state(s_w0)
    tree = MdpTree(spec, dtmc, horizon, lam, list(v_horizon[:horizon]), penalty)
    root = tree.add_node(AugmentedState.of(x0, s_w0, 0), 0, node_cost(x0), NodeStatus.GOAL)
    tree.root = root.id

    frontier = [root]
    for layer in range(horizon):
        next_frontier = []
        for node in frontier:
            tree.expand_node(node, tree.v_window[layer])
            if node is root and node.status is NodeStatus.DEADLOCK:
                logger.error(f"No feasible action at the root (k={x0.k})")
                raise ActionExhaustedError(f"no feasible action at k={x0.k}", k=x0.k)
            for edge in node.edges:
                next_frontier.extend(
                    tree.nodes[c] for c, _ in edge.children if tree.nodes[c].status is NodeStatus.GOAL
                )
        frontier = next_frontier

    states, actions = tree.size()
    logger.debug(f"Built tree at k={x0.k}: {states} states, {actions} actions, horizon {horizon}")
    return tree


def shift_horizon(
    tree: MdpTree,
    executed: DiscreteAction,
    realized_sw: Union[int, Sequence[int]],
    v_new_layer: KnownInput,
) -> MdpTree:
    """Advance the tree one step in place and return it.

    The child of the root reached by ``executed`` and ``realized_sw`` becomes
    the new root, every node outside its subtree is dropped, and the feasible
    leaves of the retained subtree are expanded with ``v_new_layer``. For a
    zero-horizon tree ``v_new_layer`` is the input used to step the root.
    """
    realized_sw = _as_wind_state(realized_sw)
    root = tree.root_node

    if tree.horizon == 0:
        if root.status is not NodeStatus.GOAL:
            raise ProtocolError(f"cannot shift from a {root.status.value} root")
        tree.expand_node(root, v_new_layer)
        if root.status is NodeStatus.DEADLOCK:
            raise ActionExhaustedError(f"no feasible action at k={root.aug.x.k}", k=root.aug.x.k)
    else:
        tree.v_window = tree.v_window[1:] + [v_new_layer]

    edge = next(
        (e for e in root.edges if e.action.grid_index == executed.grid_index), None
    )
    if edge is None:
        raise ProtocolError(f"action {executed.grid_index} is not an action of the root")
    new_root_id = next(
        (c for c, _ in edge.children if tree.nodes[c].aug.s_w == realized_sw), None
    )
    if new_root_id is None:
        raise ProtocolError(f"wind state {realized_sw} is not a successor of action {executed.grid_index}")

    keep = set(tree.subtree(new_root_id))
    tree.nodes = {i: n for i, n in tree.nodes.items() if i in keep}
    tree.root = new_root_id
    tree.nodes[new_root_id].parent = None

    for node in tree.nodes.values():
        node.layer -= 1
        node.aug = AugmentedState.of(node.aug.x, node.aug.s_w, node.layer)

    if tree.horizon > 0:
        last = tree.horizon - 1
        for node in [n for n in tree.nodes.values() if n.layer == last and n.status is NodeStatus.GOAL]:
            tree.expand_node(node, v_new_layer)
        if tree.root_node.status is NodeStatus.DEADLOCK:
            k = tree.root_node.aug.x.k
            logger.error(f"No feasible action at the root after shift (k={k})")
            raise ActionExhaustedError(f"no feasible action at k={k}", k=k)

    logger.debug(f"Shifted horizon: {len(tree)} states retained or added")
    return tree


def _edges_equal(a: DiscreteAction, b: DiscreteAction) -> bool:
    return (
        a.grid_index == b.grid_index
        and a.coordinates == b.coordinates
        and a.control == b.control
    )


def payload_equal(left: MdpTree, right: MdpTree) -> bool:
    """Structural equality of two trees, ignoring node ids."""
    if left.horizon != right.horizon or len(left) != len(right):
        return False
    pairs = [(left.root, right.root)]
    while pairs:
        i, j = pairs.pop()
        a, b = left.nodes[i], right.nodes[j]
        if a.layer != b.layer or a.status is not b.status or a.cost != b.cost:
            return False
        if (a.aug is None) != (b.aug is None) or (a.aug is not None and a.aug != b.aug):
            return False
        if len(a.edges) != len(b.edges):
            return False
        for ea, eb in zip(a.edges, b.edges):
            if not _edges_equal(ea.action, eb.action) or len(ea.children) != len(eb.children):
                return False
            for (ca, pa), (cb, pb) in zip(ea.children, eb.children):
                if pa != pb:
                    return False
                pairs.append((ca, cb))
    return True
