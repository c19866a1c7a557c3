"""Finite-horizon MDP construction and solution."""

from .actions import (
    Child,
    Expansion,
    action_box,
    expand,
    feasible_actions,
    reduced_dimension,
    storage_box,
)
from .solver import solve
from .tree import (
    VIOLATION_PENALTY,
    ActionEdge,
    MdpTree,
    NodeStatus,
    TreeNode,
    build_tree,
    node_cost,
    payload_equal,
    shift_horizon,
)

__all__ = [
    "VIOLATION_PENALTY",
    "ActionEdge",
    "Child",
    "Expansion",
    "MdpTree",
    "NodeStatus",
    "TreeNode",
    "action_box",
    "build_tree",
    "expand",
    "feasible_actions",
    "node_cost",
    "payload_equal",
    "reduced_dimension",
    "shift_horizon",
    "solve",
    "storage_box",
]
