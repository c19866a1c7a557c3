"""Backward induction on the exploration tree."""

import logging
from typing import Dict

from ..models.mdp import DiscreteAction, Strategy
from .tree import MdpTree, NodeStatus

logger = logging.getLogger(__name__)

TIE_TOLERANCE = 1e-12


def solve(tree: MdpTree) -> Strategy:
    """Minimal expected cost-to-go and the strategy attaining it.

    Feasible leaves are worth their own cost, violating leaves and dead ends
    the tree's penalty. An internal node adds its cost to the best expected
    child value; ties go to the first action in grid-index order.
    """
    value: Dict[int, float] = {}
    actions: Dict[int, DiscreteAction] = {}

    for layer in reversed(tree.layers()):
        for node_id in layer:
            node = tree.nodes[node_id]
            if node.status is NodeStatus.GOAL:
                value[node_id] = node.cost
            elif node.status in (NodeStatus.INFEASIBLE, NodeStatus.DEADLOCK):
                value[node_id] = tree.penalty
            else:
                expected = []
                for edge in node.edges:
                    total = 0.0
                    for child, prob in edge.children:
                        total += prob * value[child]
                    expected.append(total)
                best = min(expected)
                threshold = best + TIE_TOLERANCE * abs(best)
                choice = next(i for i, q in enumerate(expected) if q <= threshold)
                actions[node_id] = node.edges[choice].action
                value[node_id] = node.cost + expected[choice]

    logger.debug(f"Solved tree with {len(tree)} states, root value {value[tree.root]:.6g}")
    return Strategy.model_construct(root=tree.root, actions=actions, value=value)
