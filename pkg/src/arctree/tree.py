"""Speculative corrector tree: node state, coloring, paths, pruning.

Each node owns one corrector sequence seeded by a predictor step of
length h_init along a unit direction from its parent's iterate.  Nodes
are colored after every corrector round:

  GREEN   converged (residual within tolerance),
  YELLOW  nearly converged (residual^gamma within tolerance),
  BLACK   diverging (iteration cap exceeded, or insufficient residual
          decay between consecutive iterates),
  RED     still in progress.

Pruning removes BLACK subtrees, then keeps at most one GREEN-or-YELLOW
child per node, chosen by comparing arclength gained per corrector
iteration along the best fully converged chain against the best chain
that still needs one more iteration at its tip.  RED children always
survive pruning; they may still become the fastest route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .params import RunParams

Array = np.ndarray

# Displacements shorter than this give no usable secant direction.
SECANT_FLOOR = 1e-14

# Factor applied to a node's base step, together with the scaling spread,
# after every one of its speculative children has diverged.
STEP_BACKOFF = 0.9


class Color(Enum):
    GREEN = "green"
    YELLOW = "yellow"
    RED = "red"
    BLACK = "black"


class DegenerateSecantError(ValueError):
    """Corrector displacement too short to define a direction."""


@dataclass(eq=False)
class TreeNode:
    """State of one speculative corrector sequence.

    zeta is the current iterate; z_init and t_init are the seed point and
    unit seed direction, so at spawn time zeta = z_init + h_init * t_init.
    For the current root, t_init holds the stored traversal tangent used
    to seed new children.  nu counts corrector iterations applied to this
    node; nu_init records the parent's iteration count at spawn time.
    h_base is the adaptive base step scaled to seed this node's children
    and only shrinks when all of them diverge.  residual_norm_previous is
    None exactly while nu == 0.
    """

    zeta: Array
    z_init: Array
    t_init: Array
    h_init: float
    h_base: float
    nu: int = 0
    nu_init: int = 0
    color: Color = Color.RED
    residual_norm_current: float = math.inf
    residual_norm_previous: float | None = None
    children: list["TreeNode"] = field(default_factory=list)


@dataclass
class PathMetrics:
    """Arclength gain and iteration cost of one root-down chain.

    length sums the seed step magnitudes of every node on the chain.
    cost is the number of synchronized corrector rounds the chain has
    consumed, accumulated leaf-up: a node's cost is its own iteration
    count or the cost of the chain below it aged by that child's spawn
    round, whichever is larger.
    """

    length: float
    cost: int
    nodes: list[TreeNode]


def assign_color(node: TreeNode, params: RunParams) -> Color:
    """Classify a corrector sequence from its residual history.

    Rules apply in order: converged, nearly converged, diverging, still
    running.  A nearly converged sequence is never declared diverging.
    Before the first iteration only the iteration-cap part of the
    divergence rule can apply, since there is no previous residual.
    """
    r = node.residual_norm_current
    if r <= params.tol_residual:
        return Color.GREEN
    if r**params.gamma <= params.tol_residual:
        return Color.YELLOW
    if node.nu > params.max_iter:
        return Color.BLACK
    if (
        node.nu >= 1
        and node.residual_norm_previous is not None
        and r > params.mu * node.residual_norm_previous
    ):
        return Color.BLACK
    return Color.RED


def secant_direction(node: TreeNode) -> Array:
    """Unit direction from the node's seed point to its current iterate.

    Raises DegenerateSecantError when the displacement norm is below
    SECANT_FLOOR; callers fall back to the node's seed direction.
    """
    d = node.zeta - node.z_init
    norm = float(np.linalg.norm(d))
    if norm < SECANT_FLOOR:
        raise DegenerateSecantError("corrector displacement is numerically zero")
    return d / norm


def iter_nodes(root: TreeNode):
    """Yield nodes in depth-first preorder, children in stored order."""
    stack = [root]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children))


def node_depths(root: TreeNode) -> dict[TreeNode, int]:
    """Depth of every node, root at depth 0."""
    depths = {root: 0}
    queue = [root]
    while queue:
        node = queue.pop(0)
        for child in node.children:
            depths[child] = depths[node] + 1
            queue.append(child)
    return depths


def breadth_first_leaves(root: TreeNode) -> list[TreeNode]:
    """Leaves in breadth-first order, used to schedule spawning."""
    leaves = []
    queue = [root]
    while queue:
        node = queue.pop(0)
        if not node.children:
            leaves.append(node)
        queue.extend(node.children)
    return leaves


def _path_table(
    root: TreeNode,
) -> dict[TreeNode, tuple[PathMetrics | None, PathMetrics | None]]:
    """Best valid and viable chains rooted at every node, in one pass.

    A chain is valid when every node on it is GREEN and viable when every
    node is GREEN or YELLOW.  Best means largest summed seed length, with
    ties broken toward the smaller cost and then toward the earlier
    child.  Computed bottom-up so each node extends its children's best
    chains by its own seed step.
    """
    table: dict[TreeNode, tuple[PathMetrics | None, PathMetrics | None]] = {}

    def visit(node: TreeNode) -> None:
        for child in node.children:
            visit(child)

        def best_chain(own_ok: bool, pick_valid: bool) -> PathMetrics | None:
            if not own_ok:
                return None
            best = PathMetrics(abs(node.h_init), node.nu, [node])
            for child in node.children:
                sub = table[child][0 if pick_valid else 1]
                if sub is None:
                    continue
                length = abs(node.h_init) + sub.length
                cost = max(node.nu, sub.cost + child.nu_init)
                if length > best.length or (
                    length == best.length and cost < best.cost
                ):
                    best = PathMetrics(length, cost, [node] + sub.nodes)
            return best

        valid = best_chain(node.color is Color.GREEN, True)
        viable = best_chain(node.color in (Color.GREEN, Color.YELLOW), False)
        table[node] = (valid, viable)

    visit(root)
    return table


def compute_paths(
    node: TreeNode,
) -> tuple[PathMetrics | None, PathMetrics | None]:
    """Best valid and best viable chain rooted at node.

    Either entry is None when no such chain exists; a RED node roots
    neither kind, a YELLOW node roots no valid chain.  A lone qualifying
    node forms a one-node chain.
    """
    return _path_table(node)[node]


def choose_best_path(
    valid: PathMetrics | None, viable: PathMetrics | None
) -> PathMetrics | None:
    """Pick between a fully converged chain and a nearly converged one.

    Compares arclength per corrector round.  The viable chain is charged
    one extra round for the pending iteration at its YELLOW tip.  A
    zero-cost valid chain counts as infinitely fast, and all ties go to
    the valid side.  A missing contender loses by default.
    """
    if valid is None:
        return viable
    if viable is None:
        return valid
    rate_valid = (
        math.inf if valid.cost == 0 else valid.length / valid.cost
    )
    rate_viable = viable.length / (viable.cost + 1)
    return valid if rate_valid >= rate_viable else viable


def reduce_base_step(node: TreeNode, scalings: tuple[float, ...]) -> None:
    """Shrink a node's base step after all of its children diverged.

    The new base is STEP_BACKOFF times the ratio of the smallest to the
    largest scaling times the old base, so the next batch of children is
    seeded strictly inside the span the failed batch covered.
    """
    node.h_base *= STEP_BACKOFF * min(scalings) / max(scalings)


def prune_tree(root: TreeNode, params: RunParams) -> None:
    """Drop diverged subtrees, then thin redundant converged branches.

    Stage 1 deletes every subtree rooted at a BLACK node; any node whose
    children were all deleted this way gets its base step reduced before
    it respawns.  Stage 2 walks the remaining tree once, top down, using
    chain metrics computed beforehand: at each node the best viable chain
    fixes a candidate child to keep; if some other child roots an
    all-GREEN alternative chain, the faster of the two (per
    choose_best_path) wins.  Every GREEN or YELLOW child off the chosen
    chain is deleted with its subtree.  RED children are always kept.
    """

    def drop_black(node: TreeNode) -> None:
        if not node.children:
            return
        kept = [c for c in node.children if c.color is not Color.BLACK]
        if not kept:
            node.children = []
            reduce_base_step(node, params.scalings)
            return
        node.children = kept
        for child in kept:
            drop_black(child)

    drop_black(root)

    table = _path_table(root)

    def thin(node: TreeNode) -> None:
        keep = None
        viable = table[node][1]
        if viable is not None and len(viable.nodes) >= 2:
            viable_child = viable.nodes[1]
            alternative = None
            for child in node.children:
                if child is viable_child or child.color is not Color.GREEN:
                    continue
                sub = table[child][0]
                if sub is None:
                    continue
                length = abs(node.h_init) + sub.length
                cost = max(node.nu, sub.cost + child.nu_init)
                candidate = PathMetrics(length, cost, [node] + sub.nodes)
                if alternative is None or (
                    candidate.length,
                    -candidate.cost,
                ) > (alternative.length, -alternative.cost):
                    alternative = candidate
            best = viable
            if alternative is not None:
                best = choose_best_path(alternative, viable)
            keep = best.nodes[1]
        node.children = [
            c for c in node.children if c is keep or c.color is Color.RED
        ]
        for child in node.children:
            thin(child)

    thin(root)


def count_nodes(root: TreeNode) -> int:
    return sum(1 for _ in iter_nodes(root))
