"""Gauss-Legendre rules on [0, 1] for the coupling-constant integral."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_S_NODES = 64


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights on [0, 1]."""

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def count(self) -> int:
        return self.nodes.shape[0]


def gauss_legendre(n: int = DEFAULT_S_NODES) -> QuadratureRule:
    """n-point Gauss-Legendre rule mapped from [-1, 1] to [0, 1].

    The symmetric raw rule integrates s exactly, so sum(w * s) = 1/2 to
    rounding; several bounds downstream rely on that.
    """
    if n < 1:
        raise ValueError("need at least one node")
    x, w = np.polynomial.legendre.leggauss(n)
    return QuadratureRule(nodes=(x + 1.0) / 2.0, weights=w / 2.0)


def as_rule(rule) -> QuadratureRule:
    """Accept a QuadratureRule, a node count, or None (package default)."""
    if rule is None:
        return gauss_legendre(DEFAULT_S_NODES)
    if isinstance(rule, QuadratureRule):
        if np.any(rule.nodes < 0.0) or np.any(rule.nodes > 1.0):
            raise ValueError("quadrature nodes must lie in [0, 1]")
        return rule
    if isinstance(rule, (int, np.integer)):
        return gauss_legendre(int(rule))
    raise TypeError(f"cannot interpret {rule!r} as a quadrature rule")
