"""Offspring distributions of recursive contraction algorithms."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from core.errors import GraphError
from core.random_source import RandomSource

POLICY_KINDS = ("geometric", "lambda_mixture", "fixed")


def p_n(n: int) -> float:
    """Lower bound 1 - 2/n on the survival probability of one contraction."""
    if n < 2:
        raise GraphError(f"p_n needs n >= 2, got {n}")
    return 1 - 2 / n


def p_n_exact(n: int) -> Fraction:
    if n < 2:
        raise GraphError(f"p_n needs n >= 2, got {n}")
    return Fraction(n - 2, n)


def tuned_mixture(n: int) -> tuple[int, Fraction]:
    """(k, λ) such that k calls w.p. λ and k+1 calls w.p. 1-λ give mean 1/p_n.

    k = ceil(1/p_n) - 1 and λ = k + 1 - 1/p_n. For n >= 5 this is k = 1,
    λ = (n-4)/(n-2); n = 4 gives two calls and n = 3 three.
    """
    if n < 3:
        raise GraphError(f"the tuned mixture needs n >= 3, got {n}")
    inverse = Fraction(n, n - 2)
    k = -(-n // (n - 2)) - 1
    return k, k + 1 - inverse


@dataclass(frozen=True)
class BranchingPolicy:
    """How many recursive calls a node of size n makes.

    geometric       k ~ Geometric(p_n), P[k] = p_n (1 - p_n)^(k-1)
    lambda_mixture  k calls w.p. λ, k+1 calls w.p. 1-λ; tuned per n unless
                    ``base_calls`` and ``weight`` pin them
    fixed           always ``base_calls`` calls
    """

    kind: str
    base_calls: int | None = None
    weight: float | None = None

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise ValueError(f"unknown policy kind {self.kind!r}")
        if self.kind == "fixed" and (self.base_calls is None or self.base_calls < 1):
            raise ValueError("fixed policy needs base_calls >= 1")
        if self.kind == "lambda_mixture":
            if (self.base_calls is None) != (self.weight is None):
                raise ValueError("lambda_mixture pins both base_calls and weight, or neither")
            if self.weight is not None and not 0 <= self.weight <= 1:
                raise ValueError(f"mixture weight must lie in [0, 1], got {self.weight}")
            if self.base_calls is not None and self.base_calls < 1:
                raise ValueError("lambda_mixture needs base_calls >= 1")

    @classmethod
    def geometric(cls) -> BranchingPolicy:
        return cls("geometric")

    @classmethod
    def tuned(cls) -> BranchingPolicy:
        return cls("lambda_mixture")

    @classmethod
    def fixed(cls, calls: int) -> BranchingPolicy:
        return cls("fixed", base_calls=calls)

    def mixture(self, n: int) -> tuple[int, float]:
        if self.kind != "lambda_mixture":
            raise ValueError(f"{self.kind} policy has no mixture")
        if self.base_calls is not None:
            return self.base_calls, self.weight
        k, lam = tuned_mixture(n)
        return k, float(lam)

    def draw(self, n: int, rng: RandomSource) -> int:
        if self.kind == "geometric":
            return rng.geometric(p_n(n))
        if self.kind == "fixed":
            return self.base_calls
        k, lam = self.mixture(n)
        return k if rng.uniform() < lam else k + 1

    def mean_offspring(self, n: int) -> float:
        if self.kind == "geometric":
            return 1 / p_n(n)
        if self.kind == "fixed":
            return float(self.base_calls)
        k, lam = self.mixture(n)
        return lam * k + (1 - lam) * (k + 1)

    def expected_calls(self, n: int) -> float:
        """Expected size of a recursion tree rooted at size n, root included.

        A node of size k has mean_offspring(k) children of size k-1; leaves
        sit at size 2.
        """
        if n < 2:
            raise GraphError(f"a recursion tree needs n >= 2, got {n}")
        level = total = 1.0
        for k in range(n, 2, -1):
            level *= self.mean_offspring(k)
            total += level
        return total

    def offspring_distribution(self, n: int, k_max: int = 64) -> dict[int, float]:
        """a_k for k = 1..k_max (the geometric tail beyond k_max is dropped)."""
        if self.kind == "geometric":
            p = p_n(n)
            return {k: p * (1 - p) ** (k - 1) for k in range(1, k_max + 1)}
        if self.kind == "fixed":
            return {self.base_calls: 1.0}
        k, lam = self.mixture(n)
        table = {}
        if lam > 0:
            table[k] = lam
        if lam < 1:
            table[k + 1] = 1 - lam
        return table
