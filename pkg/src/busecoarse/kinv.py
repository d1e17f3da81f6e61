"""Bookkeeping for reduced K-homology of spheres and of the boundary of X_p.

Groups are descriptors, not computations: Z, 0, finite products of Z, and
the countable product of copies of Z.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError

__all__ = [
    "ZERO",
    "Z",
    "FINITE_PRODUCT",
    "COUNTABLE_PRODUCT",
    "AbelianGroupDescriptor",
    "product",
    "sphere_k_homology",
    "xp_boundary_k",
    "xp_boundary_factors",
]

ZERO = "zero"
Z = "Z"
FINITE_PRODUCT = "finite_product"
COUNTABLE_PRODUCT = "countable_product_of_Z"


@dataclass(frozen=True)
class AbelianGroupDescriptor:
    """Canonical descriptor: a finite product holds at least two copies of Z."""

    kind: str
    factors: int = 0

    def __post_init__(self):
        if self.kind not in (ZERO, Z, FINITE_PRODUCT, COUNTABLE_PRODUCT):
            raise DomainError(f"unknown group kind {self.kind!r}")
        if self.kind == FINITE_PRODUCT and self.factors < 2:
            raise DomainError("use zero or Z for products with fewer than two factors")

    @property
    def rank(self) -> float:
        return {ZERO: 0, Z: 1, FINITE_PRODUCT: self.factors, COUNTABLE_PRODUCT: float("inf")}[self.kind]

    def to_json(self) -> dict:
        if self.kind == FINITE_PRODUCT:
            return {"kind": FINITE_PRODUCT, "factors": [{"kind": Z}] * self.factors}
        return {"kind": self.kind}

    def __str__(self) -> str:
        if self.kind == FINITE_PRODUCT:
            return "Z^" + str(self.factors)
        return {ZERO: "0", Z: "Z", COUNTABLE_PRODUCT: "prod_N Z"}[self.kind]


def _of_rank(r: int) -> AbelianGroupDescriptor:
    if r == 0:
        return AbelianGroupDescriptor(ZERO)
    if r == 1:
        return AbelianGroupDescriptor(Z)
    return AbelianGroupDescriptor(FINITE_PRODUCT, r)


def product(groups) -> AbelianGroupDescriptor:
    """Canonical product of finitely many descriptors: flattened, zeros dropped."""
    groups = list(groups)
    if any(g.kind == COUNTABLE_PRODUCT for g in groups):
        return AbelianGroupDescriptor(COUNTABLE_PRODUCT)
    return _of_rank(sum(int(g.rank) for g in groups))


def sphere_k_homology(m: int, q: int) -> AbelianGroupDescriptor:
    """Reduced K_q(S^m): Z when m and q have the same parity, else 0."""
    if int(m) != m or m < 0:
        raise DomainError(f"sphere dimension must be a nonnegative integer, got {m}")
    if q not in (0, 1):
        raise DomainError(f"degree must be 0 or 1, got {q}")
    return AbelianGroupDescriptor(Z if (m - q) % 2 == 0 else ZERO)


def xp_boundary_factors(q: int, truncate: int) -> list[int]:
    """Blocks n <= truncate whose sphere S^(n-1) contributes a Z in degree q."""
    return [n for n in range(1, truncate + 1) if sphere_k_homology(n - 1, q).kind == Z]


def xp_boundary_k(q: int, truncate: int | None = None) -> AbelianGroupDescriptor:
    """Product over blocks n of reduced K_q(S^(n-1)).

    Without ``truncate`` the product runs over all n; every other block
    contributes Z, so the result is the countable product of Z.
    """
    if q not in (0, 1):
        raise DomainError(f"degree must be 0 or 1, got {q}")
    if truncate is None:
        return AbelianGroupDescriptor(COUNTABLE_PRODUCT)
    if int(truncate) != truncate or truncate < 0:
        raise DomainError(f"truncation must be a nonnegative integer, got {truncate}")
    return product(sphere_k_homology(n - 1, q) for n in range(1, truncate + 1))
