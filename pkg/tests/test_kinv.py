import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from busecoarse.errors import DomainError
from busecoarse.kinv import (
    COUNTABLE_PRODUCT,
    AbelianGroupDescriptor,
    product,
    sphere_k_homology,
    xp_boundary_factors,
    xp_boundary_k,
)
from oracles import reduced_k_rank_sphere


def test_sphere_examples():
    assert sphere_k_homology(1, 1).kind == "Z"
    assert sphere_k_homology(0, 1).kind == "zero"
    assert sphere_k_homology(2, 0).kind == "Z"


@given(st.integers(0, 60), st.sampled_from([0, 1]))
def test_parity_matches_suspension_recursion(m, q):
    assert sphere_k_homology(m, q).rank == reduced_k_rank_sphere(m, q)
    assert sphere_k_homology(m + 2, q) == sphere_k_homology(m, q)


@pytest.mark.parametrize("q", [0, 1])
def test_boundary_is_countable_product(q):
    g = xp_boundary_k(q)
    assert g.kind == COUNTABLE_PRODUCT
    assert g.to_json() == {"kind": "countable_product_of_Z"}


def test_truncation():
    assert xp_boundary_factors(0, 4) == [1, 3]
    assert xp_boundary_factors(1, 4) == [2, 4]
    g = xp_boundary_k(0, truncate=4)
    assert g.kind == "finite_product" and g.rank == 2
    assert g.to_json() == {"kind": "finite_product", "factors": [{"kind": "Z"}, {"kind": "Z"}]}
    assert xp_boundary_k(0, truncate=1).kind == "Z"
    assert xp_boundary_k(1, truncate=1).kind == "zero"


@pytest.mark.parametrize("q", [0, 1])
def test_truncations_grow_without_bound(q):
    # half of the blocks contribute in each degree, so the rank has no ceiling
    ranks = [xp_boundary_k(q, truncate=2 * N).rank for N in range(1, 30)]
    assert ranks == list(range(1, 30))


def test_product_canonical_form():
    z, zero = AbelianGroupDescriptor("Z"), AbelianGroupDescriptor("zero")
    assert product([zero, zero]) == zero
    assert product([z, zero]) == z
    assert product([z, z, zero, z]).rank == 3
    assert product([z, xp_boundary_k(0)]).kind == COUNTABLE_PRODUCT
    assert json.loads(json.dumps(product([z, z]).to_json()))["kind"] == "finite_product"


def test_errors():
    with pytest.raises(DomainError):
        sphere_k_homology(-1, 0)
    with pytest.raises(DomainError):
        sphere_k_homology(2, 2)
    with pytest.raises(DomainError):
        xp_boundary_k(3)
    with pytest.raises(DomainError):
        AbelianGroupDescriptor("finite_product", 1)
