import numpy as np
import pytest

from bentparts.analysis import analyze
from bentparts.depth_search import admissible_size_vectors, search
from bentparts.errors import BudgetExceededError, DomainError
from bentparts.fields import SpaceDescriptor
from bentparts.partitions import Partition, preimage_partition, verify_definitional
from bentparts.transform import FunctionTable

from conftest import mm_vectorial


def test_admissible_vectors_frozen():
    # every union of K/2 cells must be a bent level set (size 8 +- 2 at n=4)
    assert admissible_size_vectors(4, 2) == [(6, 10)]
    assert admissible_size_vectors(4, 4) == [(1, 5, 5, 5), (3, 3, 3, 7)]
    assert admissible_size_vectors(4, 6) == [(2, 2, 2, 2, 2, 6)]
    assert admissible_size_vectors(4, 8) == []
    with pytest.raises(DomainError):
        admissible_size_vectors(4, 5)
    with pytest.raises(DomainError):
        admissible_size_vectors(3, 4)


def test_search_n2_matches_function_oracle():
    found, stats = search(2, 2)
    sp = SpaceDescriptor.vector(2, 2)
    oracle = set()
    for mask in range(16):
        vals = [(mask >> x) & 1 for x in range(4)]
        f = FunctionTable.scalar(sp, vals)
        if analyze(f).is_bent:
            part, dropped = preimage_partition(f)
            if dropped == 0:
                oracle.add(part.canonical_key())
    assert {p.canonical_key() for p in found} == oracle
    assert len(found) == 4


def test_search_k6_empty():
    found, stats = search(4, 6)
    assert found == []
    assert stats.completed_candidates == 0


def test_search_k4_contains_mm_witness(F4):
    found, _ = search(4, 4)
    assert len(found) == 14336
    mm = mm_vectorial(F4)
    part, _ = preimage_partition(mm)
    witness = Partition(SpaceDescriptor.vector(2, 4), [c for c in part.cells])
    keys = {p.canonical_key() for p in found}
    assert witness.canonical_key() in keys
    # every returned partition passes the definitional check independently
    rng = np.random.default_rng(0)
    for i in rng.integers(0, len(found), 25):
        assert verify_definitional(found[int(i)]).is_bent_partition
    # no non-power-of-2 depth ever comes back
    assert all(p.depth == 4 for p in found)
    # both admissible size profiles occur
    profiles = {tuple(sorted(len(c) for c in p.cells)) for p in found}
    assert profiles == {(1, 5, 5, 5), (3, 3, 3, 7)}


def test_filter_disabled_same_results_k2():
    a, _ = search(4, 2)
    b, _ = search(4, 2, use_size_filter=False)
    assert {p.canonical_key() for p in a} == {p.canonical_key() for p in b}
    assert len(a) == 448


def test_budget_and_resume():
    with pytest.raises(BudgetExceededError) as e:
        search(2, 2, budget=5)
    token = e.value.resume_token
    resumed, _ = search(2, 2, resume=token)
    full, _ = search(2, 2)
    assert {p.canonical_key() for p in resumed} <= {p.canonical_key() for p in full}
    with pytest.raises(DomainError):
        search(4, 4, resume=token)  # token belongs to another search


def test_search_rejects_bad_parameters():
    with pytest.raises(DomainError):
        search(3, 2)
    with pytest.raises(DomainError):
        search(6, 4)
    with pytest.raises(DomainError):
        search(4, 5)


@pytest.mark.slow
def test_filter_disabled_same_results_k4():
    a, _ = search(4, 4)
    b, _ = search(4, 4, use_size_filter=False, budget=200_000_000)
    assert {p.canonical_key() for p in a} == {p.canonical_key() for p in b}
