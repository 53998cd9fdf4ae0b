"""Shared fixtures and independent brute-force oracles.

The oracles here deliberately avoid the library's partition/lattice
machinery: they enumerate subsets and scan decoded rows with dictionaries,
so they can serve as ground truth for it.
"""

from itertools import combinations

import pytest

from joinfd.fds import FdSet, FunctionalDependency
from joinfd.joins import JoinSpec
from joinfd.relation import Instance, loads_csv


@pytest.fixture
def pair_with_join_only_fd():
    """The 4-row pair whose join satisfies a dependency neither side implies.

    On the right table alone exactly {Y,B -> C} and {Y,C -> B} hold; the
    equi-join on X=Y has six rows and additionally satisfies {A,B -> C},
    which no amount of reasoning over the two tables separately can derive.
    """
    left = loads_csv("X,A\n0,0\n1,0\n1,1\n2,2", name="L")
    right = loads_csv("Y,B,C\n0,0,0\n1,0,0\n1,1,1\n2,1,0", name="R")
    return left, right, JoinSpec.equi(["X"], ["Y"])


def brute_force_fds(instance: Instance) -> FdSet:
    """All minimal dependencies by exhaustive candidate enumeration."""
    rows = instance.raw_rows()
    names = list(instance.attr_names)
    idx = {a: i for i, a in enumerate(names)}

    def fd_holds(lhs, rhs) -> bool:
        seen = {}
        for row in rows:
            key = tuple(row[idx[a]] for a in lhs)
            value = row[idx[rhs]]
            if seen.setdefault(key, value) != value:
                return False
        return True

    out = FdSet()
    for rhs in names:
        others = [a for a in names if a != rhs]
        minimal: list[frozenset] = []
        for size in range(len(others) + 1):
            for combo in combinations(others, size):
                lhs = frozenset(combo)
                if any(small <= lhs for small in minimal):
                    continue
                if fd_holds(combo, rhs):
                    minimal.append(lhs)
                    out.add(FunctionalDependency(lhs, rhs))
    return out


def brute_force_min_removals(instance: Instance, lhs, rhs) -> int:
    """Smallest number of rows to delete so lhs -> rhs holds; exhaustive."""
    rows = instance.raw_rows()
    names = list(instance.attr_names)
    idx = {a: i for i, a in enumerate(names)}

    def ok(kept_rows) -> bool:
        seen = {}
        for row in kept_rows:
            key = tuple(row[idx[a]] for a in lhs)
            if seen.setdefault(key, row[idx[rhs]]) != row[idx[rhs]]:
                return False
        return True

    n = len(rows)
    for k in range(n + 1):
        for removal in combinations(range(n), k):
            kept = [rows[i] for i in range(n) if i not in set(removal)]
            if ok(kept):
                return k
    return n


def model_implies(base, candidate, universe) -> bool:
    """Model-theoretic implication via closed attribute sets.

    A two-row counterexample instance exists exactly when some set closed
    under `base` contains the candidate's lhs but not its rhs.
    """
    attrs = list(universe)
    for size in range(len(attrs) + 1):
        for combo in combinations(attrs, size):
            s = set(combo)
            closed = all(not (d.lhs <= s) or d.rhs in s for d in base)
            if closed and candidate.lhs <= s and candidate.rhs not in s:
                return False
    return True


def random_instance(rng, n_attrs=None, n_rows=None, name="T") -> Instance:
    n_attrs = n_attrs or rng.randint(2, 4)
    n_rows = n_rows or rng.randint(2, 20)
    names = [f"c{i}" for i in range(n_attrs)]
    domains = [rng.randint(1, max(2, n_rows // 2)) for _ in range(n_attrs)]
    rows = [
        [f"v{rng.randrange(domains[i])}" for i in range(n_attrs)]
        for _ in range(n_rows)
    ]
    return Instance.from_rows(names, rows, name=name)
