import random

from joinfd.discovery import discover_fds, holds, next_level_candidates
from joinfd.fds import FdSet, fd
from joinfd.relation import loads_csv, take_rows

from conftest import brute_force_fds, random_instance


def test_holds_is_vacuous_on_tiny_instances():
    one = loads_csv("a,b\n1,2")
    assert holds(one, fd(["a"], "b"))
    assert holds(take_rows(one, []), fd(["a"], "b"))


def test_holds_on_proof_table():
    right = loads_csv("Y,B,C\n0,0,0\n1,0,0\n1,1,1\n2,1,0")
    assert holds(right, fd(["Y", "B"], "C"))
    assert not holds(right, fd(["B"], "C"))


def test_holds_on_joined_proof_tables():
    joined = loads_csv(
        "X,A,B,C\n0,0,0,0\n1,0,0,0\n1,0,1,1\n1,1,0,0\n1,1,1,1\n2,2,1,0"
    )
    assert holds(joined, fd(["A", "B"], "C"))


def test_empty_lhs_means_constant_column():
    inst = loads_csv("a,b\nx,1\nx,2")
    assert holds(inst, fd([], "a"))
    assert not holds(inst, fd([], "b"))


def test_key_determines_everything():
    inst = loads_csv("k,a,b\n1,x,p\n2,x,q\n3,y,p\n4,z,z")
    exact, _ = discover_fds(inst)
    for other in ("a", "b"):
        assert fd(["k"], other) in exact


def test_proof_table_exact_set():
    right = loads_csv("Y,B,C\n0,0,0\n1,0,0\n1,1,1\n2,1,0")
    exact, afds = discover_fds(right, 0.0)
    assert exact == {fd(["Y", "B"], "C"), fd(["Y", "C"], "B")}
    assert afds == []


def test_matches_brute_force_enumeration():
    rng = random.Random(21)
    for _ in range(40):
        inst = random_instance(
            rng, n_attrs=rng.randint(2, 5), n_rows=rng.randint(2, 30)
        )
        exact, _ = discover_fds(inst)
        assert exact == brute_force_fds(inst)


def test_soundness_and_minimality():
    rng = random.Random(22)
    for _ in range(40):
        inst = random_instance(rng, n_attrs=4)
        exact, _ = discover_fds(inst)
        for d in exact:
            assert holds(inst, d)
            for a in d.lhs:
                assert not holds(inst, fd(d.lhs - {a}, d.rhs))


def test_afd_degree_one_in_five_rows():
    inst = loads_csv("flag,date\n1,d1\n1,d1\n0,d7\n0,d7\n0,d9")
    exact, afds = discover_fds(inst, epsilon=0.2)
    entries = [a for a in afds if a.fd == fd(["flag"], "date")]
    assert len(entries) == 1
    assert entries[0].degree == 1
    assert entries[0].error == 0.2


def test_afds_minimal_under_budget():
    rng = random.Random(25)
    for _ in range(30):
        inst = random_instance(rng, n_attrs=3, n_rows=rng.randint(4, 15))
        _, afds = discover_fds(inst, epsilon=0.3)
        budget = {a.fd for a in afds}
        for a in afds:
            assert 0 < a.error <= 0.3
            for attr in a.fd.lhs:
                smaller = fd(a.fd.lhs - {attr}, a.fd.rhs)
                assert smaller not in budget


def test_exact_results_unaffected_by_epsilon():
    rng = random.Random(26)
    for _ in range(25):
        inst = random_instance(rng, n_attrs=4)
        with_eps, _ = discover_fds(inst, epsilon=0.25)
        without, _ = discover_fds(inst, epsilon=0.0)
        assert with_eps == without


def test_next_level_of_nothing_is_nothing():
    assert next_level_candidates([], FdSet()) == []


def test_next_level_joins_singletons():
    got = next_level_candidates([fd(["A"], "c"), fd(["B"], "c")], FdSet())
    assert got == [fd(["A", "B"], "c")]


def test_next_level_respects_pruning():
    pruned = FdSet([fd(["A"], "c")])
    got = next_level_candidates([fd(["A"], "c"), fd(["B"], "c")], pruned)
    assert got == []


def test_vacuous_instance_reports_constants():
    inst = take_rows(loads_csv("a,b\n1,2"), [])
    exact, _ = discover_fds(inst)
    assert exact == {fd([], "a"), fd([], "b")}
