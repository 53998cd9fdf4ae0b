import random

from joinfd.context import JoinContext
from joinfd.discovery import discover_fds, holds
from joinfd.fds import FdSet, fd, implies, minimal_cover, closure_equal
from joinfd.fixtures import FixtureProfile, make_fixture
from joinfd.infer import infer_join_fds
from joinfd.joins import JoinKind, JoinSpec, join
from joinfd.mine import discover, discover_selective
from joinfd.oracle import oracle_join_fds
from joinfd.relation import loads_csv
from joinfd.upstage import upstage


def _stage12(left, right, spec):
    context = JoinContext(left, right, spec)
    up = upstage(left, right, spec, context=context)
    sigma_l = up.left_preserved.union(up.left_upstaged)
    sigma_r = up.right_preserved.union(up.right_upstaged)
    inferred = infer_join_fds(left, right, spec, sigma_l, sigma_r, context)
    prior = FdSet()
    for d in sigma_l:
        prior.add(d.rename(context.lmap))
    for d in sigma_r:
        prior.add(d.rename(context.rmap))
    prior = prior.union(inferred.fds)
    return context, sigma_l, sigma_r, prior


def test_no_anchor_no_output_for_data_attributes():
    # the right side offers no rule determining b from its join attrs, so b
    # is never explored; only the trivially-anchored key pairing remains
    left = loads_csv("k,a\n1,x\n2,y\n1,y", name="L")
    right = loads_csv("k,b\n1,p\n1,q\n2,p\n2,q", name="R")
    got = discover(left, right, ["k"], ["k"], FdSet(), FdSet())
    assert all(d.rhs == "R.k" for d in got)


def test_proof_tables_mixed_dependency_is_mined(pair_with_join_only_fd):
    left, right, spec = pair_with_join_only_fd
    context, sigma_l, sigma_r, prior = _stage12(left, right, spec)
    got = discover_selective(left, right, spec, sigma_l, sigma_r, prior, context)
    assert fd(["L.A", "R.B"], "R.C") in got


def test_candidates_with_known_subsets_are_skipped(pair_with_join_only_fd):
    left, right, spec = pair_with_join_only_fd
    context, sigma_l, sigma_r, _ = _stage12(left, right, spec)
    prior = FdSet([fd(["L.A"], "R.C")])  # pretend a smaller rule is known
    got = discover(
        left, right, ["X"], ["Y"],
        sigma_r, prior, context=context,
    )
    assert fd(["L.A", "R.B"], "R.C") not in got


def test_mixed_anchor_skipped_when_extension_alone_works():
    # B alone determines C on the right side, so no (Y,B) anchor for C
    left = loads_csv("X,A\n0,0\n1,1", name="L")
    right = loads_csv("Y,B,C\n0,0,0\n1,0,0\n1,1,1", name="R")
    spec = JoinSpec.equi(["X"], ["Y"])
    sigma_r, _ = discover_fds(right)
    assert implies(sigma_r, fd(["B"], "C"))
    from joinfd.mine import _anchors

    anchors = _anchors(right.attr_names, ["Y"], sigma_r)
    assert ("C", frozenset(["B"])) not in anchors


def test_mined_dependencies_hold_on_the_join():
    rng = random.Random(71)
    for seed in range(30):
        prof = FixtureProfile(
            left_rows=rng.randint(6, 16), right_rows=rng.randint(6, 16),
            left_attrs=rng.randint(3, 4), right_attrs=rng.randint(3, 4),
            dangling_fraction=rng.choice([0.0, 0.3]),
            op=list(JoinKind)[seed % 6],
        )
        left, right, spec = make_fixture(prof, seed=seed)
        if spec.kind in (JoinKind.LEFT_SEMI, JoinKind.RIGHT_SEMI):
            continue
        context, sigma_l, sigma_r, prior = _stage12(left, right, spec)
        got = discover_selective(left, right, spec, sigma_l, sigma_r, prior, context)
        joined = join(left, right, spec)
        for d in got:
            assert holds(joined, d)


def test_anchor_consequence_on_mined_output():
    # for every mined dependency, the rhs-side join attributes plus the
    # rhs-side lhs part also determine the rhs on the join
    rng = random.Random(72)
    for seed in range(20):
        prof = FixtureProfile(
            left_rows=12, right_rows=12, left_attrs=3, right_attrs=3,
            dangling_fraction=0.25,
        )
        left, right, spec = make_fixture(prof, seed=seed)
        context, sigma_l, sigma_r, prior = _stage12(left, right, spec)
        got = discover_selective(left, right, spec, sigma_l, sigma_r, prior, context)
        joined = join(left, right, spec)
        for d in got:
            right_part = {a for a in d.lhs if a.startswith("R.")}
            if d.rhs.startswith("R."):
                anchor_lhs = right_part | {"R.k"}
            else:
                anchor_lhs = {a for a in d.lhs if a.startswith("L.")} | {"L.k"}
            if d.rhs in anchor_lhs:
                continue  # join-attribute rhs: the anchor is trivial
            assert holds(joined, fd(anchor_lhs, d.rhs))


def test_no_subset_redundancy_in_final_output():
    rng = random.Random(73)
    for seed in range(20):
        prof = FixtureProfile(
            left_rows=10, right_rows=10, left_attrs=3, right_attrs=3,
            dangling_fraction=0.2,
        )
        left, right, spec = make_fixture(prof, seed=seed)
        context, sigma_l, sigma_r, prior = _stage12(left, right, spec)
        mined = discover_selective(left, right, spec, sigma_l, sigma_r, prior, context)
        final = minimal_cover(prior.union(mined))
        pool = final.as_set()
        for d in pool:
            for other in pool:
                if other != d and other.rhs == d.rhs:
                    assert not other.lhs < d.lhs


def test_pipeline_stages_equal_oracle_on_random_pairs():
    rng = random.Random(74)
    for seed in range(25):
        prof = FixtureProfile(
            left_rows=rng.randint(5, 20), right_rows=rng.randint(5, 20),
            left_attrs=rng.randint(2, 4), right_attrs=rng.randint(2, 4),
            dangling_fraction=rng.choice([0.0, 0.2, 0.5]),
            duplicate_fraction=rng.choice([0.0, 0.3]),
        )
        left, right, spec = make_fixture(prof, seed=seed)
        context, sigma_l, sigma_r, prior = _stage12(left, right, spec)
        mined = discover_selective(left, right, spec, sigma_l, sigma_r, prior, context)
        assert closure_equal(
            minimal_cover(prior.union(mined)), oracle_join_fds(left, right, spec)
        )


def test_semi_joins_mine_nothing():
    left = loads_csv("k,a\n1,x\n2,y", name="L")
    right = loads_csv("k,b\n1,p", name="R")
    spec = JoinSpec.equi(["k"], ["k"], JoinKind.LEFT_SEMI)
    got = discover_selective(left, right, spec, FdSet(), FdSet(), FdSet())
    assert len(got) == 0
