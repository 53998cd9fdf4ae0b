"""Stage 3: mine the remaining join dependencies on partial joins only.

An attribute b can be the rhs of a still-unknown join dependency only if the
rhs side's join attributes (possibly together with some side-local set A')
determine b on the join. Every anchored rhs is explored level-wise over lhs
candidates drawn from the opposite side's non-join attributes, each candidate
validated on a narrow partial join rather than the full result. Candidates
implied by previously established dependencies are skipped, and a lhs
attribute is dropped from the alphabet once it can no longer contribute.
"""

from __future__ import annotations

from itertools import combinations
from typing import Sequence

from .context import JoinContext
from .fds import (
    FdSet,
    FunctionalDependency,
    attribute_closure,
    implies,
    remove_implied,
)
from .joins import JoinSpec, SEMI_KINDS
from .relation import Instance


def _anchors(
    j_attrs: Sequence[str],
    y_attrs: Sequence[str],
    sigma_j: FdSet,
    assume_all_anchored: bool = False,
) -> list[tuple[str, frozenset[str]]]:
    """(rhs, side-local lhs extension) pairs licensed by the rhs side.

    A pure anchor needs the join attributes alone to determine b; a mixed
    anchor needs Y together with A', where A' alone must not determine b.
    Read through the closure of the side's dependency set.

    With `assume_all_anchored` the Y-determination requirement is waived:
    when a null join value matches outer padding, a dependency can hold
    without its anchor, so every extension must stay on the table.
    """
    y_set = frozenset(y_attrs)
    out: list[tuple[str, frozenset[str]]] = []
    for b in j_attrs:  # join attributes are themselves trivially anchored
        if assume_all_anchored or b in attribute_closure(y_set, sigma_j):
            out.append((b, frozenset()))
        # the extension may include join attributes: under outer padding an
        # lhs carrying them is not equivalent to its rewritten form
        others = [a for a in j_attrs if a != b]
        for size in range(1, len(others) + 1):
            for combo in combinations(others, size):
                ext = frozenset(combo)
                if b in attribute_closure(ext, sigma_j):
                    continue  # the extension alone already determines b
                if assume_all_anchored or b in attribute_closure(
                    y_set | ext, sigma_j
                ):
                    out.append((b, ext))
    out.sort(key=lambda t: (t[0], len(t[1]), tuple(sorted(t[1]))))
    return out


def _padding_shadows_anchors(context: JoinContext, j_is_left: bool) -> bool:
    """Can outer padding on the rhs side agree with one of its data rows?

    Null cells let a data row coincide with the all-null padding row on
    some column subset, so a dependency can hold on the join while the
    join attributes do not determine its rhs. Anchor pruning is then
    unsafe and the whole candidate lattice stays open.
    """
    pads = context.pads_left() if j_is_left else context.pads_right()
    if not pads:
        return False
    side = context.left if j_is_left else context.right
    from .relation import NULL_CODE

    return any(NULL_CODE in column for column in side.columns)


def _next_lhs_level(survivors: list[frozenset[str]]) -> list[frozenset[str]]:
    tuples = sorted({tuple(sorted(s)) for s in survivors})
    out = []
    for i, a in enumerate(tuples):
        for b in tuples[i + 1 :]:
            if a[:-1] != b[:-1]:
                break
            out.append(frozenset(a) | {b[-1]})
    return sorted(set(out), key=lambda s: tuple(sorted(s)))


def discover(
    instance_i: Instance,
    instance_j: Instance,
    x_attrs: Sequence[str],
    y_attrs: Sequence[str],
    sigma_j: FdSet,
    sigma_prior: FdSet,
    context: JoinContext | None = None,
    i_plausible_rhs: frozenset[str] | None = None,
) -> FdSet:
    """Mine dependencies with lhs from side I and anchored rhs from side J.

    `sigma_j` holds on side J's join row set, in side-local names;
    `sigma_prior` is everything already established, in join-result names.
    The default context treats I as the left input of an inner join.
    """
    if context is None:
        context = JoinContext(instance_i, instance_j, JoinSpec.equi(x_attrs, y_attrs))
    i_is_left = instance_i is context.left
    i_map = context.lmap if i_is_left else context.rmap
    j_map = context.rmap if i_is_left else context.lmap
    out = FdSet()
    prior_pool = list(sigma_prior)
    anchors = _anchors(
        instance_j.attr_names,
        y_attrs,
        sigma_j,
        assume_all_anchored=_padding_shadows_anchors(context, j_is_left=not i_is_left),
    )
    for b, ext in anchors:
        rhs = j_map[b]
        ext_mapped = frozenset(j_map[a] for a in ext)
        # own join attributes stay in the alphabet: with outer padding a
        # dependency on them is not interchangeable with the other side's
        alphabet = list(instance_i.attr_names)
        level = [frozenset([a]) for a in alphabet]
        while level:
            survivors = []
            blocked = {a: True for a in alphabet}
            for lhs_i in level:
                if not set(lhs_i) <= set(alphabet):
                    continue
                cand = FunctionalDependency(
                    frozenset(i_map[a] for a in lhs_i) | ext_mapped, rhs
                )
                if cand.rhs in cand.lhs:
                    continue
                if implies(prior_pool + list(out), cand):
                    continue
                if context.check_fd(cand):
                    out.add(cand, "mined")
                else:
                    survivors.append(lhs_i)
                    for a in lhs_i:
                        blocked[a] = False
            if i_plausible_rhs is not None:
                alphabet = [
                    a
                    for a in alphabet
                    if a in i_plausible_rhs or not blocked.get(a, False)
                ]
            level = [
                s for s in _next_lhs_level(survivors) if set(s) <= set(alphabet)
            ]
    return out


def discover_selective(
    left: Instance,
    right: Instance,
    spec: JoinSpec,
    sigma_left: FdSet,
    sigma_right: FdSet,
    sigma_prior: FdSet,
    context: JoinContext | None = None,
) -> FdSet:
    """Mine both directions; returns only the newly mined dependencies.

    `sigma_left` / `sigma_right` are each side's join-level dependency sets
    in side-local names; `sigma_prior` is the established set in join names.
    """
    if context is None:
        context = JoinContext(left, right, spec)
    if spec.kind in SEMI_KINDS:
        return FdSet()
    plausible_left = frozenset(
        b for b, _ in _anchors(left.attr_names, spec.left_on, sigma_left)
    )
    plausible_right = frozenset(
        b for b, _ in _anchors(right.attr_names, spec.right_on, sigma_right)
    )
    first = discover(
        left,
        right,
        spec.left_on,
        spec.right_on,
        sigma_right,
        sigma_prior,
        context=context,
        i_plausible_rhs=plausible_left,
    )
    prior_plus = sigma_prior.union(first)
    second = discover(
        right,
        left,
        spec.right_on,
        spec.left_on,
        sigma_left,
        prior_plus,
        context=context,
        i_plausible_rhs=plausible_right,
    )
    mined = FdSet()
    kept = remove_implied(sigma_prior.union(first, second))
    for d in first.union(second):
        if d in kept:
            mined.add(d, "mined")
    return mined
