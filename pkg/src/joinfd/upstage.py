"""Stage 1: dependencies that become exact once the join filters rows out.

A dependency that almost holds on one table holds exactly on the join result
whenever every row violating it dangles (its join value has no partner on the
other side). The approximate-input path checks precisely that; the discovery
path re-mines the filtered table, pruning everything the already-known
dependencies imply.

Sides that an outer operator preserves are never filtered, so they cannot
upstage anything; sides that an outer operator pads with nulls are checked
against the padded row set so that nothing broken by padding slips through.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

from .context import JoinContext
from .discovery import discover_fds, discover_new_fds, holds
from .errors import InputError
from .fds import Afd, FdSet, FunctionalDependency, remove_implied
from .joins import JoinKind, JoinSpec
from .partition import violating_tuples
from .relation import Instance, select_by_values

_FILTERED_SIDES = {
    JoinKind.INNER: ("left", "right"),
    JoinKind.LEFT_SEMI: ("left",),
    JoinKind.RIGHT_SEMI: ("right",),
    JoinKind.LEFT_OUTER: ("right",),
    JoinKind.RIGHT_OUTER: ("left",),
    JoinKind.FULL_OUTER: (),
}


@dataclass
class UpstageStats:
    rows_filtered_left: int = 0
    rows_filtered_right: int = 0
    afds_checked: int = 0
    afds_promoted: int = 0
    preserved_dropped: int = 0

    def to_json(self) -> dict:
        return dict(self.__dict__)


@dataclass
class UpstageResult:
    left_upstaged: FdSet
    right_upstaged: FdSet
    stats: UpstageStats
    # dependencies of each input table still holding on the join, in side-
    # local names; the effective base the later stages reason from
    left_preserved: FdSet = field(default_factory=FdSet)
    right_preserved: FdSet = field(default_factory=FdSet)


def upstaged_fds(
    instance: Instance,
    other: Instance,
    on: Sequence[str],
    other_on: Sequence[str],
    known: FdSet | Iterable[FunctionalDependency],
) -> FdSet:
    """New minimal dependencies appearing after the inner-join filter.

    Keeps only rows whose join value occurs on the other side, then mines,
    pruning candidates implied by `known`. Returns empty when nothing was
    filtered out.
    """
    own_values = set(_decoded_keys(instance, on))
    other_values = set(_decoded_keys(other, other_on))
    keep_codes = _codes_for(instance, on, own_values & other_values)
    filtered = select_by_values(instance, on, keep_codes)
    if filtered.row_count >= instance.row_count:
        return FdSet()
    return discover_new_fds(filtered, known)


def upstaged_afds(
    instance: Instance,
    other: Instance,
    on: Sequence[str],
    other_on: Sequence[str],
    afds: Sequence[Afd],
) -> FdSet:
    """Promote each approximate dependency whose violators all dangle."""
    other_values = set(_decoded_keys(other, other_on))
    own_keys = _decoded_keys(instance, on)
    promoted = []
    for afd in afds:
        violators = violating_tuples(instance, afd.fd)
        if not violators.tuple_ids:
            raise InputError(
                f"{afd.fd} is exact on {instance.name!r}; not an approximate input"
            )
        if all(own_keys[t] not in other_values for t in violators.tuple_ids):
            promoted.append(afd.fd)
    return remove_implied(promoted)


def _decoded_keys(instance: Instance, on: Sequence[str]) -> list[tuple]:
    return instance.key_column([instance.ordinal(a) for a in on])


def _codes_for(instance: Instance, on: Sequence[str], values: set) -> set[tuple]:
    ords = [instance.ordinal(a) for a in on]
    cols = [instance.columns[o] for o in ords]
    keys = _decoded_keys(instance, on)
    return {
        tuple(col[r] for col in cols)
        for r in range(instance.row_count)
        if keys[r] in values
    }


def _validate_exact(instance: Instance, fds: FdSet) -> None:
    for d in fds:
        if not holds(instance, d):
            raise InputError(
                f"provided dependency {d} does not hold on {instance.name!r}"
            )


def _minimize_on(instance: Instance, d: FunctionalDependency) -> list[FunctionalDependency]:
    """Minimal lhs variants of `d` on `instance`, smallest size level only."""
    attrs = sorted(d.lhs)
    for size in range(len(attrs)):
        found = [
            FunctionalDependency(frozenset(sub), d.rhs)
            for sub in combinations(attrs, size)
            if holds(instance, FunctionalDependency(frozenset(sub), d.rhs))
        ]
        if found:
            return found
    return [d]


def upstage(
    left: Instance,
    right: Instance,
    spec: JoinSpec,
    left_fds: FdSet | None = None,
    right_fds: FdSet | None = None,
    left_afds: Sequence[Afd] | None = None,
    right_afds: Sequence[Afd] | None = None,
    validate: bool = True,
    context: JoinContext | None = None,
) -> UpstageResult:
    """Run the upstaging stage on both sides of the join.

    Per side: with approximate inputs the promotion path runs; with exact
    inputs (provided or computed) the discovery path runs; with both, the
    promotion path runs first and the discovery path prunes with the union.
    Promoted dependencies are lhs-minimized against the surviving rows so
    every emitted dependency is minimal on the join.
    """
    if context is None:
        context = JoinContext(left, right, spec)
    profile = context.profile
    stats = UpstageStats()
    stats.rows_filtered_left = (
        sum(profile.left_counts[v] for v in profile.dangling_left)
        if "left" in _FILTERED_SIDES[spec.kind]
        else 0
    )
    stats.rows_filtered_right = (
        sum(profile.right_counts[v] for v in profile.dangling_right)
        if "right" in _FILTERED_SIDES[spec.kind]
        else 0
    )
    out: dict[str, FdSet] = {}
    preserved: dict[str, FdSet] = {}
    for side, inst, other, afds, fds in (
        ("left", left, right, left_afds, left_fds),
        ("right", right, left, right_afds, right_fds),
    ):
        run_discovery_path = not afds or fds is not None
        if fds is None:
            fds, _ = discover_fds(inst)
        elif validate:
            _validate_exact(inst, fds)
        sub = context.side_subinstance(side)
        if sub is None:  # dropped side of a semi-join
            out[side] = FdSet()
            preserved[side] = FdSet()
            continue
        padded = context.pads_left() if side == "left" else context.pads_right()
        survivors = (
            FdSet(d for d in fds if holds(sub, d)) if padded else FdSet(fds.as_set())
        )
        stats.preserved_dropped += len(fds) - len(survivors)
        preserved[side] = survivors
        if not padded and sub.row_count == inst.row_count:
            out[side] = FdSet()  # join value sets preserved: nothing to upstage
            continue
        new = FdSet()
        if afds:
            own_on = spec.left_on if side == "left" else spec.right_on
            other_on = spec.right_on if side == "left" else spec.left_on
            promoted = upstaged_afds(inst, other, own_on, other_on, afds)
            stats.afds_checked += len(afds)
            stats.afds_promoted += len(promoted)
            for d in promoted:
                if holds(sub, d):  # padding may break a promotion
                    for minimal in _minimize_on(sub, d):
                        new.add(minimal)
        if run_discovery_path:
            known = survivors.union(new)
            for d in discover_new_fds(sub, known):
                new.add(d)
        out[side] = remove_implied(new)
    left_up, right_up = FdSet(), FdSet()
    for d in out["left"]:
        left_up.add(d, "upstaged-left")
    for d in out["right"]:
        right_up.add(d, "upstaged-right")
    return UpstageResult(
        left_upstaged=left_up,
        right_upstaged=right_up,
        stats=stats,
        left_preserved=preserved["left"],
        right_preserved=preserved["right"],
    )
