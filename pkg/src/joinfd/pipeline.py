"""End-to-end strategies and the discovery report.

The selective strategy runs upstaging, inference, and selective mining; the
sampling strategy swaps the mining stage for micro-join sampling; the oracle
strategy materializes the join and mines it exhaustively. All strategies
produce the same report shape: dependencies in join-result names tagged with
the first stage that produced them, coverage, per-stage timings, and
materialization counters. Frugal strategies never record a full join.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .context import Counters, JoinContext
from .discovery import discover_fds
from .errors import InputError, InternalInvariantError
from .fds import Afd, FdSet, FunctionalDependency, remove_implied
from .infer import infer_join_fds
from .joins import CoverageReport, JoinKind, JoinSpec, SEMI_KINDS, coverage
from .metrics import EvalMetrics, evaluate
from .mine import discover_selective
from .oracle import oracle_join_fds
from .relation import NULL_CODE, Instance
from .sample import SampleConfig, discover_sampled
from .upstage import upstage

STRATEGIES = ("selective", "sampling", "oracle")

REPORT_SCHEMA_VERSION = 1

_ORIGIN_PRIORITY = (
    "preserved-left",
    "preserved-right",
    "upstaged-left",
    "upstaged-right",
    "inferred",
    "refined",
    "mined",
    "sampled",
)


@dataclass
class DiscoveryReport:
    strategy: str
    operator: str
    fds: FdSet
    coverage: CoverageReport
    counters: Counters
    timings: dict[str, float]
    vacuous: bool = False
    warnings: list[str] = field(default_factory=list)
    violated_fds: list[str] = field(default_factory=list)
    provenance: dict[FunctionalDependency, tuple[str, str]] = field(default_factory=dict)
    sample_rows_ratio: float | None = None

    def origin_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for d in self.fds:
            tag = self.fds.origins.get(d, "unclassified")
            counts[tag] = counts.get(tag, 0) + 1
        return counts

    def to_json(self) -> dict:
        fd_docs = []
        for d in self.fds:
            doc = d.to_json(origin=self.fds.origins.get(d))
            if d in self.provenance:
                via = self.provenance[d]
                doc["provenance"] = {"lhs_rule": via[0], "rhs_rule": via[1]}
            fd_docs.append(doc)
        doc = {
            "schema_version": REPORT_SCHEMA_VERSION,
            "strategy": self.strategy,
            "operator": self.operator,
            "vacuous": self.vacuous,
            "fd_count": len(self.fds),
            "fds": fd_docs,
            "origin_counts": self.origin_counts(),
            "coverage": self.coverage.to_json(),
            "counters": self.counters.to_json(),
            "timings": {k: round(v, 6) for k, v in self.timings.items()},
            "warnings": self.warnings,
        }
        if self.violated_fds:
            doc["violated_fds"] = self.violated_fds
        if self.sample_rows_ratio is not None:
            doc["sample_rows_ratio"] = self.sample_rows_ratio
        return doc


def classify_origins(
    final: FdSet,
    preserved_left: FdSet,
    preserved_right: FdSet,
    stage_outputs: dict[str, FdSet],
) -> FdSet:
    """Tag every final dependency with the first stage that produced it.

    Stage priority: preserved, then upstaged, then inferred/refined, then
    mined/sampled. Every member must come from somewhere; anything else is
    an internal error.
    """
    sources: dict[str, FdSet] = {
        "preserved-left": preserved_left,
        "preserved-right": preserved_right,
    }
    sources.update(stage_outputs)
    tagged = FdSet()
    for d in final:
        for tag in _ORIGIN_PRIORITY:
            pool = sources.get(tag)
            if pool is not None and d in pool:
                tagged.add(d, tag)
                break
        else:
            raise InternalInvariantError(
                f"dependency {d} in the final set has no producing stage"
            )
    return tagged


def _has_nulls(instance: Instance) -> bool:
    return any(NULL_CODE in col for col in instance.columns)


def _map_fdset(fds: FdSet, mapping: dict[str, str]) -> FdSet:
    out = FdSet()
    for d in fds:
        out.add(d.rename(mapping), fds.origins.get(d))
    return out


def _vacuous(context: JoinContext) -> bool:
    if context.spec.kind in SEMI_KINDS:
        return not context.profile.shared
    return context.result_rows() == 0


def run_pipeline(
    left: Instance,
    right: Instance,
    spec: JoinSpec,
    strategy: str = "selective",
    epsilon: float = 0.0,
    sample_cfg: SampleConfig | None = None,
    left_fds: FdSet | None = None,
    right_fds: FdSet | None = None,
    left_afds: list[Afd] | None = None,
    right_afds: list[Afd] | None = None,
    oracle_limit: int | None = None,
) -> DiscoveryReport:
    """Discover the dependencies of join(left, right, spec) per `strategy`."""
    if strategy not in STRATEGIES:
        raise InputError(f"unknown strategy {strategy!r}; pick one of {STRATEGIES}")
    context = JoinContext(left, right, spec)
    timings: dict[str, float] = {}
    started = time.perf_counter()
    cov = coverage(left, right, spec)

    if _vacuous(context):
        timings["total"] = time.perf_counter() - started
        return DiscoveryReport(
            strategy=strategy,
            operator=spec.kind.value,
            fds=FdSet(),
            coverage=cov,
            counters=context.counters,
            timings=timings,
            vacuous=True,
            warnings=["join result is empty; every dependency holds vacuously"],
        )

    if strategy == "oracle":
        t0 = time.perf_counter()
        final = oracle_join_fds(left, right, spec, limit=oracle_limit, context=context)
        timings["oracle"] = time.perf_counter() - t0
        sigma_l = left_fds if left_fds is not None else discover_fds(left)[0]
        sigma_r = right_fds if right_fds is not None else discover_fds(right)[0]
        mapped_l = _map_fdset(sigma_l, context.lmap)
        mapped_r = _map_fdset(sigma_r, context.rmap)
        tagged = FdSet()
        for d in final:
            if d in mapped_l:
                tagged.add(d, "preserved-left")
            elif d in mapped_r:
                tagged.add(d, "preserved-right")
            else:
                tagged.add(d, "mined")
        timings["total"] = time.perf_counter() - started
        return DiscoveryReport(
            strategy=strategy,
            operator=spec.kind.value,
            fds=tagged,
            coverage=cov,
            counters=context.counters,
            timings=timings,
        )

    # stage 0: single-table dependency sets
    t0 = time.perf_counter()
    if left_fds is None:
        left_fds, found_afds = discover_fds(left, epsilon)
        if epsilon > 0 and left_afds is None:
            left_afds = found_afds
    if right_fds is None:
        right_fds, found_afds = discover_fds(right, epsilon)
        if epsilon > 0 and right_afds is None:
            right_afds = found_afds
    timings["single_tables"] = time.perf_counter() - t0

    # stage 1: preserved and upstaged dependencies per side
    t0 = time.perf_counter()
    up = upstage(
        left,
        right,
        spec,
        left_fds=left_fds,
        right_fds=right_fds,
        left_afds=left_afds,
        right_afds=right_afds,
        context=context,
    )
    timings["upstage"] = time.perf_counter() - t0
    warnings: list[str] = []
    violated: list[str] = []
    for side, inst, given, survived in (
        ("left", left, left_fds, up.left_preserved),
        ("right", right, right_fds, up.right_preserved),
    ):
        sub_exists = context.side_subinstance(side) is not None
        dropped = [d for d in given if sub_exists and d not in survived]
        for d in dropped:
            violated.append(f"{side}: {d}")
            if d.lhs and not (_has_nulls(left) or _has_nulls(right)):
                raise InternalInvariantError(
                    f"preserved dependency {d} of the {side} table no longer "
                    f"holds on the join; this should be impossible without nulls"
                )
        if dropped:
            warnings.append(
                f"{len(dropped)} single-table dependencies of the {side} side "
                f"are broken by outer-join padding"
            )

    eff_left = up.left_preserved.union(up.left_upstaged)
    eff_right = up.right_preserved.union(up.right_upstaged)
    preserved_left_join = _map_fdset(up.left_preserved, context.lmap)
    preserved_right_join = _map_fdset(up.right_preserved, context.rmap)
    upstaged_left_join = _map_fdset(up.left_upstaged, context.lmap)
    upstaged_right_join = _map_fdset(up.right_upstaged, context.rmap)

    stage_outputs: dict[str, FdSet] = {
        "upstaged-left": upstaged_left_join,
        "upstaged-right": upstaged_right_join,
    }
    prior = preserved_left_join.union(
        preserved_right_join, upstaged_left_join, upstaged_right_join
    )
    provenance: dict[FunctionalDependency, tuple[str, str]] = {}

    if spec.kind not in SEMI_KINDS:
        # stage 2: inference through the join attributes
        t0 = time.perf_counter()
        inferred = infer_join_fds(left, right, spec, eff_left, eff_right, context)
        timings["infer"] = time.perf_counter() - t0
        stage_outputs["inferred"] = FdSet(
            d for d in inferred.fds if inferred.fds.origins.get(d) == "inferred"
        )
        stage_outputs["refined"] = FdSet(
            d for d in inferred.fds if inferred.fds.origins.get(d) == "refined"
        )
        provenance = inferred.provenance
        prior = prior.union(inferred.fds)

        # stage 3: remaining dependencies
        t0 = time.perf_counter()
        if strategy == "selective":
            mined = discover_selective(
                left, right, spec, eff_left, eff_right, prior, context
            )
            stage_outputs["mined"] = mined
            timings["mine"] = time.perf_counter() - t0
        else:
            cfg = sample_cfg or SampleConfig()
            sampled = discover_sampled(
                left, right, spec, eff_left, eff_right, cfg, context
            )
            stage_outputs["sampled"] = sampled
            timings["sample"] = time.perf_counter() - t0
        prior = prior.union(stage_outputs.get("mined", FdSet()))
        prior = prior.union(stage_outputs.get("sampled", FdSet()))

    final = remove_implied(prior)
    tagged = classify_origins(
        final, preserved_left_join, preserved_right_join, stage_outputs
    )
    if context.counters.full_join_rows:
        raise InternalInvariantError(
            "a frugal strategy materialized the full join; refusing to report"
        )
    ratio = None
    if strategy == "sampling":
        denom = context.result_rows()
        if denom is None:  # semi-join: bounded by the matched kept rows
            prof = context.profile
            counts = (
                prof.left_counts
                if spec.kind is JoinKind.LEFT_SEMI
                else prof.right_counts
            )
            denom = sum(counts[v] for v in prof.shared)
        ratio = (context.counters.sample_join_rows / denom) if denom else 0.0
    warnings.extend(context.warnings)
    timings["total"] = time.perf_counter() - started
    return DiscoveryReport(
        strategy=strategy,
        operator=spec.kind.value,
        fds=tagged,
        coverage=cov,
        counters=context.counters,
        timings=timings,
        warnings=warnings,
        violated_fds=violated,
        provenance={d: p for d, p in provenance.items() if d in tagged},
        sample_rows_ratio=ratio,
    )


def run_left_deep(
    tables: list[Instance],
    specs: list[JoinSpec],
    strategy: str = "selective",
    epsilon: float = 0.0,
    sample_cfg: SampleConfig | None = None,
) -> DiscoveryReport:
    """Chain binary joins left-deep: ((t0 ? t1) ? t2) ...

    Each intermediate join is materialized so the next binary step has a
    left input; its dependency cover is carried forward, skipping
    single-table rediscovery. Counters and timings accumulate into the
    final report.
    """
    from .discovery import holds
    from .joins import join

    if len(tables) < 2 or len(specs) != len(tables) - 1:
        raise InputError("left-deep run needs n tables and n-1 join specs")
    current = tables[0]
    current_fds: FdSet | None = None
    report: DiscoveryReport | None = None
    carried_rows = 0
    carried_time = 0.0
    for step, (nxt, spec) in enumerate(zip(tables[1:], specs)):
        report = run_pipeline(
            current,
            nxt,
            spec,
            strategy=strategy,
            epsilon=epsilon,
            sample_cfg=sample_cfg,
            left_fds=current_fds,
        )
        report.counters.partial_join_rows += carried_rows
        report.timings["total"] += carried_time
        if step < len(specs) - 1:
            current = join(current, nxt, spec)
            carried_rows = report.counters.partial_join_rows + current.row_count
            carried_time = report.timings["total"]
            # a sampled cover may overclaim; keep only what the materialized
            # intermediate actually satisfies
            current_fds = FdSet(d for d in report.fds if holds(current, d))
    assert report is not None
    return report


def compare_to_oracle(
    left: Instance, right: Instance, spec: JoinSpec, report: DiscoveryReport
) -> EvalMetrics:
    """Precision/recall of a report against the materialized ground truth."""
    truth = oracle_join_fds(left, right, spec)
    return evaluate(report.fds, truth)
