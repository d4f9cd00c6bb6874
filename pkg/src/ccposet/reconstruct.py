"""Recover the block sizes of a finite-dimensional C*-algebra from a poset of
its commutative subalgebras.

The steps: least element and pairwise meets, maximal elements, their meet
(the centre), the unique rank function, then the interval from the centre to
a maximal element, split into directly indecomposable factors whose heights
are the nontrivial block sizes.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np

from . import io
from .lattice import BoundedLattice, Factorization, NotALattice, factorize
from .partitions import DEFAULT_GUARD, AlgebraSpec, GuardExceeded, csubalgebra_poset
from .poset import (FinitePoset, height, interval, is_order_isomorphic, least_element,
                    maximal_elements, meet_all, meet_table, rank_function)


class FailureStage(str, Enum):
    NOT_MEET_CLOSED = "not_meet_closed"
    NO_LEAST = "no_least"
    NOT_GRADED = "not_graded"
    INTERVAL_NOT_LATTICE = "interval_not_lattice"
    FACTOR_NOT_PARTITION_LIKE = "factor_not_partition_like"
    INCONSISTENT_MAXIMALS = "inconsistent_maximals"


@dataclass
class ReconstructionReport:
    spec: AlgebraSpec | None = None
    k: int | None = None
    maximal_count: int | None = None
    maximal_elements: tuple[int, ...] = ()
    center_element: int | None = None
    center_rank: int | None = None
    maximal_rank: int | None = None
    factor_heights: tuple[int, ...] = ()
    strict_factor_iso: tuple[bool, ...] | None = None
    failure_stage: FailureStage | None = None
    message: str = ""
    ranks: tuple[int, ...] | None = None
    seed_maximal: int | None = None
    factor_posets: tuple[FinitePoset, ...] = field(default=(), repr=False)

    @property
    def ok(self) -> bool:
        return self.failure_stage is None

    def to_json(self) -> dict[str, Any]:
        return {
            "ok": self.ok,
            "spec": None if self.spec is None else self.spec.to_json(),
            "k": self.k,
            "maximal_count": self.maximal_count,
            "maximal_elements": list(self.maximal_elements),
            "center_element": self.center_element,
            "center_rank": self.center_rank,
            "maximal_rank": self.maximal_rank,
            "seed_maximal": self.seed_maximal,
            "factor_heights": list(self.factor_heights),
            "strict_factor_iso": None if self.strict_factor_iso is None else list(self.strict_factor_iso),
            "failure_stage": None if self.failure_stage is None else self.failure_stage.value,
            "message": self.message,
            "ranks": None if self.ranks is None else list(self.ranks),
            "factors": [io.poset_to_json(f) for f in self.factor_posets],
        }


def _fail(report: ReconstructionReport, stage: FailureStage, message: str) -> ReconstructionReport:
    report.failure_stage = stage
    report.message = message
    return report


def _factor_interval(p: FinitePoset, lo: int, hi: int) -> Factorization:
    return factorize(BoundedLattice(interval(p, lo, hi)))


def reconstruct(p: FinitePoset, strict: bool = False,
                guard: int = DEFAULT_GUARD) -> ReconstructionReport:
    """Read the block sizes off ``p``; failures are recorded, never raised.

    With ``strict`` every factor is also compared against the partition
    lattice of its height, the factorization is repeated above every
    maximal element, and every maximal element's down-set is compared
    against the partition lattice on ``N`` points.
    """
    if p.size == 0:
        raise ValueError("cannot reconstruct from an empty poset")
    report = ReconstructionReport()
    bottom = least_element(p)
    if bottom is None:
        return _fail(report, FailureStage.NO_LEAST, "poset has no least element")
    meets = meet_table(p)
    if (meets < 0).any():
        a, b = map(int, np.argwhere(meets < 0)[0])
        return _fail(report, FailureStage.NOT_MEET_CLOSED,
                     f"elements {p.label(a)!r} and {p.label(b)!r} have no meet")

    maxima = maximal_elements(p)
    report.maximal_elements = maxima
    report.maximal_count = len(maxima)
    center = meet_all(p, maxima)
    report.center_element = center

    ranks = rank_function(p)
    if ranks is None:
        return _fail(report, FailureStage.NOT_GRADED, "poset admits no rank function")
    report.ranks = ranks
    k = ranks[center]
    report.center_rank = report.k = k

    top_ranks = {ranks[m] for m in maxima}
    if len(top_ranks) != 1:
        return _fail(report, FailureStage.INCONSISTENT_MAXIMALS,
                     f"maximal elements have different ranks {sorted(top_ranks)}")
    report.maximal_rank = top_ranks.pop()

    seed = maxima[0]
    report.seed_maximal = seed
    try:
        fac = _factor_interval(p, center, seed)
    except NotALattice as exc:
        return _fail(report, FailureStage.INTERVAL_NOT_LATTICE, str(exc))
    heights = tuple(sorted(fac.heights, reverse=True))
    report.factor_heights = heights
    report.factor_posets = tuple(f.poset for f in fac.factors)

    if len(heights) > k or any(h < 2 for h in heights):
        return _fail(report, FailureStage.FACTOR_NOT_PARTITION_LIKE,
                     f"{len(heights)} nontrivial factors cannot fit {k} blocks")
    spec = AlgebraSpec(heights + (1,) * (k - len(heights)))

    if strict:
        verdicts = []
        for f in fac.factors:
            h = height(f.poset)
            try:
                model = csubalgebra_poset(h, guard)
            except GuardExceeded:
                verdicts.append(False)
                continue
            verdicts.append(is_order_isomorphic(f.poset, model) is not None)
        report.strict_factor_iso = tuple(verdicts)
        if not all(verdicts):
            return _fail(report, FailureStage.FACTOR_NOT_PARTITION_LIKE,
                         "a factor is not isomorphic to a partition lattice")
        for m in maxima[1:]:
            try:
                other = _factor_interval(p, center, m)
            except NotALattice as exc:
                return _fail(report, FailureStage.INTERVAL_NOT_LATTICE, str(exc))
            if tuple(sorted(other.heights, reverse=True)) != heights:
                return _fail(report, FailureStage.INCONSISTENT_MAXIMALS,
                             f"factor heights above {p.label(m)!r} differ from those above {p.label(seed)!r}")

    if spec.N != report.maximal_rank:
        return _fail(report, FailureStage.INCONSISTENT_MAXIMALS,
                     f"block sizes sum to {spec.N} but maximal rank is {report.maximal_rank}")
    if strict:
        # a maximal commutative subalgebra is a copy of C^N, so its down-set must be
        # the whole partition lattice; this also catches single-maximum impostors
        try:
            model = csubalgebra_poset(spec.N, guard)
        except GuardExceeded as exc:
            return _fail(report, FailureStage.FACTOR_NOT_PARTITION_LIKE, str(exc))
        for m in maxima:
            down = np.flatnonzero(p.le[:, m])
            if is_order_isomorphic(p.induced(down), model) is None:
                return _fail(report, FailureStage.FACTOR_NOT_PARTITION_LIKE,
                             f"down-set of {p.label(m)!r} is not the partition lattice on {spec.N} points")
    report.spec = spec
    return report


def integer_partitions(n: int, largest: int | None = None):
    """Partitions of ``n`` as descending tuples, in reverse lexicographic order."""
    if n == 0:
        yield ()
        return
    largest = n if largest is None else largest
    for first in range(min(n, largest), 0, -1):
        for rest in integer_partitions(n - first, first):
            yield (first,) + rest


def specs_up_to(n_max: int, guard: int = DEFAULT_GUARD) -> list[AlgebraSpec]:
    """Every spec with ``sum(sizes) = N`` for ``N = 1..n_max``."""
    if n_max > guard:
        raise GuardExceeded(f"n_max {n_max} exceeds guard {guard}")
    return [AlgebraSpec(s) for n in range(1, n_max + 1) for s in integer_partitions(n)]
