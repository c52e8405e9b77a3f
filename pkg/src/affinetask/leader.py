"""Leader choice on second-subdivision vertices, restricted to a query set.

For a vertex v of the task complex and a query set Q containing v's color,
the leader map picks the smallest process of Q inside a distinguished view:
the smallest critical carrier intersecting Q when v's second-round view has
critical members touching Q, otherwise the smallest plain carrier of a seen
vertex intersecting Q. "Smallest" is by inclusion; candidate carriers inside
one view always form a chain and this is asserted, never tie-broken.
"""
from __future__ import annotations

from itertools import combinations
from typing import Iterable

from .adversary import Adversary, AgreementFunction, agreement_function, require_fair
from .affine import AffineTask, _CriticalCache, build_r_a
from .complexes import Simplex, Vertex
from .reports import VerificationReport
from .subdivision import carrier, view2_simplex


class LeaderError(ValueError):
    pass


def _inclusion_min(candidates: Iterable[frozenset[int]], what: str) -> frozenset[int]:
    sets = sorted(set(candidates), key=lambda s: (len(s), sorted(s)))
    if not sets:
        raise LeaderError(f"no candidate for {what}")
    for a, b in zip(sets, sets[1:]):
        if not a <= b:
            raise LeaderError(f"{what} candidates are not a chain: "
                              f"{sorted(a)} vs {sorted(b)}")
    return sets[0]


def delta_q(v: Vertex, Q: Iterable[int], alpha: AgreementFunction) -> frozenset[int]:
    """Colors of the smallest critical carrier in v's second-round view
    that intersects Q."""
    Q = frozenset(Q)
    crit = _CriticalCache(alpha)
    cands = [carrier(theta, "s").colors
             for theta in crit(view2_simplex(v)).cs
             if carrier(theta, "s").colors & Q]
    return _inclusion_min(cands, "delta")


def gamma_q(v: Vertex, Q: Iterable[int]) -> frozenset[int]:
    """Colors of the smallest carrier of a vertex seen in round two
    that intersects Q."""
    Q = frozenset(Q)
    cands = [u.payload.colors for u in view2_simplex(v)
             if u.payload.colors & Q]
    return _inclusion_min(cands, "gamma")


def mu_q(v: Vertex, Q: Iterable[int], alpha: AgreementFunction) -> int:
    """The elected process of Q for vertex v."""
    Q = frozenset(Q)
    if v.color not in Q:
        raise LeaderError(f"own color {v.color} must belong to Q={sorted(Q)}")
    crit = _CriticalCache(alpha)
    data = crit(view2_simplex(v))
    if data.csv_colors & Q:
        pool = delta_q(v, Q, alpha)
    else:
        pool = gamma_q(v, Q)
    eligible = pool & Q
    if not eligible:
        raise LeaderError(f"chosen view {sorted(pool)} misses Q={sorted(Q)}")
    return min(eligible)


# --- property sweeps ----------------------------------------------------------


def _all_queries(n: int, containing: int | None = None) -> list[frozenset[int]]:
    universe = sorted(range(1, n + 1))
    out = []
    for k in range(1, n + 1):
        for combo in combinations(universe, k):
            Q = frozenset(combo)
            if containing is None or containing in Q:
                out.append(Q)
    return out


def _task_for(adv: Adversary, task: AffineTask | None) -> AffineTask:
    if task is None:
        return build_r_a(adv)
    return task


def _queries_for(n: int, queries: Iterable[frozenset[int]] | None,
                 containing: int | None = None) -> list[frozenset[int]]:
    if queries is None:
        return _all_queries(n, containing=containing)
    picked = [frozenset(Q) for Q in queries]
    if containing is not None:
        picked = [Q for Q in picked if containing in Q]
    return picked


def verify_mu_validity(adv: Adversary, task: AffineTask | None = None,
                       queries: Iterable[frozenset[int]] | None = None
                       ) -> VerificationReport:
    """mu lands in Q and in the processes the vertex has seen."""
    require_fair(adv)
    task = _task_for(adv, task)
    alpha = task.alpha or agreement_function(adv)
    report = VerificationReport(kind="mu_validity")
    for v in sorted(task.complex.vertices, key=lambda u: u.uid):
        seen = carrier(v, "s").colors
        for Q in _queries_for(adv.n, queries, containing=v.color):
            leader = mu_q(v, Q, alpha)
            report.checked += 1
            if leader not in Q or leader not in seen:
                report.add(vertex=v.uid, Q=sorted(Q), leader=leader,
                           seen=sorted(seen))
    return report


def verify_mu_agreement(adv: Adversary, task: AffineTask | None = None,
                        queries: Iterable[frozenset[int]] | None = None
                        ) -> VerificationReport:
    """Faces inside Q elect at most alpha(carrier colors) distinct leaders."""
    require_fair(adv)
    task = _task_for(adv, task)
    alpha = task.alpha or agreement_function(adv)
    report = VerificationReport(kind="mu_agreement")
    queries = _queries_for(adv.n, queries)
    top = task.complex.dim
    for facet in task.complex.sorted_facets():
        if facet.dim != top:
            continue
        for size in range(1, len(facet.vertices) + 1):
            for combo in combinations(facet.vertices, size):
                theta = Simplex(combo)
                limit = alpha(carrier(theta, "s").colors)
                for Q in queries:
                    if not theta.colors <= Q:
                        continue
                    leaders = {mu_q(v, Q, alpha) for v in theta}
                    report.checked += 1
                    if len(leaders) > limit:
                        report.add(theta=list(theta.uids), Q=sorted(Q),
                                   leaders=sorted(leaders), limit=limit)
    return report


def verify_mu_robustness(adv: Adversary, task: AffineTask | None = None,
                         queries: Iterable[frozenset[int]] | None = None
                         ) -> VerificationReport:
    """Restricting Q to the processes the vertex saw leaves mu unchanged."""
    require_fair(adv)
    task = _task_for(adv, task)
    alpha = task.alpha or agreement_function(adv)
    report = VerificationReport(kind="mu_robustness")
    for v in sorted(task.complex.vertices, key=lambda u: u.uid):
        seen = carrier(v, "s").colors
        for Q in _queries_for(adv.n, queries, containing=v.color):
            full = mu_q(v, Q, alpha)
            restricted = mu_q(v, seen & Q, alpha)
            report.checked += 1
            if full != restricted:
                report.add(vertex=v.uid, Q=sorted(Q), leader=full,
                           restricted_leader=restricted)
    return report


def verify_leader(adv: Adversary, task: AffineTask | None = None,
                  queries: Iterable[frozenset[int]] | None = None
                  ) -> list[VerificationReport]:
    task = _task_for(adv, task)
    return [
        verify_mu_validity(adv, task, queries),
        verify_mu_agreement(adv, task, queries),
        verify_mu_robustness(adv, task, queries),
    ]
