"""Exhaustive checker for the two-round snapshot protocol with a
criticality-gated wait phase.

Protocol per process, against shared write-once registers IS1[], IS2[] and
monotone counters Conc[]:

  1. propose the input to the first snapshot object, obtain a view
  2. write the view to IS1[i]
  3. wait until  crit or rank < conc, where (one atomic scan)
       crit = alpha(IS1[i]) > alpha(IS1[i] - {j : IS1[j] == IS1[i]})
       rank = |{j in IS1[i] : IS2[j] empty and IS1[j] != IS1[i]}|
       conc = max(alpha(IS1[i]), max_j Conc[j])
  4. propose IS1[i] to the second snapshot object, obtain a view
  5. write the view to IS2[i]
  6. if alpha(IS1[i]) > alpha(IS1[i] - {j : IS1[j] == IS1[i] and IS2[j] nonempty}):
       Conc[i] <- alpha(IS1[i])        (same atomic step)
     return IS2[i]

Snapshot objects are driven by the scheduler: an invocation joins the pending
set, and a commit event moves any nonempty pending subset into the next block;
a committed process's view is the union of all blocks up to its own. Crashes
are allowed from the moment a process's value is committed until it returns,
and their number stays below the adversary's agreement level of the (fixed)
participation set.

States pack into one int: 5 bits per process (3 progress + crashed + conc
written), a pending mask per object, and n blocks of n bits per object.
"""
from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Iterator, Sequence

from .adversary import Adversary, agreement_function
from .affine import AffineTask
from .bits import colors_of, iter_bits, mask_of, popcount
from .complexes import Simplex
from .reports import VerificationReport
from .subdivision import chr2_complex, chr_vertex, standard_simplex

DEFAULT_STATE_CAP = 10_000_000
STATE_CAP_ENV = "AFFINE_STATE_CAP"

# progress values (low 3 bits of each process slot)
IDLE, INV1, GOT1, WROTE1, INV2, GOT2, WROTE2, DONE = range(8)

# coarse program-counter names for traces and reports
PC_NAMES = {IDLE: "Init", INV1: "Init", GOT1: "Init", WROTE1: "Waiting",
            INV2: "Waiting", GOT2: "Waiting", WROTE2: "AfterIS2", DONE: "Done"}


class SimulationError(ValueError):
    pass


class StateCapExceeded(RuntimeError):
    pass


def state_cap_from_env() -> int:
    raw = os.environ.get(STATE_CAP_ENV)
    if raw is None:
        return DEFAULT_STATE_CAP
    try:
        cap = int(raw)
        if cap < 1:
            raise ValueError
    except ValueError:
        raise SimulationError(f"{STATE_CAP_ENV} must be a positive integer, got {raw!r}")
    return cap


def wait_predicate(alpha_table: Sequence[int], V: int, reg_is1: Sequence[int],
                   is2_written: Sequence[bool], conc: Sequence[int]) -> bool:
    """The wait-phase guard over one register snapshot. Pure.

    reg_is1[j] is 0 while IS1[j] is unwritten; V is the caller's own view.
    """
    same = 0
    for j, r in enumerate(reg_is1):
        if r == V:
            same |= 1 << j
    if alpha_table[V] > alpha_table[V & ~same]:
        return True
    rank = 0
    for j in iter_bits(V):
        if not is2_written[j] and reg_is1[j] != V:
            rank += 1
    return rank < max(alpha_table[V], max(conc, default=0))


def finish_predicate(alpha_table: Sequence[int], V: int, reg_is1: Sequence[int],
                     is2_written: Sequence[bool]) -> bool:
    """The concurrency-update guard at return time. Pure."""
    removed = 0
    for j, r in enumerate(reg_is1):
        if r == V and is2_written[j]:
            removed |= 1 << j
    return alpha_table[V] > alpha_table[V & ~removed]


@dataclass
class Exploration:
    participation: frozenset[int]
    fault_budget: int
    state_count: int
    terminals: list[int]
    parents: dict[int, tuple[int, tuple]] | None = None


class ProtocolModel:
    """State space of one participation set of one adversary."""

    def __init__(self, adv: Adversary, participation: Iterable[int] | None = None,
                 fault_budget: int | None = None,
                 max_states: int = DEFAULT_STATE_CAP):
        self.adv = adv
        self.n = adv.n
        self.alpha = agreement_function(adv)
        self.alpha_table = self.alpha.table
        part = (frozenset(participation) if participation is not None
                else frozenset(range(1, self.n + 1)))
        if not part <= frozenset(range(1, self.n + 1)):
            raise SimulationError(f"participation {sorted(part)} outside 1..{self.n}")
        self.participation = part
        self.pmask = mask_of(part)
        if self.alpha.of_mask(self.pmask) < 1:
            raise SimulationError(
                f"participation {sorted(part)} has agreement level 0; nothing can run")
        if fault_budget is None:
            fault_budget = self.alpha.of_mask(self.pmask) - 1
        self.fault_budget = fault_budget
        self.max_states = max_states
        n = self.n
        self._off_fpend = 5 * n
        self._off_spend = 5 * n + n
        self._off_fblk = 5 * n + 2 * n
        self._off_sblk = 5 * n + 2 * n + n * n

    # --- packed-state helpers -------------------------------------------

    def _prog(self, state: int, i: int) -> int:
        return (state >> (5 * i)) & 7

    def _crashed_mask(self, state: int) -> int:
        m = 0
        for i in range(self.n):
            if (state >> (5 * i + 3)) & 1:
                m |= 1 << i
        return m

    def _blocks(self, state: int, off: int) -> list[int]:
        n = self.n
        out = []
        for j in range(n):
            blk = (state >> (off + j * n)) & ((1 << n) - 1)
            if not blk:
                break
            out.append(blk)
        return out

    def decode(self, state: int) -> dict:
        """Readable snapshot of a packed state, for traces and debugging."""
        n = self.n
        procs = {}
        fb = self._blocks(state, self._off_fblk)
        sb = self._blocks(state, self._off_sblk)
        is1 = self._is1_views(fb)
        for i in range(n):
            if not (self.pmask >> i) & 1:
                continue
            prog = self._prog(state, i)
            procs[i + 1] = {
                "pc": "Crashed" if (state >> (5 * i + 3)) & 1 else PC_NAMES[prog],
                "progress": prog,
                "is1": sorted(colors_of(is1[i])) if prog >= WROTE1 else None,
                "is2_written": prog >= WROTE2,
                "conc": self.alpha_table[is1[i]] if (state >> (5 * i + 4)) & 1 else 0,
            }
        return {
            "participation": sorted(self.participation),
            "first_blocks": [sorted(colors_of(b)) for b in fb],
            "second_blocks": [sorted(colors_of(b)) for b in sb],
            "first_pending": sorted(colors_of((state >> self._off_fpend) & ((1 << n) - 1))),
            "second_pending": sorted(colors_of((state >> self._off_spend) & ((1 << n) - 1))),
            "processes": procs,
        }

    def _is1_views(self, fblocks: list[int]) -> list[int]:
        """Per-process first-round view mask (0 if not committed)."""
        views = [0] * self.n
        prefix = 0
        for blk in fblocks:
            prefix |= blk
            for i in iter_bits(blk):
                views[i] = prefix
        return views

    def _registers(self, state: int):
        """(prog, reg_is1, is2_written, conc) register arrays of a state."""
        n = self.n
        fb = self._blocks(state, self._off_fblk)
        is1 = self._is1_views(fb)
        prog = [self._prog(state, i) for i in range(n)]
        reg_is1 = [is1[i] if prog[i] >= WROTE1 else 0 for i in range(n)]
        is2_written = [prog[i] >= WROTE2 for i in range(n)]
        conc = [self.alpha_table[is1[i]] if (state >> (5 * i + 4)) & 1 else 0
                for i in range(n)]
        return prog, is1, reg_is1, is2_written, conc

    # --- transitions ------------------------------------------------------

    def initial_state(self) -> int:
        return 0

    def successors(self, state: int) -> list[tuple[tuple, int]]:
        """(event, next_state) pairs; crash events come last."""
        n = self.n
        prog, is1, reg_is1, is2_written, conc = self._registers(state)
        crashed = self._crashed_mask(state)
        fpend = (state >> self._off_fpend) & ((1 << n) - 1)
        spend = (state >> self._off_spend) & ((1 << n) - 1)
        out: list[tuple[tuple, int]] = []

        for i in range(n):
            bit = 1 << i
            if not (self.pmask & bit) or (crashed & bit):
                continue
            p = prog[i]
            if p == IDLE:
                s2 = (state & ~(7 << (5 * i))) | (INV1 << (5 * i)) | (bit << self._off_fpend)
                out.append((("step", i + 1), s2))
            elif p == GOT1:
                out.append((("step", i + 1), self._set_prog(state, i, WROTE1)))
            elif p == WROTE1:
                if wait_predicate(self.alpha_table, is1[i], reg_is1, is2_written, conc):
                    s2 = self._set_prog(state, i, INV2) | (bit << self._off_spend)
                    out.append((("step", i + 1), s2))
            elif p == GOT2:
                out.append((("step", i + 1), self._set_prog(state, i, WROTE2)))
            elif p == WROTE2:
                s2 = self._set_prog(state, i, DONE)
                if finish_predicate(self.alpha_table, is1[i], reg_is1, is2_written):
                    s2 |= 1 << (5 * i + 4)
                out.append((("step", i + 1), s2))

        out.extend(self._commits(state, fpend, self._off_fblk, self._off_fpend,
                                 "commit1", GOT1))
        out.extend(self._commits(state, spend, self._off_sblk, self._off_spend,
                                 "commit2", GOT2))

        if popcount(crashed) < self.fault_budget:
            for i in range(n):
                bit = 1 << i
                if not (self.pmask & bit) or (crashed & bit):
                    continue
                if GOT1 <= prog[i] <= WROTE2:
                    s2 = state | (1 << (5 * i + 3))
                    s2 &= ~(bit << self._off_fpend)
                    s2 &= ~(bit << self._off_spend)
                    out.append((("crash", i + 1), s2))
        return out

    def _set_prog(self, state: int, i: int, value: int) -> int:
        return (state & ~(7 << (5 * i))) | (value << (5 * i))

    def _commits(self, state: int, pending: int, off_blk: int, off_pend: int,
                 label: str, new_prog: int) -> Iterator[tuple[tuple, int]]:
        if not pending:
            return
        n = self.n
        slot = 0
        while (state >> (off_blk + slot * n)) & ((1 << n) - 1):
            slot += 1
        # nonempty subsets of the pending set, ascending for determinism
        sub = pending
        subsets = []
        while sub:
            subsets.append(sub)
            sub = (sub - 1) & pending
        for block in sorted(subsets):
            s2 = state | (block << (off_blk + slot * n))
            s2 &= ~(block << off_pend)
            for i in iter_bits(block):
                s2 = self._set_prog(s2, i, new_prog)
            yield (label, sorted(colors_of(block))), s2

    def apply_event(self, state: int, event: tuple) -> int:
        """Replay one event, validating that it is enabled."""
        kind = event[0]
        want: tuple
        if kind in ("commit1", "commit2"):
            want = (kind, sorted(event[1]))
        elif kind in ("step", "crash"):
            want = (kind, int(event[1]))
        else:
            raise SimulationError(f"unknown event kind {kind!r}")
        for ev, s2 in self.successors(state):
            if ev == want:
                return s2
        raise SimulationError(f"event {want!r} is not enabled")

    def is_terminal(self, state: int) -> bool:
        return not any(ev[0] != "crash" for ev, _ in self.successors(state))

    # --- exploration -----------------------------------------------------

    def explore(self, track_parents: bool = False) -> Exploration:
        init = self.initial_state()
        visited: set[int] = {init}
        parents: dict[int, tuple[int, tuple]] | None = {} if track_parents else None
        terminals: list[int] = []
        queue = deque([init])
        while queue:
            state = queue.popleft()
            succ = self.successors(state)
            if not any(ev[0] != "crash" for ev, _ in succ):
                terminals.append(state)
            for ev, s2 in succ:
                if s2 in visited:
                    continue
                visited.add(s2)
                if len(visited) > self.max_states:
                    raise StateCapExceeded(
                        f"exceeded state cap {self.max_states} "
                        f"(participation {sorted(self.participation)})")
                if parents is not None:
                    parents[s2] = (state, ev)
                queue.append(s2)
        return Exploration(participation=self.participation,
                           fault_budget=self.fault_budget,
                           state_count=len(visited),
                           terminals=terminals, parents=parents)

    def trace_to(self, state: int, parents: dict[int, tuple[int, tuple]]) -> list[tuple]:
        events = []
        while state in parents:
            state, ev = parents[state]
            events.append(ev)
        return events[::-1]

    # --- terminal-state interpretation ------------------------------------

    def outputs(self, state: int) -> list[tuple[int, int]]:
        """(process, second-round prefix mask) of every returned process."""
        n = self.n
        sb = self._blocks(state, self._off_sblk)
        spfx = [0] * n
        prefix = 0
        for blk in sb:
            prefix |= blk
            for i in iter_bits(blk):
                spfx[i] = prefix
        return [(i + 1, spfx[i]) for i in range(n)
                if self._prog(state, i) == DONE]

    def output_simplex(self, state: int) -> Simplex | None:
        """The chromatic simplex spanned by the returned views, if any."""
        outs = self.outputs(state)
        if not outs:
            return None
        fb = self._blocks(state, self._off_fblk)
        is1 = self._is1_views(fb)
        base = {v.color: v for v in standard_simplex(self.n).vertices}

        def chr1(q: int) -> "Simplex":
            cols = sorted(colors_of(is1[q - 1]))
            return Simplex(tuple(base[c] for c in cols))

        verts = []
        for p, prefix in outs:
            seen = [chr_vertex(q, chr1(q)) for q in sorted(colors_of(prefix))]
            verts.append(chr_vertex(p, Simplex(tuple(seen))))
        return Simplex(tuple(verts))


# --- sweeps over participation sets -------------------------------------------


def valid_participations(adv: Adversary) -> list[frozenset[int]]:
    """Every participation set the adversary lets run (agreement level >= 1)."""
    alpha = agreement_function(adv)
    out = []
    for mask in range(1, 1 << adv.n):
        if alpha.of_mask(mask) >= 1:
            out.append(colors_of(mask))
    return sorted(out, key=lambda P: (len(P), sorted(P)))


def check_liveness(model: ProtocolModel, exploration: Exploration) -> VerificationReport:
    """No reachable quiescent state may strand a non-crashed process."""
    report = VerificationReport(kind="liveness", info={
        "participation": sorted(model.participation),
        "fault_budget": model.fault_budget,
        "states": exploration.state_count,
        "terminals": len(exploration.terminals),
    })
    for state in exploration.terminals:
        report.checked += 1
        crashed = model._crashed_mask(state)
        stuck = [i + 1 for i in iter_bits(model.pmask)
                 if not (crashed >> i) & 1 and model._prog(state, i) != DONE]
        if stuck:
            report.add(stuck=stuck, state=model.decode(state))
    return report


def check_safety(model: ProtocolModel, exploration: Exploration,
                 task: AffineTask) -> VerificationReport:
    """Returned views of every quiescent state form a face of the task."""
    chr2 = chr2_complex(model.n)
    report = VerificationReport(kind="safety", info={
        "participation": sorted(model.participation),
        "fault_budget": model.fault_budget,
        "states": exploration.state_count,
        "terminals": len(exploration.terminals),
    })
    seen: dict[tuple, bool] = {}
    for state in exploration.terminals:
        report.checked += 1
        key = (tuple(model.outputs(state)),
               tuple(model._is1_views(model._blocks(state, model._off_fblk))))
        cached = seen.get(key)
        if cached is not None:
            ok = cached
        else:
            sigma = model.output_simplex(state)
            if sigma is None:
                ok = True
            else:
                ok = sigma in chr2 and sigma in task.complex
            seen[key] = ok
        if not ok:
            sigma = model.output_simplex(state)
            report.add(outputs=list(sigma.uids),
                       in_subdivision=sigma in chr2,
                       state=model.decode(state))
    return report


def check_model(adv: Adversary, task: AffineTask,
                participations: Iterable[Iterable[int]] | None = None,
                fault_budget: int | None = None,
                max_states: int = DEFAULT_STATE_CAP,
                ) -> tuple[VerificationReport, VerificationReport, list[dict]]:
    """Safety + liveness over every valid participation set.

    Returns aggregated (safety, liveness) reports and per-participation rows.
    """
    parts = ([frozenset(P) for P in participations]
             if participations is not None else valid_participations(adv))
    safety = VerificationReport(kind="safety")
    liveness = VerificationReport(kind="liveness")
    rows = []
    for P in parts:
        model = ProtocolModel(adv, participation=P,
                              fault_budget=fault_budget, max_states=max_states)
        exploration = model.explore()
        safe = check_safety(model, exploration, task)
        live = check_liveness(model, exploration)
        safety.checked += safe.checked
        safety.violations.extend(safe.violations)
        liveness.checked += live.checked
        liveness.violations.extend(live.violations)
        rows.append({
            "participation": sorted(P),
            "fault_budget": model.fault_budget,
            "states": exploration.state_count,
            "terminals": len(exploration.terminals),
            "safety_violations": len(safe.violations),
            "liveness_violations": len(live.violations),
        })
    safety.info["participations"] = len(rows)
    liveness.info["participations"] = len(rows)
    return safety, liveness, rows


# --- iterated runs --------------------------------------------------------------


def compose_runs(task: AffineTask, m: int, max_runs: int = 1_000_000
                 ) -> list[tuple[Simplex, ...]]:
    """All m-iteration runs of the task: every facet sequence, with each
    process feeding its round-i output into round i+1.

    The schedule of a later iteration is unconstrained by earlier ones, so
    the run set is the m-fold product of the facets; the per-process chaining
    is positional (its vertex in facet i is its input to facet i+1).
    """
    if m < 1:
        raise SimulationError("need at least one iteration")
    fs = task.complex.sorted_facets()
    if len(fs) ** m > max_runs:
        raise StateCapExceeded(
            f"{len(fs)}^{m} composed runs exceed the budget {max_runs}")
    return list(product(fs, repeat=m))


def run_projection(run: Sequence[Simplex], process: int) -> list:
    """The per-iteration vertices of one process along a composed run."""
    out = []
    for facet in run:
        matches = [v for v in facet if v.color == process]
        if not matches:
            raise SimulationError(f"process {process} absent from {facet!r}")
        out.append(matches[0])
    return out


# --- traces ----------------------------------------------------------------------


def events_to_jsonable(events: Iterable[tuple]) -> list[dict]:
    out = []
    for ev in events:
        if ev[0] in ("commit1", "commit2"):
            out.append({"type": ev[0], "block": list(ev[1])})
        else:
            out.append({"type": ev[0], "process": ev[1]})
    return out


def events_from_jsonable(items: Iterable[dict]) -> list[tuple]:
    out = []
    for item in items:
        kind = item.get("type")
        if kind in ("commit1", "commit2"):
            out.append((kind, sorted(int(x) for x in item["block"])))
        elif kind in ("step", "crash"):
            out.append((kind, int(item["process"])))
        else:
            raise SimulationError(f"unknown trace event {item!r}")
    return out


def replay(model: ProtocolModel, events: Iterable[tuple]) -> int:
    state = model.initial_state()
    for ev in events:
        state = model.apply_event(state, ev)
    return state
