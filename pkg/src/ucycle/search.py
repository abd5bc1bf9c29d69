"""Validity decisions for index sets by pruned exhaustive search, plus the
affine-class atlas machinery.

A set I of n residues mod q**n is valid when some cyclic string achieves
every n-word on a translate of I.  Because there are exactly q**n translates
and q**n words, a complete string makes the translate-to-word map a
bijection, and the search below branches on symbols while rejecting any
assignment that repeats a completed window word ("bijection pruning").

Two further sound rules:

* symbol counting - in any valid string each symbol occurs exactly q**(n-1)
  times (sum the per-coordinate symbol tallies over all words);
* stabilizer counting - if I + s = I for some s != 0, windows at t and t + s
  are coordinate rotations of one another, so each stabilizer coset needs a
  full orbit of distinct words; when fewer such words exist than translates,
  the set is invalid before any search.  This refutes arithmetic-progression
  sets with wrap-around instantly.

``invalid`` is only ever reported after exhaustion under these rules (the
stabilizer bound exhausts the tree at its root); running out of budget raises
:class:`BudgetExceeded` instead.
"""
from __future__ import annotations

import os
import time
from dataclasses import dataclass, field

from .core import (
    CycleParams,
    CyclicString,
    UcycleError,
    VerificationError,
    affine_class_representatives,
    normalize_index_set,
    verify_cover,
)

VALID = "valid"
INVALID = "invalid"


class BudgetExceeded(UcycleError):
    """Search stopped on a node or time budget; not a mathematical verdict."""

    def __init__(self, message, nodes=0, elapsed=0.0):
        super().__init__(message)
        self.nodes = nodes
        self.elapsed = elapsed


@dataclass
class ValidityCertificate:
    q: int
    n: int
    index_set: tuple
    verdict: str
    witness: CyclicString | None
    nodes_explored: int
    elapsed: float
    method: str  # "search" or "stabilizer-count"

    @property
    def valid(self):
        return self.verdict == VALID


def _mobius(n):
    result = 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            result = -result
        d += 1
    if n > 1:
        result = -result
    return result


def _stabilizer_counting_bound(q, n, I, N):
    """Number of words usable per translate under the stabilizer of I,
    or None when the stabilizer is trivial."""
    iset = set(I)
    s_min = 0
    for s in range(1, N):
        if all((i + s) % N in iset for i in I):
            s_min = s
            break
    if s_min == 0:
        return None
    h = N // s_min
    index_of = {i: j for j, i in enumerate(I)}
    free = 0
    for e in _divisors(h):
        mu = _mobius(e)
        if mu == 0:
            continue
        s_e = s_min * (h // e)
        if s_e % N == 0:
            cycles = n
        else:
            perm = [index_of[(i + s_e) % N] for i in I]
            cycles = _cycle_count(perm)
        free += mu * q ** cycles
    return free


def _divisors(n):
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)


def _cycle_count(perm):
    seen = [False] * len(perm)
    count = 0
    for i in range(len(perm)):
        if not seen[i]:
            count += 1
            j = i
            while not seen[j]:
                seen[j] = True
                j = perm[j]
    return count


def _first_need_order(N, I):
    # positions in the order translates 0, 1, 2, ... first require them;
    # equals plain position order for contiguous index sets
    order = []
    seen = bytearray(N)
    for t in range(N):
        for i in I:
            p = (i + t) % N
            if not seen[p]:
                seen[p] = 1
                order.append(p)
        if len(order) == N:
            break
    return order


def _greedy_completion_order(N, I, q):
    """Assignment order that finishes nearly-complete windows first.

    Each unassigned position is scored by how close it brings windows to
    completion (a window missing one position dominates one missing two,
    and so on); ties go to the smallest position.  Keeps the duplicate-word
    pruning firing as early as possible on stride-heavy index sets.
    """
    n = len(I)
    pos_windows = [[] for _ in range(N)]
    for i in I:
        for t in range(N):
            pos_windows[(i + t) % N].append(t)
    rem = [n] * N
    # weight[r] scores a window with r unassigned positions; scaled by
    # q**(n-1) so a window one symbol short outweighs any number of laggards
    weight = [0] + [q ** (n - 1 - (r - 1)) for r in range(1, n + 1)]
    score = [0] * N
    for p in range(N):
        score[p] = sum(weight[rem[t]] for t in pos_windows[p])
    assigned = bytearray(N)
    order = []
    for _ in range(N):
        best, best_score = -1, -1
        for p in range(N):
            if not assigned[p] and score[p] > best_score:
                best, best_score = p, score[p]
        assigned[best] = 1
        order.append(best)
        for t in pos_windows[best]:
            old = rem[t]
            rem[t] = old - 1
            delta = weight[old - 1] - weight[old]
            if old > 1:
                for i in I:
                    p2 = (i + t) % N
                    if not assigned[p2]:
                        score[p2] += delta
    return order


def default_budget():
    nodes = os.environ.get("UCYCLE_BUDGET_NODES")
    secs = os.environ.get("UCYCLE_BUDGET_SECS")
    return (int(nodes) if nodes else None, float(secs) if secs else None)


def decide_valid(q, n, I, node_limit=None, time_limit=None):
    """Decide q-validity of I with a verified witness or a refutation.

    Deterministic: fixed assignment order, symbols tried ascending, symbol
    relabeling broken by first-occurrence order, so the reported witness is
    the least string under the search order.
    """
    N = q ** n
    if N > 2 ** 24:
        raise ValueError("q**n too large for in-memory search")
    I = normalize_index_set(I, N)
    if len(I) != n:
        raise ValueError(f"index set must have {n} distinct residues mod {N}")
    start = time.monotonic()

    free = _stabilizer_counting_bound(q, n, I, N)
    if free is not None and free < N:
        return ValidityCertificate(
            q=q, n=n, index_set=I, verdict=INVALID, witness=None,
            nodes_explored=0, elapsed=time.monotonic() - start,
            method="stabilizer-count",
        )

    found, chi_syms, nodes = _dfs(q, n, I, N, node_limit, time_limit, start)
    elapsed = time.monotonic() - start
    if found:
        witness = CyclicString(q, tuple(chi_syms))
        report = verify_cover(witness, CycleParams.unreduced(q, n), I)
        if not report.complete:
            raise VerificationError("search produced a non-covering witness")
        return ValidityCertificate(
            q=q, n=n, index_set=I, verdict=VALID, witness=witness,
            nodes_explored=nodes, elapsed=elapsed, method="search",
        )
    return ValidityCertificate(
        q=q, n=n, index_set=I, verdict=INVALID, witness=None,
        nodes_explored=nodes, elapsed=elapsed, method="search",
    )


def _dfs(q, n, I, N, node_limit, time_limit, start):
    target = q ** (n - 1)
    if N <= 4096:
        order = _greedy_completion_order(N, I, q)
    else:
        order = _first_need_order(N, I)
    powers = [q ** (n - 1 - j) for j in range(n)]
    pos_wins = [[] for _ in range(N)]
    for j, i in enumerate(I):
        w = powers[j]
        for t in range(N):
            pos_wins[(i + t) % N].append((t, w))
    pos_wins = [tuple(x) for x in pos_wins]

    W = q ** n
    # state[t] packs (unassigned count)*W + (partial word code); an update
    # completes the window exactly when the packed value drops below W
    chi = [-1] * N
    state = [n * W] * N
    wrem = [sum(powers)] * N  # weight of the unassigned positions
    used = bytearray(W)
    counts = [0] * q
    sym = [-1] * N
    maxseen = [-1] * (N + 1)
    undo = [()] * N
    qrange = tuple(range(q))

    nodes = 0
    depth = 0
    while True:
        if depth == N:
            return True, chi, nodes
        p = order[depth]
        cap = maxseen[depth] + 1
        if cap > q - 1:
            cap = q - 1
        s = sym[depth] + 1
        advanced = False
        wins = pos_wins[p]
        while s <= cap:
            if counts[s] < target:
                nodes += 1
                if node_limit is not None and nodes > node_limit:
                    raise BudgetExceeded("node budget exceeded", nodes,
                                         time.monotonic() - start)
                if time_limit is not None and nodes % 8192 == 0:
                    if time.monotonic() - start > time_limit:
                        raise BudgetExceeded("time budget exceeded", nodes,
                                             time.monotonic() - start)
                completed = []
                applied = 0
                ok = True
                for t, w in wins:
                    v = state[t] + s * w - W
                    state[t] = v
                    wr = wrem[t] - w
                    wrem[t] = wr
                    applied += 1
                    if v < W:
                        if used[v]:
                            ok = False
                            break
                        used[v] = 1
                        completed.append(v)
                    elif v < 2 * W:
                        # one position left: prune when every symbol there
                        # lands on an already-used word
                        base = v - W
                        for s2 in qrange:
                            if not used[base + s2 * wr]:
                                break
                        else:
                            ok = False
                            break
                if ok:
                    chi[p] = s
                    counts[s] += 1
                    sym[depth] = s
                    undo[depth] = tuple(completed)
                    maxseen[depth + 1] = \
                        s if s > maxseen[depth] else maxseen[depth]
                    depth += 1
                    advanced = True
                    break
                for c in completed:
                    used[c] = 0
                for t, w in wins[:applied]:
                    state[t] += W - s * w
                    wrem[t] += w
            s += 1
        if advanced:
            continue
        sym[depth] = -1
        depth -= 1
        if depth < 0:
            return False, None, nodes
        p2 = order[depth]
        s2 = chi[p2]
        for c in undo[depth]:
            used[c] = 0
        for t, w in pos_wins[p2]:
            state[t] += W - s2 * w
            wrem[t] += w
        chi[p2] = -1
        counts[s2] -= 1


def two_element_validity(q, d):
    """Arithmetic shortcut for I = {0, d}: valid iff q*q/d != 2."""
    if d <= 0 or d >= q * q:
        raise ValueError("need 1 <= d < q**2")
    if (q * q) % d != 0:
        raise ValueError(f"{d} does not divide {q * q}")
    return (q * q) // d != 2


# ---------------------------------------------------------------------------
# atlas
# ---------------------------------------------------------------------------


@dataclass
class AtlasEntry:
    canonical: tuple
    verdict: str


@dataclass
class Atlas:
    q: int
    n: int
    set_size: int
    entries: list = field(default_factory=list)

    @property
    def totals(self):
        t = {VALID: 0, INVALID: 0}
        for e in self.entries:
            t[e.verdict] += 1
        return t

    def classes(self, verdict):
        return [e.canonical for e in self.entries if e.verdict == verdict]

    def lines(self):
        return [
            ",".join(str(i) for i in e.canonical) + "\t" + e.verdict
            for e in self.entries
        ]


def _format_set(canonical):
    return ",".join(str(i) for i in canonical)


def _parse_checkpoint(path):
    done = {}
    if path and os.path.exists(path):
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                setpart, verdict = line.split("\t")
                key = tuple(int(x) for x in setpart.split(","))
                done[key] = verdict
    return done


def _decide_worker(args):
    q, n, rep, node_limit, time_limit = args
    cert = decide_valid(q, n, rep, node_limit=node_limit, time_limit=time_limit)
    return rep, cert.verdict


def atlas(q, n, set_size, node_limit=None, time_limit=None, checkpoint=None,
          jobs=1, progress=None):
    """Classify every affine class of size-`set_size` subsets of Z_{q**n}.

    Entries come back sorted by canonical representative regardless of how
    the per-class work was scheduled, and a checkpoint file (append-only
    "set<TAB>verdict" lines) makes long runs resumable with byte-identical
    output.
    """
    L = q ** n
    reps = affine_class_representatives(L, set_size)
    done = _parse_checkpoint(checkpoint)
    pending = [rep for rep in reps if rep not in done]

    results = dict(done)
    ck = open(checkpoint, "a") if checkpoint else None
    try:
        if jobs > 1 and pending:
            import multiprocessing

            with multiprocessing.Pool(jobs) as pool:
                work = [(q, n, rep, node_limit, time_limit) for rep in pending]
                for rep, verdict in pool.imap_unordered(_decide_worker, work):
                    results[rep] = verdict
                    if ck:
                        ck.write(_format_set(rep) + "\t" + verdict + "\n")
                        ck.flush()
                    if progress:
                        progress(rep, verdict)
        else:
            for rep in pending:
                cert = decide_valid(q, n, rep, node_limit=node_limit,
                                    time_limit=time_limit)
                results[rep] = cert.verdict
                if ck:
                    ck.write(_format_set(rep) + "\t" + cert.verdict + "\n")
                    ck.flush()
                if progress:
                    progress(rep, cert.verdict)
    finally:
        if ck:
            ck.close()

    out = Atlas(q=q, n=n, set_size=set_size)
    for rep in reps:
        out.entries.append(AtlasEntry(canonical=rep, verdict=results[rep]))
    return out
