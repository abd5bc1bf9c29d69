"""Equal-length closed-trail decompositions of complete loop-digraphs.

K~_n has vertex set {1..n} and all n*n ordered pairs as edges, loops
included.  For d | n^2 and d >= 3 the edge set splits into n^2/d closed
trails of length d ("closed trail": chained edges, all distinct, vertices
free to repeat); d = 1 fails for n >= 2 because only n loops exist, and
d = 2 fails because loops cannot sit on a 2-trail.

Routes, by target length:

* d = n^2           one Euler circuit;
* d = 4, n even     explicit 4-cycle families;
* d in {3, 5, 7}    hub gadgets plus a prescribed-length split of the
                    loopless complete digraph;
* d = 6 or d >= 8   the same idea with a two-vertex hub {a, b}: per-vertex
                    gadgets G_j = {(j,j), j<->a, j<->b} and the hub square
                    are broken into balanced atoms and packed into exact
                    d-edge connected groups by backtracking, each group then
                    serialized as one Euler trail.

The prescribed-length split of the loopless digraph is an exact backtracking
search; `Impossible` from it is a refutation by exhaustion except for the
optional hardcoded shortcut on the known 6-vertex all-triangles exception,
which is labeled as such.  Every emitted decomposition re-verifies through
`check_decomposition` before being returned.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

from .core import CyclicString, CycleParams, UcycleError, VerificationError, verify_cover
from .search import BudgetExceeded


class Impossible(UcycleError):
    """No decomposition exists; `reason` says how that was established."""

    def __init__(self, message, reason):
        super().__init__(message)
        self.reason = reason


@dataclass(frozen=True)
class ClosedTrail:
    """Cyclic edge sequence; head of each edge is the tail of the next."""

    edges: tuple

    def __post_init__(self):
        e = self.edges
        if not e:
            raise ValueError("empty trail")
        if len(set(e)) != len(e):
            raise ValueError("repeated edge in trail")
        for i in range(len(e)):
            if e[i][1] != e[(i + 1) % len(e)][0]:
                raise ValueError("edges do not chain")

    def __len__(self):
        return len(self.edges)

    def vertices(self):
        return {v for edge in self.edges for v in edge}

    def vertex_sequence(self):
        return [edge[0] for edge in self.edges]


@dataclass
class TrailDecomposition:
    n: int
    d: int
    trails: list

    def __post_init__(self):
        check_decomposition(self.n, self.d, self.trails)

    def to_json_obj(self):
        return {
            "schema": 1,
            "n": self.n,
            "d": self.d,
            "trails": [[[u, v] for u, v in t.edges] for t in self.trails],
        }


def check_decomposition(n, d, trails):
    """Independent certificate check: lengths, chaining, edge-disjointness,
    and full coverage of the n*n edges."""
    if len(trails) != n * n // d:
        raise VerificationError(
            f"expected {n * n // d} trails, got {len(trails)}")
    seen = set()
    for t in trails:
        if len(t) != d:
            raise VerificationError(f"trail length {len(t)} != {d}")
        for u, v in t.edges:
            if not (1 <= u <= n and 1 <= v <= n):
                raise VerificationError(f"edge ({u},{v}) out of range")
            if (u, v) in seen:
                raise VerificationError(f"edge ({u},{v}) covered twice")
            seen.add((u, v))
    if len(seen) != n * n:
        raise VerificationError("edges left uncovered")


def euler_trail(edges):
    """One closed trail through the given edges (Hierholzer, smallest next
    head first); requires balance and connectivity, which it verifies by
    consuming everything."""
    succ = {}
    for u, v in edges:
        succ.setdefault(u, []).append(v)
    for u in succ:
        succ[u].sort(reverse=True)
    start = min(succ)
    stack = [start]
    path = []
    while stack:
        v = stack[-1]
        if succ.get(v):
            stack.append(succ[v].pop())
        else:
            path.append(stack.pop())
    if any(succ[v] for v in succ):
        raise VerificationError("edge set is not connected")
    path.reverse()
    trail_edges = tuple(
        (path[i], path[i + 1]) for i in range(len(path) - 1))
    if len(trail_edges) != len(edges):
        raise VerificationError("Euler walk did not use every edge")
    return ClosedTrail(trail_edges)


def is_eulerian(edges):
    """Balanced in/out degrees and one connected component."""
    outd, ind = {}, {}
    verts = set()
    for u, v in edges:
        outd[u] = outd.get(u, 0) + 1
        ind[v] = ind.get(v, 0) + 1
        verts |= {u, v}
    if any(outd.get(v, 0) != ind.get(v, 0) for v in verts):
        return False
    start = next(iter(verts))
    reach = {start}
    frontier = [start]
    adj = {}
    for u, v in edges:
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)
    while frontier:
        x = frontier.pop()
        for y in adj.get(x, ()):
            if y not in reach:
                reach.add(y)
                frontier.append(y)
    return reach == verts


# ---------------------------------------------------------------------------
# prescribed-length split of the loopless complete digraph
# ---------------------------------------------------------------------------


def decompose_loopless(m, lengths, node_limit=2_000_000,
                       known_exception_shortcut=False, vertices=None):
    """Edge-disjoint closed trails of the prescribed lengths covering the
    loopless complete digraph on m vertices.

    Exact backtracking: each trail is anchored at the smallest unused edge,
    so the search space is canonical.  The one true obstruction at this
    scale is six vertices into all 3-cycles; with the shortcut enabled that
    case returns immediately with reason "known-exception" instead of
    re-exhausting.
    """
    verts = list(vertices) if vertices is not None else list(range(1, m + 1))
    if len(verts) != m:
        raise ValueError("vertex list size mismatch")
    lengths = sorted(lengths, reverse=True)
    if sum(lengths) != m * (m - 1):
        raise ValueError(f"lengths sum {sum(lengths)} != m(m-1) = {m*(m-1)}")
    if any(L < 2 for L in lengths):
        raise ValueError("every length must be >= 2")
    if known_exception_shortcut and m == 6 and all(L == 3 for L in lengths):
        raise Impossible("6 vertices admit no all-triangle split",
                         reason="known-exception")

    edges = sorted((u, v) for u in verts for v in verts if u != v)
    used = set()
    budget = {"nodes": 0}
    t0 = time.monotonic()

    def trail_walks(anchor, length):
        """Closed trails of `length` unused edges starting with `anchor`."""
        u0 = anchor[0]
        walk = [anchor]
        used.add(anchor)

        def extend(v, left):
            budget["nodes"] += 1
            if budget["nodes"] > node_limit:
                raise BudgetExceeded("trail split budget exceeded",
                                     budget["nodes"],
                                     time.monotonic() - t0)
            if left == 0:
                if v == u0:
                    yield list(walk)
                return
            if left == 1:
                cand = [u0] if u0 != v and (v, u0) not in used else []
            else:
                cand = [w for w in verts if w != v and (v, w) not in used]
            for w in cand:
                e = (v, w)
                used.add(e)
                walk.append(e)
                yield from extend(w, left - 1)
                walk.pop()
                used.discard(e)

        yield from extend(anchor[1], length - 1)
        walk.pop()
        used.discard(anchor)

    result = []

    def solve(remaining):
        if not remaining:
            return True
        anchor = next(e for e in edges if e not in used)
        tried = set()
        for idx, L in enumerate(remaining):
            if L in tried:
                continue
            tried.add(L)
            rest = remaining[:idx] + remaining[idx + 1:]
            for walk in trail_walks(anchor, L):
                for e in walk:
                    used.add(e)
                result.append(ClosedTrail(tuple(walk)))
                if solve(rest):
                    return True
                result.pop()
                for e in walk:
                    used.discard(e)
        return False

    if solve(lengths):
        return result
    raise Impossible(
        f"no split of the loopless digraph on {m} vertices into lengths "
        f"{lengths} exists (search exhausted)", reason="exhausted")


# ---------------------------------------------------------------------------
# closed-form families and hub constructions
# ---------------------------------------------------------------------------


def _wrap(v, n):
    return (v - 1) % n + 1


def prop17_trails(n):
    """Length-4 trails covering K~_n for even n, as explicit families."""
    if n % 2:
        raise ValueError("n must be even")
    h = n // 2
    trails = []
    for j in range(1, h + 1):
        a, b = j, _wrap(j + h, n)
        trails.append(ClosedTrail(((a, a), (a, b), (b, b), (b, a))))
    if n % 4 == 2:
        for j in range(1, n + 1):
            for k in range(1, (n - 2) // 4 + 1):
                x, y = _wrap(j + 2 * k - 1, n), _wrap(j + 2 * k, n)
                trails.append(ClosedTrail(((j, x), (x, j), (j, y), (y, j))))
    else:
        for j in range(1, n + 1):
            for k in range(1, n // 4):
                x, y = _wrap(j + 2 * k, n), _wrap(j + 2 * k + 1, n)
                trails.append(ClosedTrail(((j, x), (x, j), (j, y), (y, j))))
        for j in range(1, h + 1):
            u, x, y = 2 * j, _wrap(2 * j - 1, n), _wrap(2 * j + 1, n)
            trails.append(ClosedTrail(((u, x), (x, u), (u, y), (y, u))))
    return trails


def _gadget_edges(j, hubs):
    edges = [(j, j)]
    for h in hubs:
        edges.extend([(j, h), (h, j)])
    return edges


def _prop18_trails(n, d, node_limit):
    if n % d:
        raise ValueError("this route needs d | n")
    if d == 3:
        b = n
        inner = list(range(1, n))
        K = ((n - 1) * (n - 2) - 2) // 3
        parts = decompose_loopless(n - 1, [3] * K + [2], node_limit,
                                   vertices=inner)
        two = next(t for t in parts if len(t) == 2)
        trails = [t for t in parts if len(t) == 3]
        u = min(two.vertices())
        trails.append(euler_trail(list(two.edges) + [(u, u)]))
        trails.append(euler_trail([(b, b), (u, b), (b, u)]))
        for j in inner:
            if j != u:
                trails.append(euler_trail(_gadget_edges(j, [b])))
        return trails
    if d == 5:
        a, b = n - 1, n
        inner = list(range(1, n - 1))
        K = ((n - 2) * (n - 3) - 6) // 5
        parts = decompose_loopless(n - 2, [5] * K + [4, 2], node_limit,
                                   vertices=inner)
        t4 = next(t for t in parts if len(t) == 4)
        t2 = next(t for t in parts if len(t) == 2)
        trails = [t for t in parts if len(t) == 5]
        u = min(t4.vertices())
        x = min(t2.vertices() - {u})
        trails.append(euler_trail(list(t4.edges) + [(u, u)]))
        trails.append(euler_trail(
            [(u, a), (a, u), (u, b), (b, u), (a, a)]))
        trails.append(euler_trail(list(t2.edges) + [(x, b), (b, x), (b, b)]))
        trails.append(euler_trail(
            [(x, x), (x, a), (a, x), (a, b), (b, a)]))
        for j in inner:
            if j not in (u, x):
                trails.append(euler_trail(_gadget_edges(j, [a, b])))
        return trails
    if d == 7:
        a, b, c = n - 2, n - 1, n
        inner = list(range(1, n - 2))
        K = ((n - 3) * (n - 4) - 5) // 7
        parts = decompose_loopless(n - 3, [7] * K + [5], node_limit,
                                   vertices=inner)
        t5 = next(t for t in parts if len(t) == 5)
        trails = [t for t in parts if len(t) == 7]
        u = min(t5.vertices())
        trails.append(euler_trail(list(t5.edges) + [(u, a), (a, u)]))
        trails.append(euler_trail(
            [(u, u), (u, b), (b, u), (u, c), (c, u), (a, b), (b, a)]))
        hub = [(a, a), (b, b), (c, c), (a, c), (c, a), (b, c), (c, b)]
        trails.append(euler_trail(hub))
        for j in inner:
            if j != u:
                trails.append(euler_trail(_gadget_edges(j, [a, b, c])))
        return trails
    raise ValueError("route only covers d in {3, 5, 7}")


# ---------------------------------------------------------------------------
# packing route for d = 6 and d >= 8
# ---------------------------------------------------------------------------


def _assemble_groups(t_pieces, inner, a, b, d, node_cap=400_000):
    """Pack leftover trails, per-vertex gadget atoms, and hub atoms into
    connected groups of exactly d edges (exact backtracking search).

    Atoms are individually balanced, and a group only ever grows through a
    shared vertex, so each finished group is Eulerian by construction.
    """
    atoms = []
    for idx, t in enumerate(t_pieces):
        atoms.append((("t", idx), len(t.edges), frozenset(t.vertices()),
                      tuple(t.edges)))
    for j in inner:
        atoms.append((("loop", j), 1, frozenset({j}), ((j, j),)))
        atoms.append((("pa", j), 2, frozenset({j, a}), ((j, a), (a, j))))
        atoms.append((("pb", j), 2, frozenset({j, b}), ((j, b), (b, j))))
    atoms.append((("ha",), 1, frozenset({a}), ((a, a),)))
    atoms.append((("hb",), 1, frozenset({b}), ((b, b),)))
    atoms.append((("hab",), 2, frozenset({a, b}), ((a, b), (b, a))))

    total = sum(size for _, size, _, _ in atoms)
    if total % d:
        raise VerificationError("atom supply not a multiple of d")
    n_groups = total // d
    t_count = len(t_pieces)
    marked = {j for t in t_pieces for j in t.vertices()}
    order = {atom[0]: i for i, atom in enumerate(atoms)}
    unused = set(order.values())
    nodes = [0]

    groups = []

    def fresh_js():
        """Inner vertices untouched so far, mutually interchangeable."""
        out = []
        for j in inner:
            if j in marked:
                continue
            if all(order[(kind, j)] in unused for kind in ("loop", "pa", "pb")):
                out.append(j)
        return out

    def dfs(cur, cur_size, cur_verts):
        nodes[0] += 1
        if nodes[0] > node_cap:
            raise VerificationError("assembly budget exceeded")
        if cur_size == d:
            groups.append(list(cur))
            if not unused:
                return True
            if dfs([], 0, frozenset()):
                return True
            groups.pop()
            return False
        room = d - cur_size
        fresh = fresh_js()
        skip_fresh = set(fresh[1:])
        cands = []
        for i in sorted(unused):
            key, size, verts, _ = atoms[i]
            if size > room:
                continue
            if cur and not (verts & cur_verts):
                continue
            if key[0] in ("loop", "pa", "pb") and key[1] in skip_fresh:
                continue
            if not cur and key[0] != "t" and any(
                    atoms[k][0][0] == "t" for k in unused):
                continue  # leftover trails seed their own groups
            cands.append((-size, i))
        if not cur and cands:
            cands = cands[:1]  # seeding is canonical: groups are unordered
        for _, i in sorted(cands):
            key, size, verts, _ = atoms[i]
            unused.discard(i)
            was_fresh = key[0] in ("loop", "pa", "pb") and key[1] in fresh
            if was_fresh:
                marked.add(key[1])
            if dfs(cur + [i], cur_size + size, cur_verts | verts):
                return True
            if was_fresh:
                marked.discard(key[1])
            unused.add(i)
        return False

    if not dfs([], 0, frozenset()):
        raise VerificationError("no exact atom packing found")
    out = []
    for g in groups:
        edges = []
        for i in g:
            edges.extend(atoms[i][3])
        if not is_eulerian(edges):
            raise VerificationError("assembled group is not Eulerian")
        out.append(euler_trail(edges))
    assert len(out) == n_groups
    return out


def _prop16_trails(n, d, node_limit):
    a, b = n - 1, n
    inner = list(range(1, n - 1))
    eg = (n - 2) * (n - 3)
    r = eg % d or d
    if r == 1:
        K = (eg - 1) // d
        lengths = [d] * (K - 1) + [d - 1, 2]
    else:
        K = (eg - r) // d
        lengths = [d] * K + [r]
    parts = decompose_loopless(n - 2, lengths, node_limit, vertices=inner)
    trails = [t for t in parts if len(t) == d]
    t_pieces = [t for t in parts if len(t) != d]
    trails.extend(_assemble_groups(t_pieces, inner, a, b, d))
    return trails


# ---------------------------------------------------------------------------
# exact fallback and the dispatcher
# ---------------------------------------------------------------------------


def decompose_exact(n, d, node_limit=2_000_000):
    """Peel length-d closed trails off the whole loop-digraph by direct
    backtracking; last-resort route for small residual cases."""
    verts = list(range(1, n + 1))
    edges = sorted((u, v) for u in verts for v in verts)
    used = set()
    budget = {"nodes": 0}
    result = []

    def walks(anchor):
        u0 = anchor[0]
        walk = [anchor]
        used.add(anchor)

        def extend(v, left):
            budget["nodes"] += 1
            if budget["nodes"] > node_limit:
                raise BudgetExceeded("exact decomposition budget exceeded",
                                     budget["nodes"], 0.0)
            if left == 0:
                if v == u0:
                    yield list(walk)
                return
            for w in verts:
                e = (v, w)
                if e in used:
                    continue
                if left == 1 and w != u0:
                    continue
                used.add(e)
                walk.append(e)
                yield from extend(w, left - 1)
                walk.pop()
                used.discard(e)

        yield from extend(anchor[1], d - 1)
        walk.pop()
        used.discard(anchor)

    def solve(remaining):
        if remaining == 0:
            return True
        anchor = next(e for e in edges if e not in used)
        for walk in walks(anchor):
            for e in walk:
                used.add(e)
            result.append(ClosedTrail(tuple(walk)))
            if solve(remaining - 1):
                return True
            result.pop()
            for e in walk:
                used.discard(e)
        return False

    if solve(n * n // d):
        return result
    raise Impossible(f"no equal split of K~_{n} into length-{d} trails",
                     reason="exhausted")


def decompose_equal(n, d, node_limit=2_000_000):
    """Decompose K~_n into n*n/d closed trails of length d.

    Raises Impossible for the two genuinely infeasible lengths (1 and 2,
    for n >= 2) and ValueError when d does not divide n*n.
    """
    if n < 1 or d < 1:
        raise ValueError("need n >= 1 and d >= 1")
    if (n * n) % d:
        raise ValueError(f"{d} does not divide n*n = {n * n}")
    if n == 1:
        return TrailDecomposition(1, 1, [ClosedTrail(((1, 1),))])
    if d == 1:
        raise Impossible(
            f"length 1 needs {n * n} loops but only {n} exist",
            reason="counting")
    if d == 2:
        raise Impossible(
            "length-2 trails are digon pairs and can never cover a loop",
            reason="counting")
    if d == n * n:
        all_edges = [(u, v) for u in range(1, n + 1) for v in range(1, n + 1)]
        trails = [euler_trail(all_edges)]
    elif d == 4 and n % 2 == 0:
        trails = prop17_trails(n)
    elif d in (3, 5, 7):
        trails = _prop18_trails(n, d, node_limit)
    elif d == 6 or d >= 8:
        try:
            trails = _prop16_trails(n, d, node_limit)
        except VerificationError:
            trails = decompose_exact(n, d, node_limit)
    else:
        trails = decompose_exact(n, d, node_limit)
    return TrailDecomposition(n, d, trails)


def chi_from_decomposition(q, decomposition):
    """Read a decomposition of K~_q into d trails of length q*q/d as a
    cyclic string: residue class a mod d carries trail a's vertex sequence.
    The result achieves every 2-word on translates of {0, d}."""
    trails = decomposition.trails if isinstance(
        decomposition, TrailDecomposition) else list(decomposition)
    d = len(trails)
    L = q * q // d
    if any(len(t) != L for t in trails):
        raise ValueError("trails must all have length q*q/d")
    for t in trails:
        if any(not (1 <= u <= q) for e in t.edges for u in e):
            raise ValueError("trail vertices must lie in 1..q")
    norm = []
    for t in trails:
        seq = t.vertex_sequence()
        best = min(range(L), key=lambda r: seq[r:] + seq[:r])
        norm.append(seq[best:] + seq[:best])
    norm.sort()
    out = [0] * (q * q)
    for a, seq in enumerate(norm):
        for bpos in range(L):
            out[a + bpos * d] = seq[bpos] - 1
    chi = CyclicString(q, tuple(out))
    rep = verify_cover(chi, CycleParams.unreduced(q, 2), (0, d % (q * q)))
    if not rep.complete:
        raise VerificationError("decomposition reading failed verification")
    return chi
