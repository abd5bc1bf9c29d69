"""Core domain types, the independent coverage verifier, and affine classes.

Everything downstream funnels through :func:`verify_cover`: the construction
and search modules emit cyclic strings whose coverage claims are re-checked
here, independently of how they were produced.

Conventions used across the package:

* alphabet symbols are ``0 .. q-1``,
* an index set is a sorted tuple of distinct residues,
* unreduced cycles live on ``Z_{q**n}``, reduced cycles on ``Z_{q**n - 1}``,
* words are tuples and, internally, radix-q integer codes (first symbol most
  significant, so code order equals lexicographic word order).
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import gcd

DESK_SCALE = 2 ** 32


class UcycleError(Exception):
    """Base error for this package."""


class VerificationError(UcycleError):
    """A constructed object failed its own verification."""


# ---------------------------------------------------------------------------
# cyclic strings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CyclicString:
    """A map from Z_N to the alphabet {0, ..., q-1}, N = len(symbols)."""

    q: int
    symbols: tuple

    def __post_init__(self):
        if self.q < 2:
            raise ValueError("alphabet size must be >= 2")
        if not self.symbols:
            raise ValueError("cyclic string must be nonempty")
        for s in self.symbols:
            if not 0 <= s < self.q:
                raise ValueError(f"symbol {s} out of range for q={self.q}")

    def __len__(self):
        return len(self.symbols)

    def __getitem__(self, i):
        return self.symbols[i % len(self.symbols)]

    def rotated(self, r):
        """The string s -> self[s + r]."""
        n = len(self.symbols)
        r %= n
        return CyclicString(self.q, self.symbols[r:] + self.symbols[:r])

    def translated(self, c):
        """Add the constant c to every symbol, mod q."""
        return CyclicString(self.q, tuple((s + c) % self.q for s in self.symbols))

    def text(self):
        """Cycle text format: digits for q <= 10, comma-separated otherwise."""
        if self.q <= 10:
            return "".join(str(s) for s in self.symbols)
        return ",".join(str(s) for s in self.symbols)

    @classmethod
    def from_text(cls, text, q):
        text = text.strip()
        if q <= 10:
            symbols = tuple(int(ch) for ch in text)
        else:
            symbols = tuple(int(part) for part in text.split(","))
        return cls(q, symbols)


def equal_up_to_rotation(a: CyclicString, b: CyclicString):
    if len(a) != len(b) or a.q != b.q:
        return False
    return any(a.rotated(r).symbols == b.symbols for r in range(len(a)))


def equal_up_to_rotation_and_translate(a: CyclicString, b: CyclicString):
    """True when b equals some rotation of a plus a constant, symbol-wise."""
    if len(a) != len(b) or a.q != b.q:
        return False
    return any(
        equal_up_to_rotation(a.translated(c), b) for c in range(a.q)
    )


# ---------------------------------------------------------------------------
# parameters, index sets, words
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CycleParams:
    """Alphabet size q, window size n, modulus L in {q**n, q**n - 1}."""

    q: int
    n: int
    L: int

    def __post_init__(self):
        if self.q < 2 or self.n < 1:
            raise ValueError("need q >= 2 and n >= 1")
        full = self.q ** self.n
        if full > DESK_SCALE:
            raise ValueError(f"q**n = {full} exceeds desk scale {DESK_SCALE}")
        if self.L not in (full, full - 1):
            raise ValueError(f"modulus {self.L} must be q**n or q**n - 1")

    @property
    def reduced_modulus(self):
        return self.L == self.q ** self.n - 1

    @classmethod
    def unreduced(cls, q, n):
        return cls(q, n, q ** n)

    @classmethod
    def reduced(cls, q, n):
        return cls(q, n, q ** n - 1)


def normalize_index_set(I, L):
    """Sorted tuple of the residues of I mod L; rejects collisions."""
    reduced = sorted(i % L for i in I)
    if len(set(reduced)) != len(reduced):
        raise ValueError(f"index set {tuple(I)} has repeated residues mod {L}")
    return tuple(reduced)


def word_code(word, q):
    c = 0
    for s in word:
        c = c * q + s
    return c


def code_word(code, q, n):
    out = []
    for _ in range(n):
        out.append(code % q)
        code //= q
    return tuple(reversed(out))


# ---------------------------------------------------------------------------
# windows and the coverage verifier
# ---------------------------------------------------------------------------


def window(chi: CyclicString, I, t):
    """The word read through the index set I at translate t."""
    n = len(chi)
    return tuple(chi.symbols[(i + t) % n] for i in I)


@dataclass
class CoverageReport:
    """Verdict of the independent verifier.

    ``hits`` maps each achieved word to one witnessing translate, or to the
    full list of witnesses when the verifier ran in exhaustive-witness mode.
    """

    complete: bool
    reduced: bool
    q: int
    n: int
    index_set: tuple
    missing: list
    hits: dict

    def to_json_dict(self, witness_sample=8):
        sample = {}
        for word, t in list(self.hits.items())[:witness_sample]:
            key = ",".join(str(s) for s in word)
            sample[key] = t
        return {
            "schema": 1,
            "complete": self.complete,
            "reduced": self.reduced,
            "q": self.q,
            "n": self.n,
            "index_set": list(self.index_set),
            "missing": [list(w) for w in self.missing],
            "witness_sample": sample,
        }


def verify_cover(chi: CyclicString, params, I, reduced=False,
                 all_witnesses=False):
    """Check which n-words appear on translates of I; report the misses.

    `params` is a CycleParams (strict modulus) or a plain (q, n) pair, in
    which case the string may have any length (approximate cycles).  In the
    reduced case the all-zeroes word is not required.  Completeness is
    equivalent (by counting) to the translate-to-word map being a bijection
    onto the required words, but this function checks coverage directly.
    """
    if isinstance(params, CycleParams):
        q, n = params.q, params.n
        N = params.L
        if len(chi) != N:
            raise ValueError(f"string length {len(chi)} != modulus {N}")
        if reduced and not params.reduced_modulus:
            raise ValueError("reduced verification requires modulus q**n - 1")
    else:
        q, n = params
        N = len(chi)
        if reduced:
            raise ValueError("reduced verification needs CycleParams")
    if chi.q != q:
        raise ValueError("alphabet mismatch between string and params")
    I = normalize_index_set(I, N)
    if len(I) != n:
        raise ValueError(f"index set size {len(I)} != window size {n}")

    symbols = chi.symbols
    powers = [q ** (n - 1 - j) for j in range(n)]
    hits = {}
    for t in range(N):
        c = 0
        for i, w in zip(I, powers):
            c += symbols[(i + t) % N] * w
        if all_witnesses:
            hits.setdefault(c, []).append(t)
        elif c not in hits:
            hits[c] = t

    required = range(1, q ** n) if reduced else range(q ** n)
    missing = [code_word(c, q, n) for c in required if c not in hits]
    report_hits = {code_word(c, q, n): t for c, t in sorted(hits.items())}
    return CoverageReport(
        complete=not missing,
        reduced=reduced,
        q=q,
        n=n,
        index_set=I,
        missing=missing,
        hits=report_hits,
    )


# ---------------------------------------------------------------------------
# affine equivalence
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AffineClass:
    """Canonical representative of an orbit under s -> k*s + b, k a unit."""

    canonical: tuple
    k: int
    b: int
    L: int


def units(L):
    return [k for k in range(1, L) if gcd(k, L) == 1]


def canonicalize_affine(I, L):
    """Lexicographically least sorted member of the affine orbit of I."""
    I = normalize_index_set(I, L)
    best = None
    best_map = (1, 0)
    for k in units(L):
        dil = sorted(k * i % L for i in I)
        for b in range(L):
            cand = tuple(sorted((x + b) % L for x in dil))
            if best is None or cand < best:
                best = cand
                best_map = (k, b)
    return AffineClass(canonical=best, k=best_map[0], b=best_map[1], L=L)


def affine_orbit(I, L):
    """All sorted tuples in the affine orbit of I."""
    I = normalize_index_set(I, L)
    orbit = set()
    for k in units(L):
        dil = sorted(k * i % L for i in I)
        for b in range(L):
            orbit.add(tuple(sorted((x + b) % L for x in dil)))
    return orbit


def affine_class_representatives(L, size):
    """Canonical representatives of every affine class of size-`size` subsets.

    Walks subsets in lexicographic order and expands whole orbits, so each
    class is touched once; suitable up to L around 40.
    """
    if not 1 <= size <= L:
        raise ValueError("size out of range")
    us = units(L)
    seen = set()
    reps = []
    for combo in combinations(range(L), size):
        mask = 0
        for i in combo:
            mask |= 1 << i
        if mask in seen:
            continue
        best = None
        for k in us:
            dil = sorted(k * i % L for i in combo)
            for b in range(L):
                member = tuple(sorted((x + b) % L for x in dil))
                m = 0
                for i in member:
                    m |= 1 << i
                seen.add(m)
                if best is None or member < best:
                    best = member
        reps.append(best)
    reps.sort()
    return reps


# ---------------------------------------------------------------------------
# de Bruijn digraphs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DeBruijnDigraph:
    """Vertices are q-ary n-strings (encoded radix-q); x -> y iff the last
    n-1 symbols of x equal the first n-1 symbols of y.  Loops included."""

    q: int
    n: int

    def __post_init__(self):
        if self.q < 2 or self.n < 1:
            raise ValueError("need q >= 2 and n >= 1")
        if self.q ** (self.n + 1) > DESK_SCALE:
            raise ValueError("digraph exceeds desk scale")

    @property
    def num_vertices(self):
        return self.q ** self.n

    @property
    def num_edges(self):
        return self.q ** (self.n + 1)

    def vertex_word(self, v):
        return code_word(v, self.q, self.n)

    def word_vertex(self, word):
        return word_code(word, self.q)

    def successors(self, v):
        base = (v % self.q ** (self.n - 1)) * self.q
        return [base + s for s in range(self.q)]

    def edges(self):
        for v in range(self.num_vertices):
            for w in self.successors(v):
                yield (v, w)

    def loops(self):
        return [v for v in range(self.num_vertices)
                if v in self.successors(v)]


def debruijn_digraph(q, n):
    return DeBruijnDigraph(q, n)
