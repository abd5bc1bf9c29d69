"""Approximate cycles: dilation patch plans, randomized near-covers, and the
two-stage concatenation that upgrades a near-cover into a full cover.

The dilation plan picks a prime p slightly above n*n*(S+3) and a multiplier
k spreading the index set out mod p so that S consecutive translates can
each be assigned one prescribed word without collisions.  The randomized
stage draws a uniform string from a seeded Mersenne Twister stream; the full
construction doubles the random string, doubles a patch string for whatever
words were missed, concatenates, and re-verifies, appending further patch
blocks in the rare case a wrap-around seam still hides a word.

The tail-probability helper evaluates exp(-min(mu^2/8Delta, mu/2, mu/6delta))
exactly as written.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .core import CyclicString, UcycleError, VerificationError, verify_cover

RNG_ALGORITHM = "MT19937 (random.Random)"


class DilationError(UcycleError):
    """No multiplier achieved the required circular gap."""


@dataclass(frozen=True)
class DilationPlan:
    p: int
    k: int
    min_gap: int
    index_set: tuple
    words: int  # S


@dataclass
class ApproxResult:
    chi: CyclicString
    seed: int
    random_length: int
    patch_lengths: list
    missing_before_patch: int

    @property
    def construction_log(self):
        return {
            "rng": RNG_ALGORITHM,
            "seed": self.seed,
            "random_length": self.random_length,
            "patch_lengths": self.patch_lengths,
            "missing_before_patch": self.missing_before_patch,
            "total_length": len(self.chi),
        }


def smallest_prime_above(x):
    n = x + 1
    while True:
        if n >= 2 and all(n % d for d in range(2, int(n ** 0.5) + 1)):
            return n
        n += 1


def _min_circular_gap(residues, p):
    rs = sorted(residues)
    if len(rs) != len(set(rs)):
        return 0
    gaps = [rs[i + 1] - rs[i] for i in range(len(rs) - 1)]
    gaps.append(rs[0] + p - rs[-1])
    return min(gaps)


def plan_dilation(I, S, min_p=None):
    """Prime p = smallest prime > n*n*(S+3) and the multiplier k maximizing
    the minimum circular gap of k*I mod p (smallest k on ties); accepted
    when the gap reaches S.  `min_p` can force a larger prime when the plan
    will be embedded in a longer string."""
    I = tuple(sorted(set(I)))
    n = len(I)
    if S < 0:
        raise ValueError("S must be nonnegative")
    bound = n * n * (S + 3)
    if min_p is not None:
        bound = max(bound, min_p - 1)
    p = smallest_prime_above(bound)
    if n == 1:
        return DilationPlan(p=p, k=1, min_gap=p, index_set=I, words=S)
    best_k, best_gap = 1, -1
    for k in range(1, p):
        gap = _min_circular_gap([k * i % p for i in I], p)
        if gap > best_gap:
            best_k, best_gap = k, gap
            if best_gap >= p // n:
                break  # n gaps sum to p, so floor(p/n) is already the max
    if best_gap < S:
        raise DilationError(f"no multiplier reaches gap {S} for {I} mod {p}")
    return DilationPlan(p=p, k=best_k, min_gap=best_gap, index_set=I, words=S)


def patch_sequence(I, words, q, min_p=None):
    """A cyclic string achieving every prescribed word on some translate of
    I: word t sits at the dilated positions, then the whole string is read
    back through the multiplier.  Unassigned positions are 0."""
    I = tuple(sorted(set(I)))
    n = len(I)
    words = list(words)
    for w in words:
        if len(w) != n or any(not 0 <= s < q for s in w):
            raise ValueError("words must be length-n over the alphabet")
    if len(set(words)) != len(words):
        raise ValueError("words must be distinct")
    S = len(words)
    plan = plan_dilation(I, S, min_p=min_p)
    p, k = plan.p, plan.k
    raw = [0] * p
    for t in range(1, S + 1):
        for j, i in enumerate(I):
            raw[(k * i + t) % p] = words[t - 1][j]
    dilated = [raw[(k * s) % p] for s in range(p)]
    chi = CyclicString(q, tuple(dilated))
    achieved = set()
    for t in range(p):
        achieved.add(tuple(chi.symbols[(i + t) % p] for i in I))
    for w in words:
        if tuple(w) not in achieved:
            raise VerificationError("patch string missed a prescribed word")
    return chi


def type2_random(q, n, I, m, seed):
    """Uniform random string of length m from the seeded stream, plus the
    exact count of n-words never achieved on translates of I."""
    if m < 1:
        raise ValueError("m must be positive")
    rng = random.Random(seed)
    symbols = tuple(rng.randrange(q) for _ in range(m))
    chi = CyclicString(q, symbols)
    I = tuple(i % m for i in I)
    achieved = set()
    for t in range(m):
        achieved.add(tuple(symbols[(i + t) % m] for i in I))
    return chi, q ** n - len(achieved)


def linear_missing(q, n, I, chi):
    """Words not achieved by any window fully inside the string (no wrap);
    monotone under extension, used by the coverage property tests."""
    span = max(I) - min(I)
    m = len(chi)
    achieved = set()
    for t in range(m - span):
        achieved.add(tuple(chi.symbols[i + t] for i in I))
    return q ** n - len(achieved)


def type1_construct(q, n, I, seed):
    """Doubled random stage plus doubled patch stage, re-verified; extra
    patch blocks are appended until the verifier reports full coverage.

    Termination: a patch block for the currently missing words witnesses
    each of them on a window interior to the block, and interior windows
    survive all later appends; only seam-crossing witnesses can break, and
    their words rejoin the missing set of the next round.
    """
    I = tuple(sorted(set(i % (q ** n) for i in I)))
    if len(I) != n:
        raise ValueError("index set must have n distinct residues")
    if n == 1:
        chi = CyclicString(q, tuple(range(q)))
        rep = verify_cover(chi, (q, 1), I)
        if not rep.complete:
            raise VerificationError("alphabet run failed verification")
        return ApproxResult(chi=chi, seed=seed, random_length=q,
                            patch_lengths=[], missing_before_patch=0)

    span = max(I) - min(I)
    m = max(1, math.ceil(4 * q ** n * math.log(n)))
    t1, missed = type2_random(q, n, I, m, seed)
    symbols = list(t1.symbols) + list(t1.symbols)
    patch_lengths = []

    for _ in range(12):
        chi = CyclicString(q, tuple(symbols))
        achieved = set()
        N = len(symbols)
        for t in range(N):
            achieved.add(tuple(symbols[(i + t) % N] for i in I))
        missing = [w for w in _all_words(q, n) if w not in achieved]
        if not missing:
            result = ApproxResult(
                chi=chi, seed=seed, random_length=m,
                patch_lengths=patch_lengths, missing_before_patch=missed)
            rep = verify_cover(chi, (q, n), I)
            if not rep.complete:
                raise VerificationError("construction failed verification")
            if len(chi) < q ** n:
                raise VerificationError(
                    "full cover shorter than the word count")
            return result
        block = patch_sequence(I, missing, q, min_p=span + 1)
        patch_lengths.append(len(block))
        symbols = symbols + list(block.symbols) + list(block.symbols)
    raise VerificationError("patch loop did not converge")


def _all_words(q, n):
    out = []
    for c in range(q ** n):
        w = []
        for _ in range(n):
            w.append(c % q)
            c //= q
        out.append(tuple(reversed(w)))
    return out


def janson_bound(mu, Delta, delta):
    """exp(-min(mu^2 / (8*Delta), mu / 2, mu / (6*delta)))."""
    if Delta <= 0 or delta <= 0:
        raise ValueError("Delta and delta must be positive")
    if mu < 0:
        raise ValueError("mu must be nonnegative")
    return math.exp(-min(mu * mu / (8 * Delta), mu / 2, mu / (6 * delta)))
