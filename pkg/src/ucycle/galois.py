"""Finite-field machinery: field tables, coordinate sequences, and the
ordinary/exceptional classification of index sets.

Fields F_{p**m} are represented as integers 0..p**m-1 encoding coefficient
vectors base p against a monic modulus chosen so that x is primitive
(for m = 1, the least primitive root plays the role of x).  Multiplication
goes through exp/log tables relative to that primitive element.

A ground field F_q with q = p**k sits inside F_{p**(k*n)} as the fixed field
of the k-fold Frobenius; its elements are enumerated by coefficient vectors
against powers of a fixed subfield generator, which pins down the symbol
alphabet 0..q-1 once and for all.

An index set I = {i_1..i_n} (exponents mod q**n - 1) is *ordinary* when some
generator alpha of the multiplicative group makes {alpha**i_j} linearly
independent over F_q, and *exceptional* when every generator gives a
dependent set.  Ordinary sets admit reduced cycles: the coordinate sequence
of successive powers of a witnessing generator achieves every nonzero word
on translates of I.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass

from .core import CycleParams, CyclicString, UcycleError, VerificationError, verify_cover

ORDINARY = "ordinary"
EXCEPTIONAL = "exceptional"


class ExceptionalInput(UcycleError):
    """The index set is exceptional, so this construction cannot apply."""


def is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def prime_power(q):
    """(p, k) with q = p**k, or ValueError."""
    for p in range(2, q + 1):
        if q % p == 0:
            k = 0
            m = q
            while m % p == 0:
                m //= p
                k += 1
            if m == 1:
                return p, k
            raise ValueError(f"{q} is not a prime power")
    raise ValueError(f"{q} is not a prime power")


# ---------------------------------------------------------------------------
# field construction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldCtx:
    """F_{p**m} with exp/log tables for the primitive element exp[1]."""

    p: int
    m: int
    modulus: tuple   # monic, ascending coefficients, length m+1
    exp: tuple       # exp[j] = alpha**j, j in [0, p**m - 1)
    log: tuple       # inverse of exp on nonzero elements; log[0] = -1

    @property
    def order(self):
        return self.p ** self.m

    @property
    def mult_order(self):
        return self.p ** self.m - 1

    @property
    def alpha(self):
        return self.exp[1]

    def add(self, x, y):
        if self.p == 2:
            return x ^ y
        p = self.p
        out = 0
        mult = 1
        for _ in range(self.m):
            out += ((x + y) % p) * mult
            x //= p
            y //= p
            mult *= p
        return out

    def neg(self, x):
        p = self.p
        out = 0
        mult = 1
        for _ in range(self.m):
            out += (-x % p) * mult
            x //= p
            mult *= p
        return out

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def mul(self, x, y):
        if x == 0 or y == 0:
            return 0
        return self.exp[(self.log[x] + self.log[y]) % self.mult_order]

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError("0 has no inverse")
        return self.exp[(-self.log[x]) % self.mult_order]

    def pow(self, x, e):
        if x == 0:
            return 0 if e else 1
        return self.exp[(self.log[x] * e) % self.mult_order]

    def digits(self, x):
        p = self.p
        return tuple((x // p ** i) % p for i in range(self.m))


def _mul_by_x(digits, modulus, p):
    m = len(digits)
    top = digits[-1]
    out = [0] + list(digits[:-1])
    if top:
        for i in range(m):
            out[i] = (out[i] - top * modulus[i]) % p
    return out


def _order_of_x(p, m, modulus):
    """Length of the cycle of x under repeated multiplication, or 0 if the
    iteration degenerates (reducible modulus with x a zero divisor)."""
    one = [0] * m
    one[0] = 1
    cur = list(one)
    for step in range(1, p ** m):
        cur = _mul_by_x(cur, modulus, p)
        if all(c == 0 for c in cur):
            return 0
        if cur == one:
            return step
    return 0


def find_primitive_modulus(p, m):
    """Least monic degree-m modulus (by ascending coefficient code) making x
    a primitive element; x having full order forces irreducibility too."""
    target = p ** m - 1
    for code in range(p ** m):
        modulus = [(code // p ** i) % p for i in range(m)] + [1]
        if modulus[0] == 0:
            continue  # x would be a zero divisor
        if _order_of_x(p, m, modulus) == target:
            return tuple(modulus)
    raise VerificationError(f"no primitive modulus of degree {m} over F_{p}")


def _cache_path(cache_dir, p, m, modulus):
    tag = f"gf_{p}_{m}_" + "-".join(str(c) for c in modulus)
    return os.path.join(cache_dir, tag + ".json")


def build_field(p, m, modulus=None, cache_dir=None):
    """Construct F_{p**m}; tables are cached on disk when a directory is
    given (keyed by p, m, and the modulus).  UCYCLE_FIELD_CACHE supplies a
    default cache directory."""
    if cache_dir is None:
        cache_dir = os.environ.get("UCYCLE_FIELD_CACHE") or None
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p ** m > 2 ** 24:
        raise ValueError("field exceeds desk scale")
    if m == 1:
        g = next(g for g in range(2, p)
                 if _multiplicative_order(g, p) == p - 1) if p > 2 else 1
        exp = [1]
        for _ in range(p - 2):
            exp.append(exp[-1] * g % p)
        log = [-1] * p
        for j, e in enumerate(exp):
            log[e] = j
        return FieldCtx(p, 1, (p - g, 1), tuple(exp), tuple(log))

    if modulus is None:
        modulus = find_primitive_modulus(p, m)
    modulus = tuple(modulus)
    if cache_dir:
        path = _cache_path(cache_dir, p, m, modulus)
        if os.path.exists(path):
            with open(path) as fh:
                data = json.load(fh)
            return FieldCtx(p, m, modulus, tuple(data["exp"]),
                            tuple(data["log"]))
    if _order_of_x(p, m, modulus) != p ** m - 1:
        raise ValueError("modulus does not make x primitive")
    cur = [0] * m
    cur[0] = 1
    exp = []
    for _ in range(p ** m - 1):
        exp.append(sum(c * p ** i for i, c in enumerate(cur)))
        cur = _mul_by_x(cur, modulus, p)
    log = [-1] * p ** m
    for j, e in enumerate(exp):
        log[e] = j
    ctx = FieldCtx(p, m, modulus, tuple(exp), tuple(log))
    if cache_dir:
        os.makedirs(cache_dir, exist_ok=True)
        with open(_cache_path(cache_dir, p, m, modulus), "w") as fh:
            json.dump({"exp": list(ctx.exp), "log": list(ctx.log)}, fh)
    return ctx


def _multiplicative_order(g, p):
    x, k = g % p, 1
    while x != 1:
        x = x * g % p
        k += 1
        if k > p:
            return 0
    return k


# ---------------------------------------------------------------------------
# subfield bases and coordinate sequences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SubfieldBasis:
    """Basis of F_{p**(k*n)} over the subfield F_q, q = p**k, with the
    machinery to extract F_q-coordinates of any element."""

    ctx: FieldCtx
    k: int
    basis: tuple          # n field elements
    sym_elem: tuple       # symbol s -> subfield element
    elem_sym: dict        # inverse of sym_elem
    inverse_rows: tuple   # (k*n) x (k*n) matrix over F_p, row-major

    @property
    def q(self):
        return self.ctx.p ** self.k

    @property
    def n(self):
        return self.ctx.m // self.k

    def coords(self, gamma):
        """F_q-coordinates of gamma against the basis, as symbols."""
        ctx, p, k, n = self.ctx, self.ctx.p, self.k, self.n
        vec = ctx.digits(gamma)
        m = k * n
        out = []
        for j in range(n):
            sym = 0
            for i in range(k):
                row = self.inverse_rows[j * k + i]
                acc = sum(row[t] * vec[t] for t in range(m)) % p
                sym += acc * p ** i
            out.append(sym)
        return tuple(out)

    def from_coords(self, symbols):
        ctx = self.ctx
        acc = 0
        for sym, b in zip(symbols, self.basis):
            acc = ctx.add(acc, ctx.mul(self.sym_elem[sym], b))
        return acc


def _invert_matrix_mod_p(cols, p):
    """Invert the matrix whose columns are `cols` (F_p vectors); returns the
    rows of the inverse, or None when singular."""
    m = len(cols)
    aug = [[cols[j][i] for j in range(m)] + [1 if t == i else 0
                                             for t in range(m)]
           for i in range(m)]
    row = 0
    for col in range(m):
        piv = next((r for r in range(row, m) if aug[r][col] % p), None)
        if piv is None:
            return None
        aug[row], aug[piv] = aug[piv], aug[row]
        inv = pow(aug[row][col], -1, p)
        aug[row] = [v * inv % p for v in aug[row]]
        for r in range(m):
            if r != row and aug[r][col]:
                f = aug[r][col]
                aug[r] = [(a - f * b) % p for a, b in zip(aug[r], aug[row])]
        row += 1
    return tuple(tuple(r[m:]) for r in aug)


def subfield_generator(ctx, k):
    """Fixed generator of the subfield F_{p**k} inside ctx."""
    if ctx.m % k:
        raise ValueError("subfield degree must divide m")
    return ctx.exp[(ctx.mult_order // (ctx.p ** k - 1)) % ctx.mult_order]


def subfield_basis(ctx, k, basis=None, generator=None):
    """Build the coordinate machinery for F_q = F_{p**k} inside ctx.

    The default basis is 1, alpha, ..., alpha**(n-1) for the table primitive
    alpha; `generator` substitutes another element whose powers should form
    the basis.
    """
    p = ctx.p
    if ctx.m % k:
        raise ValueError("k must divide m")
    n = ctx.m // k
    q = p ** k
    g = subfield_generator(ctx, k)
    sym_elem = []
    for s in range(q):
        acc = 0
        cur = 1
        for i in range(k):
            digit = (s // p ** i) % p
            acc = ctx.add(acc, _scalar_mul(ctx, digit, cur))
            cur = ctx.mul(cur, g)
        sym_elem.append(acc)
    if len(set(sym_elem)) != q:
        raise VerificationError("subfield enumeration collided")
    elem_sym = {e: s for s, e in enumerate(sym_elem)}

    if basis is None:
        a = generator if generator is not None else ctx.alpha
        basis = []
        cur = 1
        for _ in range(n):
            basis.append(cur)
            cur = ctx.mul(cur, a)
    basis = tuple(basis)
    cols = []
    for b in basis:
        for i in range(k):
            cols.append(ctx.digits(ctx.mul(sym_elem_power(ctx, g, i), b)))
    inverse = _invert_matrix_mod_p(cols, p)
    if inverse is None:
        raise ValueError("not a basis over the subfield")
    return SubfieldBasis(ctx=ctx, k=k, basis=basis, sym_elem=tuple(sym_elem),
                         elem_sym=elem_sym, inverse_rows=inverse)


def sym_elem_power(ctx, g, i):
    out = 1
    for _ in range(i):
        out = ctx.mul(out, g)
    return out


def _scalar_mul(ctx, digit, elem):
    out = 0
    for _ in range(digit):
        out = ctx.add(out, elem)
    return out


@dataclass
class LambdaSeq:
    """Coordinate sequence of successive generator powers: position j holds
    v . coords(generator**j), a reduced-length cyclic string."""

    chi: CyclicString
    generator: int
    basis: tuple
    v: tuple


def lambda_sequence(sb: SubfieldBasis, v, generator=None):
    """The length q**n - 1 string whose j-th symbol is v^T f_B(alpha**j)."""
    ctx = sb.ctx
    q, n = sb.q, sb.n
    if len(v) != n or all(s == 0 for s in v):
        raise ValueError("v must be a nonzero length-n symbol vector")
    g0 = generator if generator is not None else ctx.alpha
    v_elems = [sb.sym_elem[s] for s in v]
    out = []
    cur = 1
    for _ in range(q ** n - 1):
        coords = sb.coords(cur)
        acc = 0
        for ve, cs in zip(v_elems, coords):
            acc = ctx.add(acc, ctx.mul(ve, sb.sym_elem[cs]))
        out.append(sb.elem_sym[acc])
        cur = ctx.mul(cur, g0)
    return LambdaSeq(chi=CyclicString(q, tuple(out)), generator=g0,
                     basis=sb.basis, v=tuple(v))


# ---------------------------------------------------------------------------
# ordinary / exceptional classification
# ---------------------------------------------------------------------------


@dataclass
class ExceptionalVerdict:
    verdict: str
    q: int
    n: int
    index_set: tuple
    witness_generator: int | None      # ordinary: a witnessing generator
    witness_poly: tuple | None         # its minimal polynomial over F_q
    dependencies: dict                 # exceptional: exponent u -> coeffs

    @property
    def ordinary(self):
        return self.verdict == ORDINARY


def _fq_dependency(sb, elements):
    """None when the elements are F_q-independent; otherwise a nonzero
    F_q-coefficient vector (as symbols) combining them to zero."""
    ctx = sb.ctx
    n = len(elements)
    rows = []
    for idx, e in enumerate(elements):
        coords = [sb.sym_elem[c] for c in sb.coords(e)]
        combo = [sb.sym_elem[1 if t == idx else 0] for t in range(n)]
        rows.append((coords, combo))
    lead = 0
    for col in range(sb.n):
        piv = next((r for r in range(lead, len(rows))
                    if rows[r][0][col] != 0), None)
        if piv is None:
            continue
        rows[lead], rows[piv] = rows[piv], rows[lead]
        pc, pcombo = rows[lead]
        pinv = ctx.inv(pc[col])
        pc = [ctx.mul(x, pinv) for x in pc]
        pcombo = [ctx.mul(x, pinv) for x in pcombo]
        rows[lead] = (pc, pcombo)
        for r in range(len(rows)):
            if r != lead and rows[r][0][col] != 0:
                f = rows[r][0][col]
                rc = [ctx.sub(x, ctx.mul(f, y))
                      for x, y in zip(rows[r][0], pc)]
                rcombo = [ctx.sub(x, ctx.mul(f, y))
                          for x, y in zip(rows[r][1], pcombo)]
                rows[r] = (rc, rcombo)
        lead += 1
        if lead == len(rows):
            break
    for coords, combo in rows:
        if all(c == 0 for c in coords):
            return tuple(sb.elem_sym[c] for c in combo)
    return None


def min_poly(sb: SubfieldBasis, beta):
    """Minimal polynomial of beta over F_q as ascending symbol coefficients,
    monic; beta must generate the full extension (degree n)."""
    ctx = sb.ctx
    n = sb.n
    powers = []
    cur = 1
    for _ in range(n + 1):
        powers.append(cur)
        cur = ctx.mul(cur, beta)
    dep = _fq_dependency(sb, powers)
    if dep is None or dep[n] == 0:
        raise VerificationError("element does not have degree n")
    lead_inv = ctx.inv(sb.sym_elem[dep[n]])
    coeffs = []
    for s in dep:
        coeffs.append(sb.elem_sym[ctx.mul(sb.sym_elem[s], lead_inv)])
    return tuple(coeffs)


def _coprime_exponents(order):
    from math import gcd
    return [u for u in range(1, order) if gcd(u, order) == 1]


def is_exceptional_bruteforce(I, q, n, full_sweep=False):
    """Classify I by sweeping every generator of the multiplicative group.

    Ordinary verdicts come with a witnessing generator and its minimal
    polynomial; exceptional verdicts carry one dependency vector per
    generator exponent, each re-verifiable by direct evaluation.
    """
    p, k = prime_power(q)
    ctx = build_field(p, k * n)
    sb = subfield_basis(ctx, k)
    order = q ** n - 1
    if len(I) != n:
        raise ValueError(f"need {n} exponents")
    # exponents that collide mod the group order repeat the same power, so
    # the set is dependent for every generator; keep them as given
    I = tuple(sorted(i % order for i in I))
    deps = {}
    witness = None
    for u in _coprime_exponents(order):
        beta_pows = [ctx.exp[(u * i) % order] for i in I]
        dep = _fq_dependency(sb, beta_pows)
        if dep is None:
            if witness is None:
                witness = u
            if not full_sweep:
                break
        else:
            deps[u] = dep
    if witness is not None:
        beta = ctx.exp[witness]
        return ExceptionalVerdict(
            verdict=ORDINARY, q=q, n=n, index_set=I,
            witness_generator=beta, witness_poly=min_poly(sb, beta),
            dependencies={})
    return ExceptionalVerdict(
        verdict=EXCEPTIONAL, q=q, n=n, index_set=I,
        witness_generator=None, witness_poly=None, dependencies=deps)


def two_element_ordinary(q, diff):
    """Two-exponent criterion: ordinary iff q + 1 does not divide the
    difference (well-defined mod q**2 - 1)."""
    return diff % (q + 1) != 0


# ---------------------------------------------------------------------------
# Jacobi logarithm and the three-element criterion
# ---------------------------------------------------------------------------


def jacobi_log(ctx: FieldCtx):
    """Table L with 1 + alpha**t = alpha**L[t]; None at the unique excluded
    point (t = 0 in characteristic 2, t = (order-1)/2 otherwise)."""
    s = 0 if ctx.p == 2 else ctx.mult_order // 2
    table = []
    for t in range(ctx.mult_order):
        val = ctx.add(1, ctx.exp[t])
        if val == 0:
            if t != s:
                raise VerificationError("excluded point out of place")
            table.append(None)
        else:
            table.append(ctx.log[val])
    return table


def exceptional_triple(i, j, k, q, reading="universal", _cache={}):
    """Three-exponent criterion via the Jacobi logarithm.

    True when Q = q*q + q + 1 divides one of the pairwise differences, or
    when the logarithm condition holds for multipliers m coprime to
    q**3 - 1; `reading` picks the quantifier over m ("universal" is the
    generator-complete form, "existential" the weaker one)."""
    order = q ** 3 - 1
    i, j, k = i % order, j % order, k % order
    Q = q * q + q + 1
    # colliding exponents repeat a power and land in the divisibility branch
    # (order is a multiple of Q), so they classify as exceptional here
    if any(d % Q == 0 for d in ((j - i) % order, (k - j) % order,
                                (k - i) % order)):
        return True
    key = q
    if key not in _cache:
        p, kk = prime_power(q)
        ctx = build_field(p, 3 * kk)
        _cache[key] = (ctx, jacobi_log(ctx))
    ctx, L = _cache[key]

    def log_condition(m):
        tgt = (m * (k - i)) % Q
        for a in range(order // Q):
            t = (a * Q + m * (j - i)) % order
            if L[t] is None:
                continue
            if L[t] % Q == tgt:
                return True
        return False

    ms = _coprime_exponents(order)
    if reading == "universal":
        return all(log_condition(m) for m in ms)
    if reading == "existential":
        return any(log_condition(m) for m in ms)
    raise ValueError("reading must be 'universal' or 'existential'")


def triple_readings(i, j, k, q):
    """Both quantifier readings, for disagreement reports."""
    return (exceptional_triple(i, j, k, q, "universal"),
            exceptional_triple(i, j, k, q, "existential"))


# ---------------------------------------------------------------------------
# reduced cycles
# ---------------------------------------------------------------------------


def build_reduced_cycle(I, q, n):
    """A verified reduced cycle for an ordinary index set.

    Scans minimal polynomials of generators in ascending coefficient order
    and keeps the first whose root powers {alpha**i_j} are independent; the
    coordinate sequence of that root is the certificate, checked against the
    reduced verifier before being returned.
    """
    p, k = prime_power(q)
    ctx = build_field(p, k * n)
    sb = subfield_basis(ctx, k)
    order = q ** n - 1
    I = tuple(sorted(i % order for i in I))
    if len(set(I)) != n:
        raise ValueError(f"need {n} distinct exponents mod {order}")
    by_poly = {}
    for u in _coprime_exponents(order):
        beta = ctx.exp[u]
        g = min_poly(sb, beta)
        if g in by_poly:
            continue
        beta_pows = [ctx.exp[(u * i) % order] for i in I]
        by_poly[g] = (u, _fq_dependency(sb, beta_pows) is None)
    for g in sorted(by_poly):
        u, independent = by_poly[g]
        if not independent:
            continue
        beta = ctx.exp[u]
        basis_sb = subfield_basis(ctx, k, generator=beta)
        v = tuple([1] + [0] * (n - 1))
        seq = lambda_sequence(basis_sb, v, generator=beta)
        report = verify_cover(seq.chi, CycleParams.reduced(q, n), I,
                              reduced=True)
        if not report.complete:
            raise VerificationError(
                "reduced cycle failed verification despite independence")
        return seq
    raise ExceptionalInput(
        f"{I} is exceptional for q={q}; no generator gives independence")


def psi_map(seq: LambdaSeq, sb: SubfieldBasis, I):
    """The additive transport: 0 -> 0 and generator**t -> the word of
    sequence symbols at positions I + t; returns element -> word."""
    ctx = sb.ctx
    order = sb.q ** sb.n - 1
    I = [i % order for i in I]
    chi = seq.chi
    out = {0: tuple([0] * len(I))}
    cur = 1
    for t in range(order):
        out[cur] = tuple(chi.symbols[(i + t) % order] for i in I)
        cur = ctx.mul(cur, seq.generator)
    return out
