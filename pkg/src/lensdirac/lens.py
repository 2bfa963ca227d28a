"""Lens space parameters, spin structures, isometries, canonical forms.

A lens space L(q; s_1,...,s_m) is the quotient of the unit sphere in C^m
by the cyclic isometry group generated by
    gamma = diag(rot(2*pi*s_1/q), ..., rot(2*pi*s_m/q)),
with every s_j coprime to q and m >= 2 (dimension n = 2m-1 >= 3).

Two such spaces are isometric iff there are a unit l mod q, a permutation
sigma and signs eps_j = +-1 with

    l * eps_j * s_j == s'_{sigma(j)}   (mod q)  for all j.           (*)

The map realizing (*) conjugates/permutes coordinates; each eps_j = -1
reverses orientation, so the witness is orientation preserving iff
prod eps_j = +1 (the permutation itself never reverses: a permutation of
complex coordinates is an even real rotation).

Spin structures: for odd q there is exactly one; for even q there are two
(labelled h = 0, 1) when m is even and none when m is odd.  The label is
attached to the lens space independently of the parameter representative
via the shift h(q;s) = sum_j floor(s_j/q) mod 2.  A witness (*) transports
labels by

    h' = h + h(q;s) + h(q;s') + sum_j rho_j   (mod 2),
    rho_j = (l * eps_j * s_j - s'_{sigma(j)}) / q  (an exact integer).

The searches below never enumerate permutations: for a fixed l the
coordinates must match up by folded residue {v, q-v}, and (for q > 2) the
orientation parity and transport parity are forced:

    #[eps_j = -1]  ==  #{j: l*s_j mod q > q/2} + #{k: s'_k mod q > q/2},
    sum_j rho_j    ==  sum_j floor(l*s_j_norm/q) + #[eps_j = -1]

with normalized parameters (each rho_j changes by exactly 1 when a
coordinate is matched across the fold, since -x = -(floor(x/q)+1)*q + ...).
That collapses the (sigma, eps) search to a multiset comparison per l.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Literal, Optional, Sequence

from .numtheory import units


class NotCoprime(ValueError):
    """A parameter s_j shares a factor with q."""

    def __init__(self, j: int, s: int, q: int):
        super().__init__(f"s[{j}] = {s} is not coprime to q = {q}")
        self.index = j


class DimensionTooSmall(ValueError):
    """Fewer than two parameters (dimension < 3)."""


class NoSpinStructure(ValueError):
    """L(q; s) with q even and m odd carries no spin structure."""


class Mismatch(ValueError):
    """Isometry search between spaces of different q or m."""


IsoMode = Literal["any", "preserving", "reversing"]
KeyMode = Literal["oriented", "unoriented"]


@dataclass(frozen=True)
class LensParams:
    """Parameters (q; s_1,...,s_m), stored exactly as given.

    Parameters are deliberately not normalized mod q: the spin shift
    h(q;s) depends on the raw integers, and normalization is the job of
    canonical_key.
    """

    q: int
    s: tuple[int, ...]

    def __post_init__(self):
        if self.q < 1:
            raise ValueError(f"q must be positive, got {self.q}")
        object.__setattr__(self, "s", tuple(self.s))
        if len(self.s) < 2:
            raise DimensionTooSmall(f"need m >= 2 parameters, got {len(self.s)}")
        for j, sj in enumerate(self.s):
            if math.gcd(sj, self.q) != 1:
                raise NotCoprime(j, sj, self.q)

    @property
    def m(self) -> int:
        return len(self.s)

    @property
    def dim(self) -> int:
        return 2 * len(self.s) - 1

    def normalized(self) -> tuple[int, ...]:
        """Residues of s in [0, q); [1, q) except for q = 1."""
        return tuple(sj % self.q for sj in self.s)


def make_lens(q: int, s: Sequence[int]) -> LensParams:
    return LensParams(q, tuple(s))


def h_shift(lens: LensParams) -> int:
    """Parity of sum_j floor(s_j / q) (true floor, negatives included)."""
    return sum(sj // lens.q for sj in lens.s) % 2


@dataclass(frozen=True)
class SpinLabel:
    """Spin structure label: h is None for the unique structure (odd q),
    0 or 1 for the two structures of an even-q space."""

    h: Optional[int] = None

    @property
    def tag(self) -> str:
        return "unique" if self.h is None else f"h{self.h}"

    @staticmethod
    def from_tag(tag: str) -> "SpinLabel":
        if tag == "unique":
            return SpinLabel(None)
        if tag in ("h0", "h1"):
            return SpinLabel(int(tag[1]))
        raise ValueError(f"unknown spin tag {tag!r}")

    def __str__(self) -> str:
        return self.tag


UNIQUE_SPIN = SpinLabel(None)


def spin_structures(lens: LensParams) -> list[SpinLabel]:
    """Spin structures of L(q; s): one for odd q, two for even q with m
    even, none for even q with m odd."""
    if lens.q % 2 == 1:
        return [UNIQUE_SPIN]
    if lens.m % 2 == 1:
        return []
    return [SpinLabel(0), SpinLabel(1)]


@dataclass(frozen=True)
class SpinLensSpace:
    lens: LensParams
    spin: SpinLabel

    def __post_init__(self):
        valid = spin_structures(self.lens)
        if not valid:
            raise NoSpinStructure(
                f"L(q={self.lens.q}; m={self.lens.m}) has no spin structure"
            )
        if self.spin not in valid:
            raise ValueError(
                f"spin {self.spin.tag} invalid for q={self.lens.q}: "
                f"expected one of {[x.tag for x in valid]}"
            )

    @property
    def q(self) -> int:
        return self.lens.q

    @property
    def s(self) -> tuple[int, ...]:
        return self.lens.s

    @property
    def m(self) -> int:
        return self.lens.m

    def __str__(self) -> str:
        return format_spin_lens(self)


def spin_space(q: int, s: Sequence[int], spin: str | SpinLabel | None = None) -> SpinLensSpace:
    """Build a SpinLensSpace; spin defaults to the unique structure when
    q is odd and must be given explicitly ("h0"/"h1") when q is even."""
    lens = make_lens(q, s)
    if isinstance(spin, str):
        label = SpinLabel.from_tag(spin)
    elif isinstance(spin, SpinLabel):
        label = spin
    elif spin is None:
        if q % 2 == 0:
            raise ValueError("spin label (h0/h1) required for even q")
        label = UNIQUE_SPIN
    else:
        raise TypeError(f"bad spin {spin!r}")
    return SpinLensSpace(lens, label)


def format_spin_lens(x: SpinLensSpace) -> str:
    params = ",".join(str(sj) for sj in x.s)
    base = f"L({x.q}; {params})"
    if x.spin.h is None:
        return base
    return f"{base} tau_{x.spin.h}"


@dataclass(frozen=True)
class IsometryWitness:
    """A solution of (*): l * eps[j] * s_j == s'[sigma[j]] (mod q).

    sigma is 0-based (source j maps to target slot sigma[j]); spin_shift
    is sum_j rho_j mod 2 computed from the raw parameters.
    """

    ell: int
    sigma: tuple[int, ...]
    eps: tuple[int, ...]
    spin_shift: int

    @property
    def orientation(self) -> int:
        prod = 1
        for e in self.eps:
            prod *= e
        return prod

    def verify(self, a: SpinLensSpace, b: SpinLensSpace, mode: IsoMode = "any") -> bool:
        """Exact re-check of every witness invariant."""
        la, lb = a.lens, b.lens
        q = la.q
        if lb.q != q or lb.m != la.m:
            return False
        m = la.m
        if sorted(self.sigma) != list(range(m)):
            return False
        if any(e not in (-1, 1) for e in self.eps):
            return False
        if q > 1 and math.gcd(self.ell, q) != 1:
            return False
        rho_sum = 0
        for j in range(m):
            diff = self.ell * self.eps[j] * la.s[j] - lb.s[self.sigma[j]]
            if diff % q != 0:
                return False
            rho_sum += diff // q
        if rho_sum % 2 != self.spin_shift:
            return False
        if mode == "preserving" and self.orientation != 1:
            return False
        if mode == "reversing" and self.orientation != -1:
            return False
        if a.spin.h is not None:
            expect = (a.spin.h + h_shift(la) + h_shift(lb) + self.spin_shift) % 2
            if b.spin.h != expect:
                return False
        return True


def _fold(v: int, q: int) -> int:
    return min(v, q - v) if v else 0


def _mode_parities(mode: IsoMode) -> frozenset[int]:
    if mode == "any":
        return frozenset((0, 1))
    if mode == "preserving":
        return frozenset((0,))
    if mode == "reversing":
        return frozenset((1,))
    raise ValueError(f"unknown mode {mode!r}")


def _ell_relations(sn_a: tuple[int, ...], sn_b: tuple[int, ...], q: int
                   ) -> Iterator[tuple[int, frozenset[tuple[int, int]]]]:
    """For each unit l with matching folded multisets, yield
    (l, achievable {(orientation parity, transport parity)}).

    Parameters must be normalized to [0, q).  For q > 2 exactly one pair
    is achievable per l; for q <= 2 the sign choices are free but flip
    both parities together.
    """
    if q == 1:
        # all eps choices act trivially on residues; with normalized
        # parameters (all zero) every rho_j is 0, so only the orientation
        # component is free
        yield 0, frozenset(((0, 0), (1, 0)))
        return
    if q == 2:
        # every normalized parameter is 1; eps is free and each flip
        # toggles orientation and transport parity together
        for ell in (1,):
            yield ell, frozenset(((0, 0), (1, 1)))
        return
    fb = sorted(_fold(u, q) for u in sn_b)
    u_high = sum(1 for u in sn_b if 2 * u > q)
    for ell in units(q):
        v = [(ell * x) % q for x in sn_a]
        fa = sorted(_fold(x, q) for x in v)
        if fa != fb:
            continue
        parity = (sum(1 for x in v if 2 * x > q) + u_high) % 2
        rho = (sum((ell * x) // q for x in sn_a) + parity) % 2
        yield ell, frozenset(((parity, rho),))


def _build_assignment(v: list[int], sn_b: tuple[int, ...], q: int
                      ) -> tuple[list[int], list[int]]:
    """Deterministic (sigma, eps) for matched folded multisets, q > 2."""
    m = len(v)
    slots_plus: dict[int, list[int]] = {}
    slots_minus: dict[int, list[int]] = {}
    for k, u in enumerate(sn_b):
        f = _fold(u, q)
        (slots_plus if 2 * u < q else slots_minus).setdefault(f, []).append(k)
    sigma = [-1] * m
    eps = [0] * m
    # same-type matches first (eps = +1), then cross matches (eps = -1)
    deferred: list[tuple[int, int]] = []  # (source index, folded value)
    for j, x in enumerate(v):
        f = _fold(x, q)
        own = slots_plus if 2 * x < q else slots_minus
        if own.get(f):
            sigma[j] = own[f].pop(0)
            eps[j] = 1
        else:
            deferred.append((j, f))
    for j, f in deferred:
        other = slots_minus if 2 * v[j] < q else slots_plus
        sigma[j] = other[f].pop(0)
        eps[j] = -1
    return sigma, eps


def _raw_spin_shift(ell: int, sigma: Sequence[int], eps: Sequence[int],
                    a: LensParams, b: LensParams) -> int:
    q = a.q
    total = 0
    for j in range(a.m):
        diff = ell * eps[j] * a.s[j] - b.s[sigma[j]]
        assert diff % q == 0
        total += diff // q
    return total % 2


def find_lens_isometry(a: LensParams, b: LensParams, mode: IsoMode = "any"
                       ) -> Optional[IsometryWitness]:
    """Witness of (*) between bare lens spaces (no spin constraint)."""
    return _find_witness(a, b, mode, spin_delta=None)


def find_isometry(a: SpinLensSpace, b: SpinLensSpace, mode: IsoMode = "any"
                  ) -> Optional[IsometryWitness]:
    """Witness of (*) transporting a's spin structure to b's.

    For odd q the unique structures are always transported; for even q
    the witness must satisfy the transport rule for the given labels.
    """
    if a.q != b.q or a.m != b.m:
        raise Mismatch(f"cannot compare q={a.q},m={a.m} with q={b.q},m={b.m}")
    if a.spin.h is None:
        delta = None
    else:
        # required transport parity in normalized-parameter convention
        delta = (b.spin.h - a.spin.h) % 2
    return _find_witness(a.lens, b.lens, mode, spin_delta=delta)


def _find_witness(a: LensParams, b: LensParams, mode: IsoMode,
                  spin_delta: Optional[int]) -> Optional[IsometryWitness]:
    if a.q != b.q or a.m != b.m:
        raise Mismatch(f"cannot compare q={a.q},m={a.m} with q={b.q},m={b.m}")
    q, m = a.q, a.m
    want = _mode_parities(mode)
    sn_a, sn_b = a.normalized(), b.normalized()
    for ell, pairs in _ell_relations(sn_a, sn_b, q):
        choices = [(p, r) for (p, r) in sorted(pairs)
                   if p in want and (spin_delta is None or r == spin_delta)]
        if not choices:
            continue
        parity = choices[0][0]
        if q <= 2:
            sigma = list(range(m))
            eps = [1] * m
            if parity == 1:
                eps[-1] = -1
        else:
            v = [(ell * x) % q for x in sn_a]
            sigma, eps = _build_assignment(v, sn_b, q)
        ell_rep = ell if q == 1 else ell % q
        witness = IsometryWitness(
            ell=ell_rep,
            sigma=tuple(sigma),
            eps=tuple(eps),
            spin_shift=_raw_spin_shift(ell_rep, sigma, eps, a, b),
        )
        return witness
    return None


@dataclass(frozen=True)
class CanonicalKey:
    """Orbit invariant: equal keys iff the spaces are related by an
    isometry of the key's mode (spin structures transported)."""

    q: int
    s: tuple[int, ...]
    spin: str
    mode: KeyMode

    def as_space(self) -> SpinLensSpace:
        return spin_space(self.q, self.s, self.spin)


def _oriented_candidates(v: list[int], q: int) -> Iterator[tuple[tuple[int, ...], int]]:
    """Minimal sorted value tuples achievable with an even number of sign
    flips, together with the flip count parity actually used (always 0
    mod 2 here; the second component is #flips mod 2 of the choice).

    Yields one candidate when the all-folded choice is even, else the m
    single-unfold candidates (flipping any extra pair only raises the
    sorted tuple pointwise, so exactly-one-unfold dominates).
    """
    folded = [_fold(x, q) for x in v]
    base_flips = sum(1 for x in v if 2 * x > q)
    if base_flips % 2 == 0:
        yield tuple(sorted(folded)), base_flips % 2
    else:
        for i in range(len(v)):
            cand = list(folded)
            cand[i] = q - folded[i]
            flips = base_flips + (1 if 2 * v[i] <= q else -1)
            yield tuple(sorted(cand)), flips % 2


def canonical_key(x: SpinLensSpace, mode: KeyMode = "unoriented") -> CanonicalKey:
    """Lexicographically minimal (parameter tuple, spin label) over the
    isometry group of the given mode.

    Entries of the canonical tuple lie in [1, q) ((0,...) for q = 1);
    ties between transported spin labels prefer h = 0.
    """
    if mode not in ("oriented", "unoriented"):
        raise ValueError(f"unknown mode {mode!r}")
    q, m = x.q, x.m
    h = x.spin.h
    sn = x.lens.normalized()
    if q == 1:
        return CanonicalKey(1, (0,) * m, "unique", mode)
    if q == 2:
        # all normalized parameters are 1; unoriented flips are free and
        # transport spin, oriented (even) flips transport nothing
        if h is None:
            spin_tag = "unique"
        elif mode == "unoriented":
            spin_tag = "h0"
        else:
            spin_tag = f"h{h}"
        return CanonicalKey(2, (1,) * m, spin_tag, mode)

    best: Optional[tuple[tuple[int, ...], int]] = None
    for ell in units(q):
        v = [(ell * xj) % q for xj in sn]
        floors = sum((ell * xj) // q for xj in sn)
        if mode == "unoriented":
            flips = sum(1 for xj in v if 2 * xj > q)
            cands = [(tuple(sorted(_fold(xj, q) for xj in v)), flips % 2)]
        else:
            cands = list(_oriented_candidates(v, q))
        for tup, flip_parity in cands:
            if h is None:
                hval = 0
            else:
                hval = (h + floors + flip_parity) % 2
            cand = (tup, hval)
            if best is None or cand < best:
                best = cand
    assert best is not None
    tup, hval = best
    spin_tag = "unique" if h is None else f"h{hval}"
    return CanonicalKey(q, tup, spin_tag, mode)


def self_transport_pairs(params: tuple[int, ...], q: int) -> frozenset[tuple[int, int]]:
    """Achievable (orientation parity, spin transport parity) pairs over
    all self-relations of the normalized tuple.  Used to decide whether
    the two spin structures of an even-q space are exchanged by an
    isometry, and whether the space admits an orientation-reversing
    self-isometry (amphichirality)."""
    sn = tuple(v % q for v in params)
    out: set[tuple[int, int]] = set()
    for _ell, pairs in _ell_relations(sn, sn, q):
        out |= pairs
        if len(out) == 4:
            break
    return frozenset(out)
