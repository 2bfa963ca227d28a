"""Census machinery: enumerate isometry classes of spin lens spaces at a
fixed dimension and group order, fingerprint every class, and partition
into isospectral families.  Also: generators for the known infinite
families, a from-scratch family verifier, and result persistence.

Class enumeration is vectorized: all candidate parameter multisets are
canonicalized in bulk with numpy, one lexicographic-minimum update per
unit of the residue ring.  Fingerprinting is a plain map over the
representatives (optionally threaded, LENSDIRAC_THREADS); grouping is a
single-threaded reduction in enumeration order, so output is
deterministic.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement
from typing import Iterable, Optional, Sequence

import numpy as np

from .lens import (
    KeyMode,
    NoSpinStructure,
    SpinLensSpace,
    find_isometry,
    format_spin_lens,
    self_transport_pairs,
    spin_space,
)
from .lattice import Backend, ReducedCountTable
from .numtheory import units
from .spectrum import dirac_isospectral, fingerprint, inverse_isospectral


class VerificationFailed(Exception):
    """A family failed one of its from-scratch checks."""


class IoError(Exception):
    """Filesystem trouble while saving or loading results."""


class FormatError(Exception):
    """A results file does not parse or does not fit the schema."""


FORMAT_VERSION = 1


@dataclass(frozen=True)
class IsospectralFamily:
    """A group of >= 2 pairwise isospectral classes sharing a fingerprint
    digest.  trivial_flags has one entry per member pair (i < j, in
    lexicographic pair order): True when some isometry relates the pair
    with spin structures transported, i.e. when the coincidence is
    explained away by geometry."""

    digest: str
    members: tuple[SpinLensSpace, ...]
    trivial_flags: tuple[bool, ...]

    def __post_init__(self):
        k = len(self.members)
        assert k >= 2
        assert len(self.trivial_flags) == k * (k - 1) // 2


@dataclass(frozen=True)
class CensusResult:
    n: int
    q: int
    mode: str
    families: tuple[IsospectralFamily, ...]
    classes: int
    fingerprints: int
    seconds: float
    note: str = ""


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple[str, ...]

    def __str__(self) -> str:
        return "\n".join(self.checks)


def _folded_units(q: int) -> list[int]:
    return [f for f in range(1, q // 2 + 1) if math.gcd(f, q) == 1]


def _lex_update(best: np.ndarray, cand: np.ndarray, mask: np.ndarray) -> None:
    """Rowwise best = min(best, cand) lexicographically, on masked rows."""
    less = np.zeros(len(best), dtype=bool)
    tie = mask.copy()
    for j in range(best.shape[1]):
        col_c, col_b = cand[:, j], best[:, j]
        less |= tie & (col_c < col_b)
        tie &= col_c == col_b
    if less.any():
        best[less] = cand[less]


def _canonical_tuples(q: int, m: int, mode: KeyMode) -> list[tuple[int, ...]]:
    """All canonical parameter tuples for the given mode, lexicographically
    sorted.  Matches lens.canonical_key exactly (property-tested)."""
    if q == 1:
        return [(0,) * m]
    if q == 2:
        return [(1,) * m]
    F = _folded_units(q)
    A = np.array(list(combinations_with_replacement(F, m)), dtype=np.int64)
    ells = units(q)

    if mode == "unoriented":
        best = np.full_like(A, q)
        everything = np.ones(len(A), dtype=bool)
        for ell in ells:
            B = (ell * A) % q
            np.minimum(B, q - B, out=B)
            B.sort(axis=1)
            _lex_update(best, B, everything)
        keep = np.all(A == best, axis=1)
        return [tuple(map(int, row)) for row in A[keep]]

    # Oriented: folded multisets only reach the classes that contain an
    # all-folded representative; each chiral partner is reached from the
    # mirror row (one coordinate reflected).
    mirror = A.copy()
    mirror[:, -1] = q - mirror[:, -1]
    U = np.vstack([A, mirror])
    best = np.full_like(U, q)
    for ell in ells:
        B = (ell * U) % q
        G = np.minimum(B, q - B)
        odd = ((B != G).sum(axis=1) % 2).astype(bool)
        even = ~odd
        Gs = np.sort(G, axis=1)
        _lex_update(best, Gs, even)
        if odd.any():
            # an odd number of folds reverses orientation; leave exactly
            # one coordinate unfolded (every position is a candidate)
            for i in range(U.shape[1]):
                Ci = G.copy()
                Ci[:, i] = q - G[:, i]
                Ci.sort(axis=1)
                _lex_update(best, Ci, odd)
    assert (best < q).all()
    uniq = np.unique(best, axis=0)
    return [tuple(map(int, row)) for row in uniq]


def enumerate_classes(n: int, q: int, mode: KeyMode = "unoriented") -> tuple[SpinLensSpace, ...]:
    """One representative per isometry class of spin lens spaces of
    dimension n and order q, in deterministic (lexicographic) order.

    mode "oriented" classifies up to orientation-preserving isometry,
    "unoriented" up to all isometries; spin structures are transported
    along the isometries either way, so exchanged even-q labels collapse
    to a single class exactly when a self-isometry of the right kind
    exchanges them.
    """
    if n < 3 or n % 2 == 0:
        raise ValueError(f"dimension must be odd and >= 3, got {n}")
    if mode not in ("oriented", "unoriented"):
        raise ValueError(f"unknown mode {mode!r}")
    if q < 1:
        raise ValueError(f"order must be positive, got {q}")
    m = (n + 1) // 2
    if q % 2 == 0 and m % 2 == 1:
        raise NoSpinStructure(f"no spin structure for q={q}, m={m}")

    out: list[SpinLensSpace] = []
    for tup in _canonical_tuples(q, m, mode):
        if q % 2 == 1:
            out.append(spin_space(q, tup))
            continue
        pairs = self_transport_pairs(tup, q)
        if mode == "oriented":
            merged = (0, 1) in pairs
        else:
            merged = (0, 1) in pairs or (1, 1) in pairs
        out.append(spin_space(q, tup, "h0"))
        if not merged:
            out.append(spin_space(q, tup, "h1"))
    return tuple(out)


def _swap_rows(rows: tuple[tuple[int, int], ...]) -> tuple[tuple[int, int], ...]:
    return tuple((odd, even) for even, odd in rows)


def _map_fingerprints(reps: Sequence[SpinLensSpace], backend: Backend,
                      threads: int) -> list[ReducedCountTable]:
    if threads > 1 and len(reps) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda x: fingerprint(x, backend), reps))
    return [fingerprint(x, backend) for x in reps]


def run_census(n: int, q_range: Iterable[int], mode: KeyMode = "unoriented",
               backend: Backend = "auto",
               threads: Optional[int] = None) -> tuple[CensusResult, ...]:
    """Fingerprint every class for each q and collect the groups of >= 2
    classes with matching spectra.

    Oriented mode groups by exact table equality; unoriented mode also
    merges groups whose tables match after the parity swap (reflecting a
    representative swaps its table columns, so equality-up-to-swap is
    the orientation-free comparison).  Same-key grouping compares full
    tables, never digests alone.
    """
    if threads is None:
        threads = int(os.environ.get("LENSDIRAC_THREADS", "1"))
    m = (n + 1) // 2
    results: list[CensusResult] = []
    for q in q_range:
        started = time.perf_counter()
        try:
            reps = enumerate_classes(n, q, mode)
        except NoSpinStructure:
            results.append(CensusResult(
                n=n, q=q, mode=mode, families=(), classes=0, fingerprints=0,
                seconds=0.0, note="no spin structure (q even, m odd)"))
            continue
        tables = _map_fingerprints(reps, backend, threads)
        groups: dict[tuple, list[int]] = {}
        for idx, table in enumerate(tables):
            rows = table.rows
            if mode == "unoriented":
                rows = min(rows, _swap_rows(rows))
            groups.setdefault(rows, []).append(idx)
        families = []
        for rows, idxs in groups.items():
            if len(idxs) < 2:
                continue
            members = tuple(reps[i] for i in idxs)
            flags = tuple(find_isometry(a, b, "any") is not None
                          for a, b in combinations(members, 2))
            digest = ReducedCountTable(q, m, rows).digest()
            families.append(IsospectralFamily(digest, members, flags))
        results.append(CensusResult(
            n=n, q=q, mode=mode, families=tuple(families), classes=len(reps),
            fingerprints=len(tables), seconds=time.perf_counter() - started))
    return tuple(results)


def tower_family(r: int) -> tuple[SpinLensSpace, ...]:
    """The q=40 tower: r+1 pairwise isospectral, pairwise non-isometric
    spaces of dimension 8r+3, all with spin label h0.  Member p swaps p
    copies of the parameter block (1,11) for (21,31)."""
    if r < 1:
        raise ValueError("r must be >= 1")
    members = []
    for p in range(r + 1):
        s = (1, 11) * (2 * r + 1 - p) + (21, 31) * p
        members.append(spin_space(40, s, "h0"))
    return tuple(members)


def spin_pair(t: int) -> tuple[SpinLensSpace, SpinLensSpace]:
    """L(32t; 1, 1+4t, 1+16t, 1+28t) with each of its two spin labels: a
    single space isospectral to itself across spin structures that no
    isometry exchanges."""
    if t < 1:
        raise ValueError("t must be >= 1")
    q = 32 * t
    s = (1, 1 + 4 * t, 1 + 16 * t, 1 + 28 * t)
    return spin_space(q, s, "h0"), spin_space(q, s, "h1")


def mirror_pair(r: int, t: int = 1) -> tuple[tuple[SpinLensSpace, SpinLensSpace], ...]:
    """L(r^2 t; 1, 1+rt, 1+2rt, 1+4rt) against the same formula with rt
    negated (parameters reduced mod q).  For odd r^2 t this is one pair;
    for even r^2 t there is a pair at each spin label.  Reducing the
    three negative minus-side parameters mod q flips that side's label
    (an odd number of entries cross a period boundary), so the pairs are
    (plus h0, minus h1) and (plus h1, minus h0).

    The t=1 members are proven isospectral for odd r >= 7; t >= 2 is
    supported but should be treated as experimental input, verified
    case by case.
    """
    if r < 7 or r % 2 == 0:
        raise ValueError("r must be odd and >= 7")
    if t < 1:
        raise ValueError("t must be >= 1")
    q = r * r * t
    plus = tuple(v % q for v in (1, 1 + r * t, 1 + 2 * r * t, 1 + 4 * r * t))
    minus = tuple(v % q for v in (1, 1 - r * t, 1 - 2 * r * t, 1 - 4 * r * t))
    if q % 2 == 1:
        return ((spin_space(q, plus), spin_space(q, minus)),)
    return ((spin_space(q, plus, "h0"), spin_space(q, minus, "h1")),
            (spin_space(q, plus, "h1"), spin_space(q, minus, "h0")))


def verify_family(members: Sequence[SpinLensSpace],
                  expect_nonisometric: bool = True,
                  backend: Backend = "auto",
                  up_to_reflection: bool = False) -> VerificationReport:
    """Recheck a claimed family from scratch: every pair must be strictly
    isospectral (tables equal entrywise), and with expect_nonisometric no
    pair may be related by any isometry (spin structures transported).

    up_to_reflection additionally accepts pairs whose tables agree after
    swapping the two parity columns of one side (the relation produced by
    reversing orientation), which is the grouping rule of an unoriented
    census."""
    members = tuple(members)
    if len(members) < 2:
        raise ValueError("a family needs at least two members")
    shape = {(x.q, x.m) for x in members}
    if len(shape) != 1:
        raise ValueError(f"members disagree on (q, m): {sorted(shape)}")
    if len(set(members)) != len(members):
        raise VerificationFailed("duplicate member")

    checks: list[str] = []
    for a, b in combinations(members, 2):
        if dirac_isospectral(a, b, backend):
            checks.append(
                f"isospectral  {format_spin_lens(a)} == {format_spin_lens(b)}")
        elif up_to_reflection and inverse_isospectral(a, b, backend):
            checks.append(
                f"isospectral after reflection  "
                f"{format_spin_lens(a)} ~ {format_spin_lens(b)}")
        else:
            raise VerificationFailed(
                f"not isospectral: {format_spin_lens(a)} vs {format_spin_lens(b)}")
    if expect_nonisometric:
        for a, b in combinations(members, 2):
            witness = find_isometry(a, b, "any")
            if witness is not None:
                raise VerificationFailed(
                    f"isometric: {format_spin_lens(a)} ~ {format_spin_lens(b)} "
                    f"via {witness}")
            checks.append(
                f"non-isometric  {format_spin_lens(a)} vs {format_spin_lens(b)}")
    return VerificationReport(tuple(checks))


def _member_dict(x: SpinLensSpace) -> dict:
    return {"q": x.q, "s": list(x.lens.s), "spin": x.spin.tag}


def _census_dict(res: CensusResult) -> dict:
    return {
        "dimension": res.n,
        "q": res.q,
        "mode": res.mode,
        "classes": res.classes,
        "fingerprints": res.fingerprints,
        "seconds": res.seconds,
        "note": res.note,
        "families": [
            {
                "digest": fam.digest,
                "trivial": any(fam.trivial_flags),
                "trivial_flags": list(fam.trivial_flags),
                "members": [_member_dict(x) for x in fam.members],
            }
            for fam in res.families
        ],
    }


def save_results(results: Sequence[CensusResult], path: str) -> None:
    """Write censuses as a versioned JSON document.  Keys are sorted and
    indentation fixed, so identical inputs produce identical bytes."""
    doc = {"format_version": FORMAT_VERSION,
           "censuses": [_census_dict(r) for r in results]}
    try:
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def _load_member(obj: dict, q: int, m: int, where: str) -> SpinLensSpace:
    try:
        mq, s, spin = obj["q"], obj["s"], obj["spin"]
    except (KeyError, TypeError) as exc:
        raise FormatError(f"{where}: member missing field {exc}") from exc
    if mq != q:
        raise FormatError(f"{where}: member q={mq} inside census q={q}")
    if not isinstance(s, list) or len(s) != m:
        raise FormatError(f"{where}: parameter list has length "
                          f"{len(s) if isinstance(s, list) else '?'}, want {m}")
    if q % 2 == 1 and spin != "unique":
        raise FormatError(f"{where}: spin {spin!r} invalid for odd q")
    if q % 2 == 0 and spin not in ("h0", "h1"):
        raise FormatError(f"{where}: spin {spin!r} invalid for even q")
    try:
        return spin_space(q, tuple(s), None if spin == "unique" else spin)
    except Exception as exc:
        raise FormatError(f"{where}: {exc}") from exc


def load_results(path: str) -> tuple[CensusResult, ...]:
    try:
        with open(path) as fh:
            raw = fh.read()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise FormatError(
            f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: "
            f"{exc.msg}") from exc
    if not isinstance(doc, dict) or doc.get("format_version") != FORMAT_VERSION:
        raise FormatError(f"{path}: missing or unsupported format_version")

    results = []
    for ci, cobj in enumerate(doc.get("censuses", ())):
        where = f"{path}: census[{ci}]"
        try:
            n, q, mode = cobj["dimension"], cobj["q"], cobj["mode"]
        except (KeyError, TypeError) as exc:
            raise FormatError(f"{where}: missing field {exc}") from exc
        if not (isinstance(n, int) and n >= 3 and n % 2 == 1):
            raise FormatError(f"{where}: bad dimension {n!r}")
        if mode not in ("oriented", "unoriented"):
            raise FormatError(f"{where}: bad mode {mode!r}")
        m = (n + 1) // 2
        families = []
        for fi, fobj in enumerate(cobj.get("families", ())):
            fwhere = f"{where}.families[{fi}]"
            members = tuple(_load_member(mo, q, m, fwhere)
                            for mo in fobj.get("members", ()))
            if len(members) < 2:
                raise FormatError(f"{fwhere}: fewer than two members")
            npairs = len(members) * (len(members) - 1) // 2
            if "trivial_flags" in fobj:
                flags = tuple(bool(v) for v in fobj["trivial_flags"])
            elif npairs == 1:
                flags = (bool(fobj.get("trivial", False)),)
            else:
                raise FormatError(f"{fwhere}: trivial_flags required for "
                                  f"{len(members)} members")
            if len(flags) != npairs:
                raise FormatError(f"{fwhere}: {len(flags)} flags for "
                                  f"{npairs} pairs")
            digest = fobj.get("digest")
            if not isinstance(digest, str):
                raise FormatError(f"{fwhere}: missing digest")
            families.append(IsospectralFamily(digest, members, flags))
        results.append(CensusResult(
            n=n, q=q, mode=mode, families=tuple(families),
            classes=int(cobj.get("classes", 0)),
            fingerprints=int(cobj.get("fingerprints", 0)),
            seconds=float(cobj.get("seconds", 0.0)),
            note=str(cobj.get("note", ""))))
    return tuple(results)


def export_csv(results: Sequence[CensusResult], path: str) -> None:
    """One row per family member."""
    import csv

    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["dimension", "q", "mode", "family", "digest",
                             "member", "s", "spin", "trivial"])
            for res in results:
                for fi, fam in enumerate(res.families):
                    trivial = any(fam.trivial_flags)
                    for mi, x in enumerate(fam.members):
                        writer.writerow([
                            res.n, res.q, res.mode, fi, fam.digest, mi,
                            " ".join(str(v) for v in x.lens.s),
                            x.spin.tag, int(trivial)])
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
