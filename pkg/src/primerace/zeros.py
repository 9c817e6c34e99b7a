"""Zeros of Dirichlet L-functions and the zero sums behind every race variance.

The built-in finder handles primitive real characters: their completed
L-function rotates to a real-valued Hardy-type Z whose sign changes locate
zeros on the critical line. L itself is evaluated through Euler-Maclaurin
Hurwitz zetas, vectorized over the scan grid.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import loggamma

from . import cache
from .fields import FieldModel, cyclotomic_subgroup
from .groups import CharacterIndex

# B_2, B_4, ..., B_36
_BERNOULLI = [
    1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6, -3617 / 510,
    43867 / 798, -174611 / 330, 854513 / 138, -236364091 / 2730, 8553103 / 6,
    -23749461029 / 870, 8615841276005 / 14322, -7709321041217 / 510,
    2577687858367 / 6, -26315271553053477373 / 1919190,
]


def hurwitz_zeta(s: np.ndarray, a: float, terms: int | None = None, order: int = 14) -> np.ndarray:
    """zeta(s, a) on an array of s values via Euler-Maclaurin summation.

    `terms` is the length N of the direct sum (defaults to a t-dependent choice
    that pushes the remainder below ~1e-13); `order` the number of Bernoulli
    corrections.
    """
    s = np.asarray(s, dtype=complex)
    tmax = float(np.max(np.abs(s.imag))) if s.size else 0.0
    if terms is None:
        terms = max(30, int(0.6 * tmax) + 25)
    n = np.arange(terms, dtype=float) + a
    # (n+a)^(-s) for every grid point at once
    direct = np.exp(np.multiply.outer(-s, np.log(n))).sum(axis=-1)
    u = terms + a
    lu = math.log(u)
    tail = np.exp((1 - s) * lu) / (s - 1) + 0.5 * np.exp(-s * lu)
    poch = s.copy()  # rising factorial s(s+1)...(s+2k-2)
    upow = np.exp(-(s + 1) * lu)
    fact = 2.0
    for k in range(1, order + 1):
        tail += _BERNOULLI[k - 1] / fact * poch * upow
        poch = poch * (s + 2 * k - 1) * (s + 2 * k)
        upow = upow / (u * u)
        fact *= (2 * k + 1) * (2 * k + 2)
    return direct + tail


@dataclass(frozen=True)
class RealCharacter:
    """A primitive real Dirichlet character given by its value table."""

    modulus: int
    values: tuple[int, ...]  # chi(n) for n = 0..modulus-1, in {-1, 0, 1}

    @property
    def parity(self) -> int:
        """0 for even characters, 1 for odd."""
        return 0 if self.values[self.modulus - 1] == 1 else 1


def real_primitive_characters(q: int) -> list[RealCharacter]:
    """All primitive real characters mod q, even ones first."""
    field_q = cyclotomic_subgroup(q, [1])
    out = []
    for chi in field_q.group.nontrivial_characters():
        if field_q.conductor(chi) != q:
            continue
        quotient = field_q._quotient
        values = [0] * q
        real = True
        for u in quotient.dlog:
            num, den = quotient.dirichlet_value_exact(chi, u)
            if num == 0:
                values[u] = 1
            elif 2 * num == den:
                values[u] = -1
            else:
                real = False
                break
        if real:
            out.append(RealCharacter(q, tuple(values)))
    out.sort(key=lambda c: c.parity)
    return out


def _l_on_grid(char: RealCharacter, ts: np.ndarray, terms: int | None = None, order: int = 14):
    """L(1/2 + i t, chi) for an array of ordinates t."""
    q = char.modulus
    s = 0.5 + 1j * np.asarray(ts, dtype=float)
    total = np.zeros_like(s)
    for a in range(1, q):
        if char.values[a] == 0:
            continue
        total += char.values[a] * hurwitz_zeta(s, a / q, terms=terms, order=order)
    return np.exp(-s * math.log(q)) * total


def _hardy_z(char: RealCharacter, ts: np.ndarray, terms: int | None = None, order: int = 14):
    """The rotated, real-valued completed L along the critical line."""
    ts = np.asarray(ts, dtype=float)
    lvals = _l_on_grid(char, ts, terms=terms, order=order)
    half = (0.5 + char.parity) / 2
    theta = np.imag(loggamma(half + 0.5j * ts)) + 0.5 * ts * math.log(char.modulus / math.pi)
    z = np.exp(1j * theta) * lvals
    return z.real


def counting_estimate(q: int, T: float) -> float:
    """Expected number of zeros with |gamma| <= T (both signs)."""
    if T <= 0:
        return 0.0
    return (T / math.pi) * math.log(q * T / (2 * math.pi * math.e))


def zero_density_tail(q: int, T: float) -> float:
    """Heuristic mass of sum 1/(1/4+gamma^2) above height T, both signs."""
    return (1 / (math.pi * T)) * (math.log(q * T / (2 * math.pi)) + 1)


class ZeroSearchError(RuntimeError):
    pass


def _abs_l_at(char: RealCharacter, t: float) -> float:
    """|L(1/2+it)| recomputed with doubled summation length and order, for audits."""
    base_terms = max(30, int(0.6 * abs(t)) + 25)
    return float(abs(_l_on_grid(char, np.array([t]), terms=2 * base_terms, order=18)[0]))


def find_zeros_of_character(
    char: RealCharacter, T: float, tol: float = 1e-9, grid: float = 0.05
) -> np.ndarray:
    """Ordinates of zeros in (0, T], audited against the counting estimate."""
    if T > 200:
        raise ValueError("height capped at 200")
    if tol < 1e-10:
        raise ValueError("bisection tolerance below 1e-10 is not supported")
    if T <= 0:
        return np.array([])
    step = grid
    for _ in range(5):
        ts = np.arange(0.0, T + step, step)
        ts = ts[ts <= T + 1e-12]
        z = _hardy_z(char, ts)
        idx = np.nonzero(np.sign(z[:-1]) * np.sign(z[1:]) < 0)[0]
        zeros = [_bisect(char, ts[i], ts[i + 1], z[i], tol) for i in idx]
        estimate = counting_estimate(char.modulus, T)
        if abs(2 * len(zeros) - estimate) <= 2:
            bad = [g for g in zeros if _abs_l_at(char, g) > 1e-6]
            if bad:
                raise ZeroSearchError(f"ordinates fail re-evaluation audit: {bad}")
            return np.array(zeros)
        step /= 2
    raise ZeroSearchError(
        f"zero count {len(zeros)} vs estimate {estimate:.2f} for q={char.modulus}, "
        f"T={T}: suspected missed zero even at grid {step * 2}"
    )


def _bisect(char: RealCharacter, lo: float, hi: float, z_lo: float, tol: float) -> float:
    sign_lo = math.copysign(1.0, z_lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        zm = float(_hardy_z(char, np.array([mid]))[0])
        if math.copysign(1.0, zm) == sign_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def find_zeros_real_character(
    q: int, T: float, tol: float = 1e-9, parity: str = "auto"
) -> np.ndarray:
    """Zeros in (0, T] of the primitive real character mod q (even one preferred)."""
    chars = real_primitive_characters(q)
    if not chars:
        raise ValueError(f"no primitive real character mod {q}")
    if parity == "even":
        chars = [c for c in chars if c.parity == 0]
    elif parity == "odd":
        chars = [c for c in chars if c.parity == 1]
    elif parity != "auto":
        raise ValueError("parity must be even, odd, or auto")
    if not chars:
        raise ValueError(f"no primitive real character mod {q} with parity {parity}")
    return _find_zeros_cached(chars[0], T, tol)


def _find_zeros_cached(char: RealCharacter, T: float, tol: float) -> np.ndarray:
    key_src = f"zeros|{char.modulus}|{char.parity}|{T!r}|{tol!r}|" + ",".join(
        map(str, char.values)
    )
    key = "zeros-" + hashlib.sha256(key_src.encode()).hexdigest()[:20]
    hit = cache.get_text(key)
    if hit is not None:
        return np.array([float(line) for line in hit.split() if line])
    zeros = find_zeros_of_character(char, T, tol)
    cache.put_text(key, "\n".join(f"{g:.12f}" for g in zeros))
    return zeros


# ---------------------------------------------------------------------------
# archives


@dataclass(frozen=True)
class ZeroArchive:
    """Positive ordinates per nontrivial character label, complete below `height`."""

    entries: dict
    height: float
    provenance: str  # 'computed' | 'ingested'
    fingerprint: str

    def for_character(self, label: str) -> np.ndarray:
        if label not in self.entries:
            raise KeyError(f"character {label!r} has no archive entry")
        return self.entries[label]


@dataclass(frozen=True)
class ZeroSumMode:
    """Asymptotic mode replaces zero sums by log A(chi); ZeroData sums an archive."""

    kind: str  # 'asymptotic' | 'zeros'
    tail: str = "none"  # 'none' | 'density'

    def __post_init__(self):
        if self.kind not in ("asymptotic", "zeros"):
            raise ValueError(f"unknown mode kind {self.kind!r}")
        if self.tail not in ("none", "density"):
            raise ValueError(f"unknown tail {self.tail!r}")


ASYMPTOTIC = ZeroSumMode("asymptotic")
ZERO_DATA = ZeroSumMode("zeros")


def build_field_archive(field: FieldModel, T: float, tol: float = 1e-9) -> ZeroArchive:
    """Compute zeros for every nontrivial character (real characters only)."""
    entries = {}
    for chi in field.group.nontrivial_characters():
        label = field.char_labels[chi]
        entries[label] = _find_zeros_cached(_primitive_real_character(field, chi), T, tol)
    return ZeroArchive(entries, float(T), "computed", field.fingerprint())


def _primitive_real_character(field: FieldModel, chi: CharacterIndex) -> RealCharacter:
    f = field.conductor(chi)
    if field.kind == "multiquadratic":
        values = tuple(_jacobi(n, f) for n in range(f))
        return RealCharacter(f, values)
    quotient = field._quotient
    values = [0] * f
    seen = [False] * f
    for u in quotient.dlog:
        r = u % f
        if seen[r]:
            continue
        num, den = quotient.dirichlet_value_exact(chi, u)
        if num == 0:
            values[r] = 1
        elif 2 * num == den:
            values[r] = -1
        else:
            raise ValueError(
                f"character {field.char_labels[chi]} is not real; ingest its zeros instead"
            )
        seen[r] = True
    return RealCharacter(f, tuple(values))


def _jacobi(n: int, d: int) -> int:
    """Jacobi symbol (n/d) for odd positive d."""
    n %= d
    result = 1
    while n:
        while n % 2 == 0:
            n //= 2
            if d % 8 in (3, 5):
                result = -result
        n, d = d, n
        if n % 4 == 3 and d % 4 == 3:
            result = -result
        n %= d
    return result if d == 1 else 0


def write_archive(archive: ZeroArchive, path) -> None:
    lines = [f"height={archive.height:.12g}"]
    for label in sorted(archive.entries):
        for gamma in archive.entries[label]:
            lines.append(f"{label},{gamma:.12f}")
    with open(path, "w") as handle:
        handle.write("\n".join(lines) + "\n")


class ArchiveFormatError(ValueError):
    pass


def ingest_zeros(path, field: FieldModel) -> ZeroArchive:
    """Read and validate an archive file against a field's character labels."""
    with open(path) as handle:
        lines = handle.read().splitlines()
    if not lines or not lines[0].startswith("height="):
        raise ArchiveFormatError("first line must be 'height=<T>'")
    try:
        height = float(lines[0].split("=", 1)[1])
    except ValueError as exc:
        raise ArchiveFormatError(f"bad height in header: {lines[0]!r}") from exc
    known = set(field.nontrivial_labels())
    entries: dict[str, list[float]] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        label, _, rest = line.partition(",")
        if label not in known:
            raise ArchiveFormatError(f"line {lineno}: unknown character label {label!r}")
        try:
            gamma = float(rest)
        except ValueError as exc:
            raise ArchiveFormatError(f"line {lineno}: bad ordinate {rest!r}") from exc
        if gamma <= 0:
            raise ArchiveFormatError(f"line {lineno}: ordinate {gamma} is not positive")
        if gamma > height + 1e-9:
            raise ArchiveFormatError(f"line {lineno}: ordinate {gamma} exceeds height {height}")
        bucket = entries.setdefault(label, [])
        if bucket and gamma <= bucket[-1]:
            raise ArchiveFormatError(
                f"line {lineno}: ordinate {gamma} out of order for label {label!r}"
            )
        bucket.append(gamma)
    missing = sorted(known - set(entries))
    if missing:
        raise ArchiveFormatError(f"archive is missing characters: {', '.join(missing)}")
    arrays = {label: np.array(gs) for label, gs in entries.items()}
    return ZeroArchive(arrays, height, "ingested", field.fingerprint())


# ---------------------------------------------------------------------------
# zero sums


def zero_sum(
    archive: ZeroArchive | None,
    chi_label: str,
    mode: ZeroSumMode,
    field: FieldModel,
) -> float:
    """One-sided sum over gamma > 0 of 1/(1/4+gamma^2), or its log A(chi) stand-in."""
    chi = field.label_to_char[chi_label]
    if not any(chi):
        raise ValueError("the trivial character has no zero sum")
    if mode.kind == "asymptotic":
        return field.log_conductor(chi)
    if archive is None:
        raise ValueError("ZeroData mode requires an archive")
    gammas = archive.for_character(chi_label)
    total = float(np.sum(1.0 / (0.25 + gammas**2))) if gammas.size else 0.0
    if mode.tail == "density":
        total += zero_density_tail(field.conductor(chi), archive.height)
    return total


def character_weight(
    chi: CharacterIndex,
    field: FieldModel,
    mode: ZeroSumMode,
    archive: ZeroArchive | None = None,
) -> float:
    """Two-sided zero-sum weight used by every race statistic.

    Asymptotic mode: log A(chi), the full-sum stand-in. ZeroData mode: twice the
    one-sided truncated sum (zeros come in +/- pairs), plus the density tail once
    when requested.
    """
    chi = field.group.reduce(chi)
    if not any(chi):
        raise ValueError("the trivial character carries no weight")
    if mode.kind == "asymptotic":
        return field.log_conductor(chi)
    if archive is None:
        raise ValueError("ZeroData mode requires an archive")
    label = field.char_labels[chi]
    gammas = archive.for_character(label)
    total = 2.0 * float(np.sum(1.0 / (0.25 + gammas**2))) if gammas.size else 0.0
    if mode.tail == "density":
        total += zero_density_tail(field.conductor(chi), archive.height)
    return total


def n_l(
    field: FieldModel,
    archive: ZeroArchive | None = None,
    mode: ZeroSumMode = ASYMPTOTIC,
) -> float:
    """N_L = total two-sided zero-sum mass over nontrivial characters.

    Equals log d_L exactly in Asymptotic mode.
    """
    return sum(
        character_weight(chi, field, mode, archive)
        for chi in field.group.nontrivial_characters()
    )
