"""Prime-selection constructions with machine-checkable certificates.

Each builder returns the primes it selected together with a certificate that
restates the inequality it promised, recomputed from the returned integers.
A builder never reports success with a failed certificate; it raises instead.
Searches scan candidates in ascending order, so fixed caps and targets always
reproduce the same output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .fields import FieldModel, log_discriminant, signed_conductor_sum
from .groups import square_root_counts
from .primes import int_above_exp, is_prime, log_int, next_prime_1mod4

LOG2 = math.log(2)


@dataclass(frozen=True)
class Caps:
    """Desk-scale search bounds."""

    max_bits: int = 256  # candidate primes stay below 2^max_bits
    max_block: int = 8  # primes selected per block
    max_doublings: int = 8  # Bertrand window growth


class ConstructionError(ArithmeticError):
    """A prime search ran out of room under the caps."""


@dataclass(frozen=True)
class StepCertificate:
    """One ratio block: |log p_m / log(ell p_1..p_m) - alpha| <= bound."""

    ell: int
    alpha: float
    theta: float
    primes: tuple[int, ...]
    ratio: float
    bound: float
    doublings: int

    @property
    def holds(self) -> bool:
        return abs(self.ratio - self.alpha) <= self.bound


@dataclass(frozen=True)
class WindowCertificate:
    """One index block: lower < log p_n < upper, both strict."""

    existing: tuple[int, ...]
    primes: tuple[int, ...]
    target: float
    epsilon: float
    lower: float
    upper: float
    log_last: float
    value: float  # 2^(n+m) / log(product of all primes)
    doublings: int

    @property
    def holds(self) -> bool:
        return self.lower < self.log_last < self.upper and abs(self.value - self.target) < self.epsilon


@dataclass(frozen=True)
class GrowthCertificate:
    """Doubly exponential prefix: log(p_1..p_k) / 2^(k+1) > 2^(2k) for k <= n."""

    primes: tuple[int, ...]
    rows: tuple[tuple[int, float, float], ...]  # (k, lhs, rhs)

    @property
    def holds(self) -> bool:
        return all(lhs > rhs for _, lhs, rhs in self.rows)


@dataclass(frozen=True)
class FamilyConstruction:
    primes: tuple[int, ...]
    certificates: tuple


@dataclass(frozen=True)
class FamilyReport:
    """Per-depth moderacy diagnostics of a field tower."""

    depth: int
    log_disc: float
    r_g: int
    two_moderacy_index: float
    uniform_criterion: float
    u_range: tuple[float, ...]

    def __post_init__(self):
        if self.two_moderacy_index < 0 or self.uniform_criterion < 0:
            raise ValueError("moderacy indices must be nonnegative")
        if any(u < 0 or u > 1 + 1e-12 for u in self.u_range):
            raise ValueError("|U| values must lie in [0, 1]")


def _certified(cert):
    if not cert.holds:
        raise ArithmeticError(f"construction produced an invalid certificate: {cert}")
    for p in cert.primes:
        if p % 4 != 1 or not is_prime(p):
            raise ArithmeticError(f"candidate {p} failed prime certification")
    return cert


def _window_prime(lo: int, above: int, caps: Caps) -> tuple[int, int]:
    """Smallest prime = 1 mod 4 in (lo, 2^(d+1) lo) exceeding `above`, with the
    doubling count d actually needed."""
    if lo.bit_length() > caps.max_bits:
        raise ConstructionError(f"window start needs {lo.bit_length()} bits, cap is {caps.max_bits}")
    hi = lo << (caps.max_doublings + 1)
    if hi.bit_length() > caps.max_bits:
        hi = 1 << caps.max_bits
    p = next_prime_1mod4(max(lo, above), hi - 1)
    if p is None:
        raise ConstructionError("no prime found below the size cap")
    doublings = 0
    while p >= (lo << (doublings + 1)):
        doublings += 1
    if doublings > caps.max_doublings:
        raise ConstructionError(f"window required {doublings} doublings, cap is {caps.max_doublings}")
    return p, doublings


def prime_density_step(ell: int, alpha: float, caps: Caps = Caps()) -> StepCertificate:
    """Primes p_1 < .. < p_m (all 1 mod 4, above ell) whose final log-ratio
    log p_m / log(ell p_1..p_m) approximates alpha within the certified gap."""
    if ell < 5:
        raise ValueError("ell must be at least 5")
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie strictly between 0 and 1")
    theta = alpha / (1 - alpha)
    prefix: list[int] = []
    base = ell
    while True:
        last = prefix[-1] if prefix else ell
        if theta * log_int(base) > log_int(last):
            break
        if len(prefix) + 1 >= caps.max_block:
            raise ConstructionError(
                f"block cap {caps.max_block} exhausted before theta * log(ell p_1..p_k) "
                f"exceeded log p_k"
            )
        nxt = next_prime_1mod4(last)
        if nxt.bit_length() > caps.max_bits:
            raise ConstructionError("prefix prime exceeds the size cap")
        prefix.append(nxt)
        base *= nxt
    log_base = log_int(base)
    lo = int_above_exp(theta * log_base)
    p, doublings = _window_prime(lo, prefix[-1] if prefix else ell, caps)
    primes = tuple(prefix) + (p,)
    ratio = log_int(p) / (log_base + log_int(p))
    bound = (doublings + 1) * LOG2 / log_base
    return _certified(
        StepCertificate(ell, alpha, theta, primes, ratio, bound, doublings)
    )


def build_u_dense_family(targets: Sequence[float], caps: Caps = Caps()) -> FamilyConstruction:
    """Starting from 5, append one ratio block per target; the certified ratio
    of block k equals |U| at the block's last prime in the cumulative field."""
    primes = [5]
    certs = []
    for k, target in enumerate(targets):
        ell = math.prod(primes)
        try:
            cert = prime_density_step(ell, float(target), caps)
        except (ValueError, ConstructionError) as exc:
            raise type(exc)(f"block {k} (target {target}): {exc}") from exc
        primes.extend(cert.primes)
        certs.append(cert)
    return FamilyConstruction(tuple(primes), tuple(certs))


def build_b_dense_family(
    targets: Sequence[float],
    epsilons: Sequence[float] | None = None,
    caps: Caps = Caps(),
) -> FamilyConstruction:
    """Append blocks of primes = 1 mod 4 steering 2^n / log(p_1..p_n) to each
    target within its epsilon (default one tenth of the target)."""
    targets = [float(x) for x in targets]
    if any(x <= 0 for x in targets):
        raise ValueError("targets must be positive")
    if epsilons is None:
        epsilons = [x / 10 for x in targets]
    if len(epsilons) != len(targets):
        raise ValueError("one epsilon per target")
    if any(e <= 0 or e >= x for e, x in zip(epsilons, targets)):
        raise ValueError("need 0 < epsilon < target")
    primes: list[int] = []
    certs = []
    for k, (x, eps0) in enumerate(zip(targets, epsilons)):
        existing = tuple(primes)
        m = len(existing)
        eps = eps0
        for attempt in range(caps.max_doublings + 1):
            try:
                cert = _b_dense_block(existing, m, x, eps, attempt, caps)
                break
            except ConstructionError as exc:
                last_error = exc
                eps *= 2
                if eps >= x:
                    raise ConstructionError(f"block {k} (target {x}): {exc}") from exc
        else:
            raise ConstructionError(f"block {k} (target {x}): {last_error}")
        primes.extend(cert.primes)
        certs.append(cert)
    return FamilyConstruction(tuple(primes), tuple(certs))


def _b_dense_block(
    existing: tuple[int, ...], m: int, x: float, eps: float, doublings: int, caps: Caps
) -> WindowCertificate:
    prefix: list[int] = []
    log_all = log_int(math.prod(existing)) if existing else 0.0
    while True:
        n = len(prefix) + 1
        power = float(2 ** (n + m))
        lower = power / (x + eps) - log_all
        last = prefix[-1] if prefix else (existing[-1] if existing else 4)
        window_long_enough = power * (1 / (x - eps) - 1 / (x + eps)) > LOG2
        if lower > max(log_int(last) if last > 1 else 0.0, math.log(5)) and window_long_enough:
            break
        if len(prefix) + 1 >= caps.max_block:
            raise ConstructionError(f"block cap {caps.max_block} exhausted before the window opened")
        nxt = next_prime_1mod4(last)
        if nxt.bit_length() > caps.max_bits:
            raise ConstructionError("prefix prime exceeds the size cap")
        prefix.append(nxt)
        log_all += log_int(nxt)
    upper = power / (x - eps) - log_all
    lo_int = int_above_exp(lower)
    hi_int = int_above_exp(upper, margin=-1e-9) - 1
    if lo_int.bit_length() > caps.max_bits:
        raise ConstructionError(f"window start needs {lo_int.bit_length()} bits, cap is {caps.max_bits}")
    p = next_prime_1mod4(lo_int, hi_int)
    if p is None:
        raise ConstructionError("no prime inside the index window")
    block = tuple(prefix) + (p,)
    log_last = log_int(p)
    value = power / (log_all + log_last)
    return _certified(
        WindowCertificate(existing, block, x, eps, lower, upper, log_last, value, doublings)
    )


def build_theorem_c_prefix(n: int, caps: Caps = Caps()) -> GrowthCertificate:
    """Primes = 1 mod 4 with log(p_1..p_k) > 2^(3k+1) at every depth k <= n,
    so the two-moderacy index of the multiquadratic tower stays below 2^-k."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n > caps.max_block:
        raise ValueError(f"depth {n} exceeds the block cap {caps.max_block}")
    primes: list[int] = []
    rows = []
    log_prod = 0.0
    for k in range(1, n + 1):
        need = 2.0 ** (3 * k + 1) - log_prod
        lo = int_above_exp(max(need, log_int(primes[-1]) if primes else math.log(4)))
        if lo.bit_length() > caps.max_bits:
            raise ConstructionError(
                f"depth {k} needs a prime of {lo.bit_length()} bits, cap is {caps.max_bits}"
            )
        p = next_prime_1mod4(lo - 1)
        primes.append(p)
        log_prod += log_int(p)
        rows.append((k, log_prod / 2.0 ** (k + 1), 2.0 ** (2 * k)))
    return _certified(GrowthCertificate(tuple(primes), tuple(rows)))


def moderacy_report(family: Sequence[FieldModel]) -> list[FamilyReport]:
    """Per-depth diagnostics: discriminant size, square-root count, the
    two-moderacy index r(G)/sqrt(log d), the uniform-moderacy criterion
    max_{a,b != 1} |sum_chi (chi(a) - chi(b)) log A(chi)| / log d, and the
    sorted values of |U| away from the identity."""
    reports = []
    for depth, field in enumerate(family, start=1):
        G = field.group
        log_d = log_discriminant(field)
        r_g = square_root_counts(G)[G.identity]
        sums = [
            signed_conductor_sum(field, a) for a in G.elements() if a != G.identity
        ]
        distinct_conductors = {
            field.conductor(chi) for chi in G.nontrivial_characters()
        }
        if len(distinct_conductors) == 1:
            criterion = 0.0
        else:
            criterion = (max(sums) - min(sums)) / log_d
        u_range = tuple(sorted(min(abs(s) / log_d, 1.0) for s in sums))
        reports.append(
            FamilyReport(depth, log_d, r_g, r_g / math.sqrt(log_d), criterion, u_range)
        )
    return reports
