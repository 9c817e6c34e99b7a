"""Abelian extensions of Q with computable conductor and ramification data.

Two concrete models: multiquadratic fields Q(sqrt(p1),...,sqrt(pn)) with all
p_i = 1 mod 4, and subfields of cyclotomic fields cut out by a unit subgroup
H <= (Z/qZ)^*. Conductor exponents come from the tame inertia filtration in the
multiquadratic case and from primitive Dirichlet character conductors in the
cyclotomic case; a cross-model test pins the two against each other.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

from .groups import (
    AbelianGroup,
    CharacterIndex,
    GroupElement,
    character_value,
    make_group,
)
from .primes import is_prime, log_int


@dataclass(frozen=True)
class RamificationData:
    """Inertia data at one ramified prime.

    `filtration` lists the lower-numbered ramification subgroups G_0 >= G_1 >= ...
    as element sets in quotient coordinates, trailing trivial groups omitted.
    `exponents_source` records whether conductor exponents are derived from this
    filtration or from primitive Dirichlet conductors.
    """

    prime: int
    filtration: tuple[frozenset, ...]
    exponents_source: str

    @property
    def inertia_order(self) -> int:
        return len(self.filtration[0]) if self.filtration else 1


def _conductor_exponent_from_filtration(
    G: AbelianGroup, chi: CharacterIndex, filtration: tuple[frozenset, ...]
) -> int:
    """n(chi, p) = sum_i |G_i|/|G_0| over the G_i on which chi is nontrivial."""
    if not filtration or not any(chi):
        return 0
    g0 = len(filtration[0])
    total = Fraction(0)
    for subgroup in filtration:
        trivial_on = all(abs(character_value(G, chi, b) - 1) <= 1e-12 for b in subgroup)
        if not trivial_on:
            total += Fraction(len(subgroup), g0)
    if total.denominator != 1:
        raise ArithmeticError(f"conductor exponent {total} is not an integer")
    return int(total)


class FieldModel:
    """An abelian extension of Q with its character/conductor tables."""

    def __init__(self, kind, group, spec, conductors, char_labels, ramification):
        self.kind: str = kind
        self.group: AbelianGroup = group
        self._spec: dict = spec
        self._conductors: dict[CharacterIndex, int] = conductors
        self.char_labels: dict[CharacterIndex, str] = char_labels
        self.label_to_char: dict[str, CharacterIndex] = {v: k for k, v in char_labels.items()}
        self.ramification: dict[int, RamificationData] = ramification
        self._log_conductors = {chi: log_int(f) for chi, f in conductors.items()}
        self._log_disc = sum(self._log_conductors.values())

    @property
    def ramified_primes(self) -> tuple[int, ...]:
        return tuple(sorted(self.ramification))

    def conductor(self, chi: CharacterIndex) -> int:
        return self._conductors[self.group.reduce(chi)]

    def log_conductor(self, chi: CharacterIndex) -> float:
        return self._log_conductors[self.group.reduce(chi)]

    def nontrivial_labels(self) -> list[str]:
        return [self.char_labels[chi] for chi in self.group.nontrivial_characters()]

    def spec_dict(self) -> dict:
        return dict(self._spec)

    def fingerprint(self) -> str:
        canonical = json.dumps(self._spec, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()[:16]

    def __repr__(self) -> str:
        return f"FieldModel({self._spec})"


def log_artin_conductor(field: FieldModel, chi: CharacterIndex) -> float:
    """log A(chi) = sum_p n(chi,p) log p; zero on the trivial character."""
    return field.log_conductor(chi)


def conductor_exponent(field: FieldModel, chi: CharacterIndex, p: int) -> int:
    """Exponent of p in the conductor of chi; 0 when p is unramified."""
    chi = field.group.reduce(chi)
    f = field.conductor(chi)
    e = 0
    while f % p == 0:
        f //= p
        e += 1
    return e


def log_discriminant(field: FieldModel) -> float:
    """Conductor-discriminant formula: sum over all characters of log A(chi)."""
    return field._log_disc


def signed_conductor_sum(field: FieldModel, a: GroupElement) -> float:
    """sum over all chi of chi(a) * log A(chi); real and <= 0 for a != 1."""
    G = field.group
    a = G.reduce(a)
    if a == G.identity:
        raise ValueError("signed conductor sum is defined away from the identity")
    total = 0j
    for chi in G.characters():
        total += character_value(G, chi, a) * field.log_conductor(chi)
    scale = max(1.0, field._log_disc)
    if abs(total.imag) > 1e-9 * scale:
        raise ArithmeticError(f"character sum has imaginary part {total.imag}")
    return total.real


# ---------------------------------------------------------------------------
# multiquadratic model


def multiquadratic(primes) -> FieldModel:
    """Q(sqrt(p1),...,sqrt(pn)) for strictly increasing primes p_i = 1 mod 4."""
    primes = tuple(int(p) for p in primes)
    if not primes:
        raise ValueError("need at least one prime")
    if any(p2 <= p1 for p1, p2 in zip(primes, primes[1:])):
        raise ValueError("primes must be strictly increasing")
    for p in primes:
        if p % 4 != 1:
            raise ValueError(f"{p} is not 1 mod 4")
        if not is_prime(p):
            raise ValueError(f"{p} fails primality certification")
    n = len(primes)
    group = make_group([2] * n)

    ramification = {}
    for i, p in enumerate(primes):
        sigma = tuple(int(j == i) for j in range(n))
        ramification[p] = RamificationData(
            prime=p,
            filtration=(frozenset({group.identity, sigma}),),
            exponents_source="inertia-filtration",
        )

    conductors = {}
    labels = {}
    for chi in group.characters():
        f = 1
        for i, p in enumerate(primes):
            e = _conductor_exponent_from_filtration(group, chi, ramification[p].filtration)
            f *= p**e
        conductors[chi] = f
        labels[chi] = "".join(str(c) for c in chi)

    spec = {"type": "multiquadratic", "primes": list(primes)}
    return FieldModel("multiquadratic", group, spec, conductors, labels, ramification)


# ---------------------------------------------------------------------------
# cyclotomic model: unit group machinery


def _factorize(q: int) -> list[tuple[int, int]]:
    factors = []
    n = q
    for p in range(2, int(n**0.5) + 1):
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            factors.append((p, e))
    if n > 1:
        factors.append((n, 1))
    return factors


def _primitive_root(p: int, e: int) -> int:
    """Smallest primitive root mod p that stays primitive mod p^e."""
    phi = p - 1
    prime_factors = {f for f, _ in _factorize(phi)}
    g = 2
    while True:
        if all(pow(g, phi // f, p) != 1 for f in prime_factors):
            break
        g += 1
    if e > 1 and pow(g, p - 1, p * p) == 1:
        g += p  # g + p is a primitive root mod every power of p
    return g


def _crt_lift(residue: int, modulus: int, q: int) -> int:
    """x = residue mod modulus, x = 1 mod q/modulus."""
    other = q // modulus
    inv = pow(other, -1, modulus)
    return (1 + other * inv * (residue - 1)) % q


def _unit_group(q: int) -> tuple[list[int], list[int]]:
    """Generators (mod q) and their orders for (Z/qZ)^*."""
    gens, orders = [], []
    for p, e in _factorize(q):
        pe = p**e
        if p == 2:
            if e == 1:
                continue
            gens.append(_crt_lift(pe - 1, pe, q))  # -1
            orders.append(2)
            if e >= 3:
                gens.append(_crt_lift(5, pe, q))
                orders.append(2 ** (e - 2))
        else:
            g = _primitive_root(p, e)
            gens.append(_crt_lift(g % pe, pe, q))
            orders.append(pe - pe // p)
    return gens, orders


def _discrete_logs(q: int, gens: list[int], orders: list[int]) -> dict[int, tuple[int, ...]]:
    """dlog table for all units mod q w.r.t. the generator list."""
    table = {1 % q: (0,) * len(gens)}
    # breadth-first closure over generator multiplications
    frontier = [1 % q]
    while frontier:
        new_frontier = []
        for u in frontier:
            x = table[u]
            for j, g in enumerate(gens):
                v = u * g % q
                if v not in table:
                    y = list(x)
                    y[j] = (y[j] + 1) % orders[j]
                    table[v] = tuple(y)
                    new_frontier.append(v)
        frontier = new_frontier
    return table


def _smith_left_transform(relations: list[list[int]], k: int):
    """Diagonalize the k x m relation matrix; returns (diagonal, U) with UAV = D."""
    m = len(relations[0]) if relations else 0
    A = [row[:] for row in relations]
    U = [[int(i == j) for j in range(k)] for i in range(k)]

    def row_op(i, j, c):  # row_i -= c * row_j
        A[i] = [a - c * b for a, b in zip(A[i], A[j])]
        U[i] = [a - c * b for a, b in zip(U[i], U[j])]

    def row_swap(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def col_op(i, j, c):  # col_i -= c * col_j
        for row in A:
            row[i] -= c * row[j]

    def col_swap(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]

    def reduce_from(t0: int) -> None:
        t = t0
        while t < k and t < m:
            pivot = next(((i, j) for i in range(t, k) for j in range(t, m) if A[i][j]), None)
            if pivot is None:
                return
            row_swap(t, pivot[0])
            col_swap(t, pivot[1])
            while True:
                for i in range(t + 1, k):
                    while A[i][t]:
                        row_op(i, t, A[i][t] // A[t][t])
                        if A[i][t]:
                            row_swap(i, t)
                for j in range(t + 1, m):
                    while A[t][j]:
                        col_op(j, t, A[t][j] // A[t][t])
                        if A[t][j]:
                            col_swap(j, t)
                col_clear = all(A[i][t] == 0 for i in range(t + 1, k))
                row_clear = all(A[t][j] == 0 for j in range(t + 1, m))
                if col_clear and row_clear:
                    break
            if A[t][t] < 0:
                A[t] = [-a for a in A[t]]
                U[t] = [-u for u in U[t]]
            t += 1

    reduce_from(0)
    # enforce the divisibility chain d_1 | d_2 | ...
    changed = True
    while changed:
        changed = False
        for i in range(min(k, m) - 1):
            a, b = A[i][i], A[i + 1][i + 1]
            if a and b and b % a:
                for row in A:
                    row[i] += row[i + 1]
                reduce_from(i)
                changed = True
                break
    return [A[i][i] for i in range(min(k, m))], U


class _UnitQuotient:
    """(Z/qZ)^* / H with explicit coordinates and Dirichlet character attachments."""

    def __init__(self, q: int, H: frozenset[int]):
        self.q = q
        self.gens, self.orders = _unit_group(q)
        self.dlog = _discrete_logs(q, self.gens, self.orders)
        if len(self.dlog) != _euler_phi(q):
            raise ArithmeticError("unit group enumeration is incomplete")
        k = len(self.gens)
        relations = [[0] * (k + len(H)) for _ in range(k)]
        for j, n in enumerate(self.orders):
            relations[j][j] = n
        for c, h in enumerate(sorted(H)):
            for j, x in enumerate(self.dlog[h]):
                relations[j][k + c] = x
        diag, left = _smith_left_transform(relations, k)
        self.diag = diag
        self.left = left
        self.kept = [i for i, d in enumerate(diag) if d >= 2]
        order = 1
        for d in diag:
            order *= d
        if order != len(self.dlog) // len(H):
            raise ArithmeticError("quotient order mismatch after normal form")
        if not self.kept:
            raise ValueError("subgroup equals the full unit group; the extension is trivial")
        self.factor_orders = [diag[i] for i in self.kept]

    def project(self, u: int) -> tuple[int, ...]:
        """Quotient coordinates of a unit u."""
        x = self.dlog[u % self.q]
        return tuple(
            sum(self.left[i][j] * x[j] for j in range(len(x))) % self.diag[i] for i in self.kept
        )

    def character_exponents_mod_q(self, chi: CharacterIndex) -> tuple[int, ...]:
        """Exponents of the pulled-back Dirichlet character w.r.t. the unit generators."""
        alphas = []
        for j, m in enumerate(self.orders):
            alpha = 0
            for pos, i in enumerate(self.kept):
                d = self.diag[i]
                num = m * self.left[i][j]
                if num % d:
                    raise ArithmeticError("character pullback exponent is fractional")
                alpha += chi[pos] * (num // d)
            alphas.append(alpha % m)
        return tuple(alphas)

    def dirichlet_value_exact(self, chi: CharacterIndex, u: int) -> tuple[int, int]:
        """chi(u) as a root of unity: (numerator, denominator) of the angle in turns."""
        x = self.dlog[u % self.q]
        num, den = 0, 1
        for pos, i in enumerate(self.kept):
            d = self.diag[i]
            y = sum(self.left[i][j] * x[j] for j in range(len(x))) % d
            num = num * d + chi[pos] * y * den
            den *= d
        return num % den, den


def _euler_phi(q: int) -> int:
    phi = 1
    for p, e in _factorize(q):
        phi *= p ** (e - 1) * (p - 1)
    return phi


def _divisors(q: int) -> list[int]:
    divs = [1]
    for p, e in _factorize(q):
        divs = [d * p**i for d in divs for i in range(e + 1)]
    return sorted(divs)


def cyclotomic_subgroup(q: int, H) -> FieldModel:
    """Subfield of Q(zeta_q) fixed by H <= (Z/qZ)^*; H = {1} is the full field."""
    q = int(q)
    if q < 3:
        raise ValueError("modulus must be at least 3")
    H = frozenset(int(h) % q for h in H)
    if not H:
        H = frozenset({1})
    from math import gcd

    for h in H:
        if gcd(h, q) != 1:
            raise ValueError(f"subgroup element {h} is not a unit mod {q}")
    if 1 not in H:
        raise ValueError("subgroup must contain 1")
    for h1 in H:
        for h2 in H:
            if (h1 * h2) % q not in H:
                raise ValueError("subgroup is not closed under multiplication")

    quotient = _UnitQuotient(q, H)
    group = make_group(quotient.factor_orders)

    units = sorted(quotient.dlog)
    kernel_by_divisor = {f: [u for u in units if u % f == 1 % f] for f in _divisors(q)}

    conductors = {}
    labels = {}
    for chi in group.characters():
        # conductor: smallest f | q with chi trivial on units = 1 mod f
        f_chi = q
        for f in _divisors(q):
            if all(quotient.dirichlet_value_exact(chi, u)[0] == 0 for u in kernel_by_divisor[f]):
                f_chi = f
                break
        conductors[chi] = f_chi
        alphas = quotient.character_exponents_mod_q(chi)
        n = 1
        for g, a in zip(quotient.gens, alphas):
            n = n * pow(g, a, q) % q
        labels[chi] = f"{q}.{n}"

    ramification = {}
    for p, e in _factorize(q):
        pe = p**e
        inertia = frozenset(quotient.project(u) for u in kernel_by_divisor[q // pe])
        ramification[p] = RamificationData(
            prime=p,
            filtration=(inertia,),
            exponents_source="primitive-conductor",
        )
    # drop primes whose inertia dies in the quotient (unramified in the subfield)
    ramification = {p: r for p, r in ramification.items() if r.inertia_order > 1}

    spec = {"type": "cyclotomic", "modulus": q, "subgroup": sorted(H)}
    model = FieldModel("cyclotomic", group, spec, conductors, labels, ramification)
    model._quotient = quotient
    return model


# ---------------------------------------------------------------------------
# field-spec parsing


def parse_field_spec(text: str) -> FieldModel:
    """Build a model from an inline JSON spec or a path to one."""
    candidate = Path(text)
    try:
        if candidate.is_file():
            text = candidate.read_text()
    except OSError:
        pass
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"field spec is not valid JSON: {exc}") from exc
    if not isinstance(data, dict) or "type" not in data:
        raise ValueError("field spec must be an object with a 'type' key")
    if data["type"] == "multiquadratic":
        return multiquadratic(data["primes"])
    if data["type"] == "cyclotomic":
        return cyclotomic_subgroup(data["modulus"], data.get("subgroup", [1]))
    raise ValueError(f"unknown field type {data['type']!r}")


@lru_cache(maxsize=32)
def _cached_field(spec_text: str) -> FieldModel:
    return parse_field_spec(spec_text)
