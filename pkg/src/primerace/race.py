"""Race statistics: means, variances, biases, the U/S/T maps, and covariance.

Conventions: for a mean-zero class function t, the limiting random variable has
mean E(t) = -<t, r_G> - sum_{chi != 1} <t, chi> ord(chi) and variance
V(t) = sum_{chi != 1} |<t, chi>|^2 w(chi), where w(chi) is the two-sided zero
sum of L(s, chi) (log A(chi) in Asymptotic mode). A race over ordered classes
(C_1, ..., C_{r+1}) uses the consecutive differences t_i = t_{C_i, C_{i+1}}.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from functools import cached_property

import numpy as np

from .fields import FieldModel
from .groups import (
    CharacterIndex,
    ClassFunction,
    GroupElement,
    character_function,
    character_value,
    inner_product,
    race_class_function,
    square_root_counts,
)
from .zeros import ASYMPTOTIC, ZeroArchive, ZeroSumMode, character_weight


@dataclass(frozen=True, eq=False)
class RaceSpec:
    """A race: field, ordered competitor classes, and the zero-sum mode."""

    field: FieldModel
    classes: tuple[GroupElement, ...]
    mode: ZeroSumMode = ASYMPTOTIC
    central_orders: dict = dataclass_field(default_factory=dict)
    archive: ZeroArchive | None = None

    def __post_init__(self):
        G = self.field.group
        reduced = tuple(G.reduce(c) for c in self.classes)
        object.__setattr__(self, "classes", reduced)
        if len(reduced) < 2:
            raise ValueError("a race needs at least two classes")
        if len(set(reduced)) != len(reduced):
            raise ValueError("race classes must be pairwise distinct")
        for label, order in self.central_orders.items():
            chi = self.field.label_to_char.get(label)
            if chi is None:
                raise ValueError(f"unknown character label {label!r}")
            if not any(chi) and order:
                raise ValueError("central order must be zero on the trivial character")
            if order < 0 or order != int(order):
                raise ValueError(f"central order for {label!r} must be a nonnegative integer")
        if self.mode.kind == "zeros":
            if self.archive is None:
                raise ValueError("ZeroData mode requires an archive")
            if self.archive.fingerprint != self.field.fingerprint():
                raise ValueError("archive was built for a different field")
            missing = set(self.field.nontrivial_labels()) - set(self.archive.entries)
            if missing:
                raise ValueError(f"archive is missing characters: {sorted(missing)}")

    @cached_property
    def char_weights(self) -> dict[CharacterIndex, float]:
        """w(chi) for every nontrivial character."""
        return {
            chi: character_weight(chi, self.field, self.mode, self.archive)
            for chi in self.field.group.nontrivial_characters()
        }

    @cached_property
    def total_weight(self) -> float:
        """N_L, the sum of all character weights."""
        return sum(self.char_weights.values())

    def race_vectors(self) -> list[ClassFunction]:
        """The consecutive-difference class functions t_1, ..., t_r."""
        G = self.field.group
        return [
            race_class_function(G, a, b) for a, b in zip(self.classes, self.classes[1:])
        ]


def _require_mean_zero(spec: RaceSpec, t: ClassFunction) -> None:
    G = spec.field.group
    total = sum(t.values())
    scale = max(1.0, max(abs(v) for v in t.values()) if t else 1.0)
    if abs(total) > 1e-12 * G.order * scale:
        raise ValueError("class function must be orthogonal to the trivial character")


def _char_coefficient(spec: RaceSpec, t: ClassFunction, chi: CharacterIndex) -> complex:
    return inner_product(spec.field.group, t, character_function(spec.field.group, chi))


def mean_E(spec: RaceSpec, t: ClassFunction) -> float:
    """E(t) = -<t, r_G> - sum of <t, chi> times the central zero order."""
    _require_mean_zero(spec, t)
    G = spec.field.group
    counts = square_root_counts(G)
    value = -inner_product(G, t, {g: complex(c) for g, c in counts.items()})
    for label, order in spec.central_orders.items():
        if not order:
            continue
        value -= order * _char_coefficient(spec, t, spec.field.label_to_char[label])
    if abs(value.imag) > 1e-9 * max(1.0, abs(value.real)):
        raise ArithmeticError(f"mean has imaginary part {value.imag}")
    return value.real


def variance_V(spec: RaceSpec, t: ClassFunction) -> float:
    """V(t) = sum over nontrivial chi of |<t, chi>|^2 w(chi)."""
    _require_mean_zero(spec, t)
    return sum(
        abs(_char_coefficient(spec, t, chi)) ** 2 * w for chi, w in spec.char_weights.items()
    )


def bias_B(spec: RaceSpec, t: ClassFunction) -> float:
    """Normalized bias E(t)/sqrt(V(t))."""
    v = variance_V(spec, t)
    if v <= 0:
        raise ValueError("bias is undefined at zero variance")
    return mean_E(spec, t) / v**0.5


def u_map(spec: RaceSpec) -> dict[GroupElement, float]:
    """U(a) = (1/N_L) sum of Re(chi(a)) w(chi), on nonidentity elements."""
    G = spec.field.group
    n_total = spec.total_weight
    out = {}
    for a in G.elements():
        if a == G.identity:
            continue
        s = sum(
            character_value(G, chi, a).real * w for chi, w in spec.char_weights.items()
        )
        out[a] = s / n_total
    return out


def s_and_t_maps(spec: RaceSpec):
    """The pair maps S(a,b) = U(a) - U(b) and T(a,b) = 2 - 2U(ab^-1)."""
    G = spec.field.group
    u = u_map(spec)

    def s_map(a: GroupElement, b: GroupElement) -> float:
        a, b = G.reduce(a), G.reduce(b)
        if a == G.identity or b == G.identity:
            raise ValueError("S is defined on nonidentity pairs")
        return u[a] - u[b]

    def t_map(a: GroupElement, b: GroupElement) -> float:
        a, b = G.reduce(a), G.reduce(b)
        d = G.mul(a, G.inv(b))
        if d == G.identity:
            raise ValueError("T(a, a) would divide the race by zero variance")
        return 2.0 - 2.0 * u[d]

    return s_map, t_map


def correlation_rho(spec: RaceSpec, t1: ClassFunction, t2: ClassFunction) -> float:
    """rho(t1, t2): the correlation of the two limiting race variables."""
    _require_mean_zero(spec, t1)
    _require_mean_zero(spec, t2)
    v1 = v2 = cov = 0.0
    for chi, w in spec.char_weights.items():
        c1 = _char_coefficient(spec, t1, chi)
        c2 = _char_coefficient(spec, t2, chi)
        v1 += abs(c1) ** 2 * w
        v2 += abs(c2) ** 2 * w
        cov += (c1 * c2.conjugate()).real * w
    if v1 <= 0 or v2 <= 0:
        raise ValueError("correlation is undefined at zero variance")
    return cov / (v1 * v2) ** 0.5


def rho_adjacent_closed(u_ab: float, u_bc: float, u_ac: float) -> float:
    """rho(t_{a,b}, t_{b,c}) from the U values of the three quotients."""
    return (-1.0 + u_ab + u_bc - u_ac) / ((2 - 2 * u_ab) * (2 - 2 * u_bc)) ** 0.5


def rho_disjoint_closed(
    u_ca: float, u_da: float, u_cb: float, u_db: float, t_ab: float, t_cd: float
) -> float:
    """rho(t_{a,b}, t_{c,d}) for disjoint pairs from U values and T values."""
    return (u_ca - u_da - u_cb + u_db) / (t_ab * t_cd) ** 0.5


@dataclass(frozen=True)
class CovarianceReport:
    """Standardized covariance matrix of a race with its conditioning summary."""

    Delta: np.ndarray
    lambda_min: float
    B: np.ndarray
    V: np.ndarray
    t_hat_inf: float


def covariance_matrix(spec: RaceSpec) -> CovarianceReport:
    """Delta = (rho(t_i, t_j)) for the consecutive-difference vectors."""
    G = spec.field.group
    chars = list(spec.char_weights)
    w = np.array([spec.char_weights[chi] for chi in chars])
    r = len(spec.classes) - 1
    coeff = np.empty((r, len(chars)), dtype=complex)
    for k, chi in enumerate(chars):
        vals = {c: character_value(G, chi, c).conjugate() for c in spec.classes}
        for i in range(r):
            coeff[i, k] = vals[spec.classes[i]] - vals[spec.classes[i + 1]]
    V = (np.abs(coeff) ** 2 * w).sum(axis=1)
    if np.any(V <= 0):
        raise ValueError("a race vector has zero variance")
    cov = ((coeff[:, None, :] * coeff[None, :, :].conjugate()).real * w).sum(axis=2)
    scale = np.sqrt(V)
    delta = cov / np.outer(scale, scale)
    delta = 0.5 * (delta + delta.T)
    np.fill_diagonal(delta, 1.0)
    lam = float(np.linalg.eigvalsh(delta)[0])
    if lam <= 1e-10:
        raise ValueError(f"covariance matrix is numerically degenerate (lambda_min={lam})")
    means = np.array([mean_E(spec, t) for t in spec.race_vectors()])
    return CovarianceReport(
        Delta=delta,
        lambda_min=lam,
        B=means / scale,
        V=V,
        t_hat_inf=float(np.abs(coeff).max()),
    )


def structured_matrices(r: int, rho: float):
    """Gamma_r, Sigma_r(rho), and the closed-form determinant of Sigma_r(rho).

    Gamma_r is tridiagonal with unit diagonal and -1/2 off the diagonal;
    Sigma_r replaces the (1,2) entry by rho.
    """
    if r < 1:
        raise ValueError("dimension must be at least 1")
    gamma = np.eye(r)
    for i in range(r - 1):
        gamma[i, i + 1] = gamma[i + 1, i] = -0.5
    sigma = gamma.copy()
    if r >= 2:
        sigma[0, 1] = sigma[1, 0] = rho
    det = (r - 2 * (r - 1) * rho**2) / 2 ** (r - 1)
    return gamma, sigma, det
