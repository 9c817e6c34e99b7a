"""Random-phase sampler for the limiting distribution of race vectors.

Each positive ordinate gamma of each nontrivial character carries one uniform
phase theta, shared across the coordinates of a sample; the vector
X_i = E(t_i) + sum over (chi, gamma <= T) of 2 Re(<t_i,chi> e^{i theta}) /
sqrt(1/4 + gamma^2) then has the truncated limiting law, with characteristic
function e^{-i<E,x>} times a product of Bessel J_0 factors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import j0

from .groups import character_value
from .race import RaceSpec, mean_E
from .zeros import ZeroArchive

_CHUNK = 16384


@dataclass(frozen=True)
class SimConfig:
    height: float
    samples: int
    seed: int = 0


def _zero_terms(spec: RaceSpec, height: float):
    """Flattened (amplitude, coefficient) arrays over all (chi, gamma <= T)."""
    field = spec.field
    archive = spec.archive
    if spec.mode.kind != "zeros" or archive is None:
        raise ValueError("sampling requires ZeroData mode with an archive")
    if archive.height < height - 1e-9:
        raise ValueError(
            f"archive height {archive.height} is below the requested truncation {height}"
        )
    G = field.group
    amps = []
    coeffs = []
    vectors = spec.race_vectors()
    for chi in G.nontrivial_characters():
        gammas = archive.for_character(field.char_labels[chi])
        gammas = gammas[gammas <= height + 1e-12]
        if not gammas.size:
            continue
        t_hat = [
            character_value(G, chi, a).conjugate() - character_value(G, chi, b).conjugate()
            for a, b in zip(spec.classes, spec.classes[1:])
        ]
        amps.append(1.0 / np.sqrt(0.25 + gammas**2))
        coeffs.append(np.tile(np.array(t_hat)[:, None], (1, len(gammas))))
    if not amps:
        return np.empty(0), np.empty((len(vectors), 0), dtype=complex)
    return np.concatenate(amps), np.concatenate(coeffs, axis=1)


def sample_mu(spec: RaceSpec, config: SimConfig) -> np.ndarray:
    """Sample matrix of shape (samples, r) from the truncated limiting law."""
    amp, coeff = _zero_terms(spec, config.height)
    means = np.array([mean_E(spec, t) for t in spec.race_vectors()])
    cos_part = (2 * amp * coeff.real).T  # (K, r)
    sin_part = (-2 * amp * coeff.imag).T
    rng = np.random.default_rng(config.seed)
    out = np.empty((config.samples, len(means)))
    done = 0
    while done < config.samples:
        m = min(_CHUNK, config.samples - done)
        theta = rng.uniform(0.0, 2.0 * np.pi, size=(m, len(amp)))
        out[done : done + m] = means + np.cos(theta) @ cos_part + np.sin(theta) @ sin_part
        done += m
    return out


def empirical_delta(samples: np.ndarray) -> tuple[float, float]:
    """Fraction of rows with every coordinate negative, with binomial stderr."""
    if samples.size == 0:
        raise ValueError("empty sample matrix")
    n = samples.shape[0]
    p = float(np.mean(np.all(samples < 0, axis=1)))
    return p, float(np.sqrt(p * (1 - p) / n))


def characteristic_function(spec: RaceSpec, height: float, x: np.ndarray) -> complex:
    """Truncated-model CF at x: e^{-i<E,x>} times the Bessel product."""
    amp, coeff = _zero_terms(spec, height)
    means = np.array([mean_E(spec, t) for t in spec.race_vectors()])
    x = np.asarray(x, dtype=float)
    inner = x @ coeff  # <t-hat(chi), x> per zero column
    return complex(np.exp(-1j * means.dot(x)) * np.prod(j0(2 * np.abs(inner) * amp)))


def empirical_cf(samples: np.ndarray, x: np.ndarray) -> tuple[complex, float]:
    """Empirical CF (mean of e^{-i x.X}) and the stderr of that mean."""
    phases = np.exp(-1j * samples @ np.asarray(x, dtype=float))
    n = len(phases)
    value = complex(phases.mean())
    spread = float(np.sqrt((phases.real.var(ddof=1) + phases.imag.var(ddof=1)) / n))
    return value, spread


def sample_class_scores(
    field, archive: ZeroArchive, height: float, samples: int, seed: int = 0
) -> tuple[np.ndarray, list]:
    """Per-class scores Y_a sharing one phase stream, so that any race vector
    is a row difference: X_{t_{a,b}} = Y_a - Y_b with the correct joint law.

    Returns (matrix of shape (samples, |G|), element order).
    """
    if archive.height < height - 1e-9:
        raise ValueError("archive height is below the requested truncation")
    G = field.group
    elements = list(G.elements())
    counts = {g: 0 for g in elements}
    for g in elements:
        counts[G.mul(g, g)] += 1
    amps = []
    coeffs = []
    for chi in G.nontrivial_characters():
        gammas = archive.for_character(field.char_labels[chi])
        gammas = gammas[gammas <= height + 1e-12]
        if not gammas.size:
            continue
        col = [character_value(G, chi, a).conjugate() for a in elements]
        amps.append(1.0 / np.sqrt(0.25 + gammas**2))
        coeffs.append(np.tile(np.array(col)[:, None], (1, len(gammas))))
    amp = np.concatenate(amps)
    coeff = np.concatenate(coeffs, axis=1)
    means = -np.array([counts[g] for g in elements], dtype=float)
    cos_part = (2 * amp * coeff.real).T
    sin_part = (-2 * amp * coeff.imag).T
    rng = np.random.default_rng(seed)
    out = np.empty((samples, len(elements)))
    done = 0
    while done < samples:
        m = min(_CHUNK, samples - done)
        theta = rng.uniform(0.0, 2.0 * np.pi, size=(m, len(amp)))
        out[done : done + m] = means + np.cos(theta) @ cos_part + np.sin(theta) @ sin_part
        done += m
    return out, elements
