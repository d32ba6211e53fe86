"""Parameterised spin-chain Hamiltonian families and input-point sampling.

Each family maps a coupling vector x in R^3 to an n-site Hamiltonian written
as a list of weighted Pauli strings on an open chain.  Since H(x) is linear
in x, exp(-iH(x)) equals the evolution under H(x/|x|) for a time |x|, so the
norm of a sampled point doubles as the effective evolution time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

PAULI_LETTERS = ("X", "Y", "Z")

PAULI = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=np.complex128),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128),
}


class Family(str, Enum):
    """The four parameterised Hamiltonian families."""

    H1 = "h1"  # transverse field + XX couplings + ZXZ cluster terms
    H2 = "h2"  # XYZ Heisenberg chain
    H3 = "h3"  # Heisenberg chain plus half-strength next-nearest couplings
    H4 = "h4"  # mixed-field Ising chain


# Smallest chain on which every sum in the family produces valid site indices.
MIN_SITES = {Family.H1: 3, Family.H2: 2, Family.H3: 3, Family.H4: 1}


@dataclass(frozen=True)
class PauliTerm:
    """One weighted Pauli string: coefficient times a product of single-site
    Paulis.  Identity factors are implicit; sites are strictly increasing."""

    coefficient: float
    operators: tuple[tuple[int, str], ...]

    def __post_init__(self):
        sites = [s for s, _ in self.operators]
        if sorted(set(sites)) != sites:
            raise ValueError(f"sites must be strictly increasing, got {sites}")
        for _, letter in self.operators:
            if letter not in PAULI_LETTERS:
                raise ValueError(f"unknown Pauli letter {letter!r}")

    @property
    def sites(self) -> tuple[int, ...]:
        return tuple(s for s, _ in self.operators)


@dataclass(frozen=True)
class TermList:
    """A Hamiltonian as a sum of Pauli terms on an n-site open chain.

    Real coefficients on Pauli strings make the operator Hermitian by
    construction.
    """

    n: int
    terms: tuple[PauliTerm, ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("site count must be positive")
        for term in self.terms:
            if term.operators and term.operators[-1][0] >= self.n:
                raise ValueError(
                    f"term {term} references a site beyond the {self.n}-site chain"
                )


def ball_radius(family: Family, n: int) -> float:
    """Radius of the sampling ball: n for H1-H3, 2n for H4."""
    return 2.0 * n if family is Family.H4 else float(n)


def _check_vector(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (3,):
        raise ValueError(f"parameter vector must have shape (3,), got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("parameter vector must be finite")
    return x


def build_terms(family: Family, x, n: int) -> TermList:
    """Construct the family's Hamiltonian at coupling vector x as a TermList.

    Open boundary conditions; exactly-zero coefficients are dropped.  Raises
    ValueError when the chain is too short for the family's term ranges.
    """
    family = Family(family)
    x = _check_vector(x)
    if n < MIN_SITES[family]:
        raise ValueError(
            f"{family.value} needs at least {MIN_SITES[family]} sites, got n={n}"
        )
    x1, x2, x3 = x
    terms: list[PauliTerm] = []

    def add(coeff: float, *ops: tuple[int, str]):
        if coeff != 0.0:
            terms.append(PauliTerm(coeff, ops))

    if family is Family.H1:
        for i in range(n):
            add(x1, (i, "X"))
        for j in range(n - 1):
            add(x2, (j, "X"), (j + 1, "X"))
        for k in range(n - 2):
            add(x3, (k, "Z"), (k + 1, "X"), (k + 2, "Z"))
    elif family is Family.H2:
        for coeff, letter in ((x1, "X"), (x2, "Y"), (x3, "Z")):
            for j in range(n - 1):
                add(coeff, (j, letter), (j + 1, letter))
    elif family is Family.H3:
        # Next-nearest sums run to n-2 so the last pair stays on the chain.
        for coeff, letter in ((x1, "X"), (x2, "Y"), (x3, "Z")):
            for j in range(n - 1):
                add(coeff, (j, letter), (j + 1, letter))
            for j in range(n - 2):
                add(0.5 * coeff, (j, letter), (j + 2, letter))
    else:  # H4
        for i in range(n):
            add(x1, (i, "X"))
        for i in range(n):
            add(x2, (i, "Z"))
        for k in range(n - 1):
            add(x3, (k, "Z"), (k + 1, "Z"))

    return TermList(n=n, terms=tuple(terms))


def sample_inputs(family: Family, n: int, count: int, seed: int) -> np.ndarray:
    """Draw `count` points uniformly from the family's sampling ball.

    Each point i is generated from its own RNG substream keyed by
    (seed, n, i), so the sequence is reproducible, prefix-stable, and safe to
    generate in parallel.  The underlying stream depends only on (seed, n);
    the family enters through the ball radius alone, so all families at a
    given (seed, n) share the same directions and radial fractions.
    """
    family = Family(family)
    if count < 0:
        raise ValueError("count must be non-negative")
    radius = ball_radius(family, n)
    out = np.empty((count, 3), dtype=float)
    base = np.random.SeedSequence(entropy=seed, spawn_key=(n,))
    for i, child in enumerate(base.spawn(count)):
        rng = np.random.default_rng(child)
        direction = rng.standard_normal(3)
        norm = np.linalg.norm(direction)
        while norm < 1e-12:  # astronomically rare, but keep it well-defined
            direction = rng.standard_normal(3)
            norm = np.linalg.norm(direction)
        # r = R * u^(1/3) makes the radial CDF r^3/R^3, i.e. uniform in volume.
        u = rng.random()
        out[i] = (radius * u ** (1.0 / 3.0) / norm) * direction
    return out


def split_scaling(x) -> tuple[float, np.ndarray | None]:
    """Split x into (t, unit) with t = |x| and x = t * unit.

    The zero vector has no direction; it is signalled as (0.0, None) so
    callers can short-circuit the zero-time case.
    """
    x = _check_vector(x)
    t = float(np.linalg.norm(x))
    if t == 0.0:
        return 0.0, None
    return t, x / t
