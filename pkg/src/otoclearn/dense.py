"""Dense 2^n x 2^n ground-truth engine: exact Heisenberg evolution and OTOCs.

Kronecker products are built site-major with site 0 as the leftmost factor;
every other engine in the package follows the same ordering.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import NumericalFailure, ResourceLimitError
from .hamiltonians import PAULI, Family, TermList, build_terms

DENSE_CAP_DEFAULT = 12

HERMITICITY_TOL = 1e-12
IMAG_TRACE_TOL = 1e-10


class Target(str, Enum):
    """The two learned OTOC functions."""

    XZ = "xz"  # single OTOC: V = X on the last site, W = Z on the first
    SUM = "sum"  # sum over all nine (V, W) Pauli pairs at the chain ends


@dataclass(frozen=True)
class OtocValue:
    """An OTOC f together with its squared-commutator form c = 1 - f."""

    f: float
    c: float


def pauli_string_dense(n: int, operators) -> np.ndarray:
    """Kronecker-expand a sparse Pauli string to a 2^n x 2^n matrix."""
    mats = [PAULI["I"]] * n
    for site, letter in operators:
        if not 0 <= site < n:
            raise ValueError(f"site {site} outside 0..{n - 1}")
        mats[site] = PAULI[letter]
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def dense_hamiltonian(terms: TermList, cap: int = DENSE_CAP_DEFAULT) -> np.ndarray:
    """Sum the term list into a dense Hermitian matrix.

    Refuses chains longer than `cap` sites; 2^n x 2^n storage grows too fast
    past that.
    """
    if terms.n > cap:
        raise ResourceLimitError(
            f"n={terms.n} exceeds the dense cap of {cap} sites"
        )
    dim = 2**terms.n
    h = np.zeros((dim, dim), dtype=np.complex128)
    for term in terms.terms:
        h += term.coefficient * pauli_string_dense(terms.n, term.operators)
    return h


def heisenberg_dense(h: np.ndarray, op: np.ndarray, sign: int) -> np.ndarray:
    """Conjugate op by exp(i*sign*h): returns e^{i s h} op e^{-i s h}.

    One eigendecomposition of h serves both exponentials.  Any evolution time
    is expected to be absorbed into h itself.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if h.shape != op.shape or h.shape[0] != h.shape[1]:
        raise ValueError("h and op must be square matrices of equal dimension")
    scale = max(1.0, float(np.abs(h).max()))
    if np.abs(h - h.conj().T).max() > HERMITICITY_TOL * scale:
        raise ValueError("h is not Hermitian within tolerance")
    w, q = np.linalg.eigh(h)
    phases = np.exp(1j * sign * w)
    e = (q * phases) @ q.conj().T
    return e @ op @ e.conj().T


def otoc_dense(
    family: Family,
    x,
    n: int,
    v: str,
    v_site: int,
    w: str,
    w_site: int,
    sign: int,
    cap: int = DENSE_CAP_DEFAULT,
) -> OtocValue:
    """OTOC under the maximally mixed state:
    f = (1/2^n) Re Tr(V W' V W') with W' the Heisenberg-evolved W.
    """
    h = dense_hamiltonian(build_terms(family, x, n), cap=cap)
    vm = pauli_string_dense(n, [(v_site, v)])
    wm = pauli_string_dense(n, [(w_site, w)])
    w_evolved = heisenberg_dense(h, wm, sign)
    return _otoc_from_dense(vm, w_evolved, n)


def _otoc_from_dense(vm: np.ndarray, w_evolved: np.ndarray, n: int) -> OtocValue:
    prod = vm @ w_evolved
    tr = np.trace(prod @ prod) / 2**n
    if abs(tr.imag) > IMAG_TRACE_TOL:
        raise NumericalFailure(
            f"OTOC trace has imaginary residue {tr.imag:.3e}; it must be real "
            "for the maximally mixed state"
        )
    f = float(tr.real)
    return OtocValue(f=f, c=1.0 - f)


def target_dense(
    target: Target, family: Family, x, n: int, cap: int = DENSE_CAP_DEFAULT
) -> float:
    """Evaluate one of the two learned functions exactly.

    XZ evolves W = Z on site 0 with sign +1 and pairs it with V = X on site
    n-1.  SUM reverses the evolution direction (sign -1) and accumulates all
    nine (V, W) Pauli pairs; the eigendecomposition of H is shared across the
    nine traces.
    """
    target = Target(target)
    family = Family(family)
    h = dense_hamiltonian(build_terms(family, x, n), cap=cap)
    if target is Target.XZ:
        vm = pauli_string_dense(n, [(n - 1, "X")])
        wm = pauli_string_dense(n, [(0, "Z")])
        return _otoc_from_dense(vm, heisenberg_dense(h, wm, sign=1), n).f
    total = 0.0
    w_evolved = {
        letter: heisenberg_dense(h, pauli_string_dense(n, [(0, letter)]), sign=-1)
        for letter in ("X", "Y", "Z")
    }
    for v_letter in ("X", "Y", "Z"):
        vm = pauli_string_dense(n, [(n - 1, v_letter)])
        for w_letter in ("X", "Y", "Z"):
            total += _otoc_from_dense(vm, w_evolved[w_letter], n).f
    return total


def mi_lower_bound(o_sum: float) -> float:
    """Mutual-information lower bound 4 - log2(7 + o_sum) from the OTOC sum.

    Valid o_sum lies in [-3, 9]; a small tolerance absorbs numerical slop.
    """
    if not -3.0 - 1e-6 <= o_sum <= 9.0 + 1e-6:
        raise ValueError(f"OTOC sum {o_sum} outside the valid range [-3, 9]")
    arg = 7.0 + o_sum
    if arg <= 0.0:
        raise ValueError("7 + o_sum must be positive")
    return 4.0 - float(np.log2(arg))
