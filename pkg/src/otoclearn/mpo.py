"""Matrix-product-operator engine: Heisenberg-picture TEBD with truncation.

Operators are stored as one rank-4 tensor per site with index order
(left bond, physical out, physical in, right bond).  Evolution conjugates
both physical legs by exactly exponentiated Trotter gates, truncating with
an SVD after every gate while an orthogonality centre is swept along the
chain.  A time-splitting mode halves the evolution time of each operator in
the OTOC trace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dense import OtocValue, Target
from .errors import NumericalFailure, ResourceLimitError
from .hamiltonians import PAULI, Family, build_terms, split_scaling

DENSE_TRACE_CAP_DEFAULT = 10

_SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=np.complex128
)


@dataclass(frozen=True)
class TruncationPolicy:
    """Bond truncation rule: keep at most chi_max singular values and drop
    any whose relative squared weight falls below svd_cutoff."""

    chi_max: int
    svd_cutoff: float = 1e-12

    def __post_init__(self):
        if self.chi_max < 1:
            raise ValueError("chi_max must be at least 1")
        if self.svd_cutoff < 0:
            raise ValueError("svd_cutoff must be non-negative")


@dataclass
class MPO:
    """A matrix product operator over n sites.

    `discarded_weight` accumulates the relative squared singular-value weight
    dropped by every truncation that produced this operator.
    """

    n: int
    tensors: list[np.ndarray]
    discarded_weight: float = 0.0

    def __post_init__(self):
        if len(self.tensors) != self.n:
            raise ValueError("tensor count must equal the site count")
        if self.tensors[0].shape[0] != 1 or self.tensors[-1].shape[-1] != 1:
            raise ValueError("boundary bond dimensions must be 1")
        for left, right in zip(self.tensors, self.tensors[1:]):
            if left.shape[-1] != right.shape[0]:
                raise ValueError("adjacent tensors must share bond dimensions")

    @property
    def bond_dims(self) -> list[int]:
        return [t.shape[-1] for t in self.tensors[:-1]]


def pauli_mpo(letter: str, site: int, n: int) -> MPO:
    """Bond-dimension-1 MPO for a single-site Pauli padded with identities."""
    if not 0 <= site < n:
        raise ValueError(f"site {site} outside 0..{n - 1}")
    tensors = []
    for i in range(n):
        mat = PAULI[letter] if i == site else PAULI["I"]
        tensors.append(mat.reshape(1, 2, 2, 1).astype(np.complex128))
    return MPO(n=n, tensors=tensors)


def identity_mpo(n: int) -> MPO:
    tensors = [PAULI["I"].reshape(1, 2, 2, 1).copy() for _ in range(n)]
    return MPO(n=n, tensors=tensors)


def mpo_to_dense(op: MPO, cap: int = 14) -> np.ndarray:
    """Contract an MPO back to a dense 2^n x 2^n matrix (site 0 leftmost)."""
    if op.n > cap:
        raise ResourceLimitError(f"refusing to densify an MPO with n={op.n} > {cap}")
    block = op.tensors[0][0]  # (out, in, bond)
    for tensor in op.tensors[1:]:
        block = np.tensordot(block, tensor, axes=(-1, 0))
    block = block[..., 0]  # shape (o0, i0, o1, i1, ...)
    n = op.n
    perm = list(range(0, 2 * n, 2)) + list(range(1, 2 * n, 2))
    return block.transpose(perm).reshape(2**n, 2**n)


def mpo_trace(op: MPO) -> complex:
    vec = np.ones((1,), dtype=np.complex128)
    for tensor in op.tensors:
        vec = vec @ np.trace(tensor, axis1=1, axis2=2)
    return complex(vec[0])


def mpo_pair_trace(a: MPO, b: MPO) -> complex:
    """Tr(a @ b) by sweeping a joint boundary environment along the chain."""
    if a.n != b.n:
        raise ValueError("site counts differ")
    env = np.ones((1, 1), dtype=np.complex128)
    for ta, tb in zip(a.tensors, b.tensors):
        tmp = np.tensordot(env, ta, axes=(0, 0))  # (bB, s, t, cA)
        # contract b's left bond with env and its (out, in) = (t, s) legs
        env = np.tensordot(tmp, tb, axes=([0, 2, 1], [0, 1, 2]))
    return complex(env[0, 0])


def _keep_count(s: np.ndarray, policy: TruncationPolicy) -> tuple[int, float]:
    """Number of singular values to keep and the relative weight discarded."""
    total = float(np.sum(s * s))
    if total == 0.0:
        return 1, 0.0
    weights = (s * s) / total
    above = int(np.count_nonzero(weights >= policy.svd_cutoff))
    keep = max(1, min(policy.chi_max, above))
    return keep, float(weights[keep:].sum())


def _svd_split(theta, left_shape, right_shape, policy, move_right):
    """Truncated SVD of theta; singular values go with the new centre side."""
    try:
        u, s, vh = np.linalg.svd(theta, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"SVD failed during truncation: {exc}") from exc
    keep, discarded = _keep_count(s, policy)
    if move_right:
        left = u[:, :keep]
        right = s[:keep, None] * vh[:keep]
    else:
        left = u[:, :keep] * s[:keep]
        right = vh[:keep]
    return (
        left.reshape(*left_shape, keep),
        right.reshape(keep, *right_shape),
        discarded,
    )


def _move_center_right(tensors, i):
    dl, _, _, dr = tensors[i].shape
    q, r = np.linalg.qr(tensors[i].reshape(dl * 4, dr))
    tensors[i] = q.reshape(dl, 2, 2, -1)
    tensors[i + 1] = np.tensordot(r, tensors[i + 1], axes=(1, 0))


def _move_center_left(tensors, i):
    dl, _, _, dr = tensors[i].shape
    q, r = np.linalg.qr(tensors[i].reshape(dl, 4 * dr).conj().T)
    tensors[i] = q.conj().T.reshape(-1, 2, 2, dr)
    tensors[i - 1] = np.tensordot(tensors[i - 1], r.conj().T, axes=(3, 0))


def _move_center(tensors, center, target):
    while center < target:
        _move_center_right(tensors, center)
        center += 1
    while center > target:
        _move_center_left(tensors, center)
        center -= 1
    return center


def _canonicalize(tensors):
    """Bring every site except 0 into right-canonical form (centre at 0)."""
    for i in range(len(tensors) - 1, 0, -1):
        _move_center_left(tensors, i)


def _apply_two_site(tensors, j, gate, policy, move_right=True):
    """Conjugate the (j, j+1) block by `gate`: O -> gate^dag O gate.

    Assumes the orthogonality centre sits on site j or j+1; afterwards it is
    on j+1 (move_right) or j.
    """
    block = np.tensordot(tensors[j], tensors[j + 1], axes=(3, 0))
    # block: (L, s1, t1, s2, t2, R); out legs contract conj(gate), in legs gate
    uc = gate.conj().reshape(2, 2, 2, 2)
    um = gate.reshape(2, 2, 2, 2)
    block = np.tensordot(uc, block, axes=([0, 1], [1, 3]))  # (a1,a2, L, t1,t2, R)
    block = np.tensordot(block, um, axes=([3, 4], [0, 1]))  # (a1,a2, L, R, b1,b2)
    block = block.transpose(2, 0, 4, 1, 5, 3)  # (L, a1, b1, a2, b2, R)
    dl, _, _, _, _, dr = block.shape
    theta = block.reshape(dl * 4, 4 * dr)
    left, right, discarded = _svd_split(
        theta, (dl, 2, 2), (2, 2, dr), policy, move_right
    )
    tensors[j] = left
    tensors[j + 1] = right
    return discarded


def _apply_three_site(tensors, k, gate, policy):
    """Conjugate the contiguous (k, k+1, k+2) block by an 8x8 gate.

    Centre must be on site k; it ends on site k+2 after two truncated splits.
    """
    block = np.tensordot(tensors[k], tensors[k + 1], axes=(3, 0))
    block = np.tensordot(block, tensors[k + 2], axes=(5, 0))
    # block: (L, s1, t1, s2, t2, s3, t3, R)
    uc = gate.conj().reshape(2, 2, 2, 2, 2, 2)
    um = gate.reshape(2, 2, 2, 2, 2, 2)
    block = np.tensordot(uc, block, axes=([0, 1, 2], [1, 3, 5]))
    # (a1,a2,a3, L, t1,t2,t3, R)
    block = np.tensordot(block, um, axes=([4, 5, 6], [0, 1, 2]))
    # (a1,a2,a3, L, R, b1,b2,b3)
    block = block.transpose(3, 0, 5, 1, 6, 2, 7, 4)  # (L,a1,b1,a2,b2,a3,b3,R)
    dl = block.shape[0]
    dr = block.shape[-1]
    theta = block.reshape(dl * 4, 16 * dr)
    left, rest, d1 = _svd_split(theta, (dl, 2, 2), (2, 2, 2, 2, dr), policy, True)
    tensors[k] = left
    mid = rest.shape[0]
    theta = rest.reshape(mid * 4, 4 * dr)
    middle, right, d2 = _svd_split(theta, (mid, 2, 2), (2, 2, dr), policy, True)
    tensors[k + 1] = middle
    tensors[k + 2] = right
    return d1 + d2


@dataclass(frozen=True)
class GateOp:
    """One Hermitian Trotter term: `sites` is a contiguous-or-skipping tuple
    and `term` the matrix acting on those sites (4x4 pair or 8x8 trio)."""

    kind: str  # "bond" (j, j+1), "nn" (j, j+2), or "trio" (k, k+1, k+2)
    sites: tuple[int, ...]
    term: np.ndarray


def _exp_gate(term: np.ndarray, sign: int, tau: float) -> np.ndarray:
    """exp(-i * sign * term * tau) via eigendecomposition (term Hermitian)."""
    w, q = np.linalg.eigh(term)
    return (q * np.exp(-1j * sign * w * tau)) @ q.conj().T


@dataclass(frozen=True)
class TrotterPlan:
    """Second-order Trotter schedule for one Heisenberg evolution.

    `groups` partitions the Hamiltonian terms into layers of mutually
    disjoint gates; one step of size tau applies the palindrome
    G1(tau/2) ... Gm-1(tau/2), Gm(tau), Gm-1(tau/2) ... G1(tau/2).
    The step sizes tile total_time with a final partial step.
    """

    n: int
    dt: float
    total_time: float
    groups: tuple[tuple[GateOp, ...], ...]

    @property
    def step_sizes(self) -> tuple[float, ...]:
        if self.total_time <= 0.0:
            return ()
        nfull = int(math.floor(self.total_time / self.dt + 1e-9))
        rem = self.total_time - nfull * self.dt
        steps = [self.dt] * nfull
        if rem > 1e-12 * self.dt:
            steps.append(rem)
        return tuple(steps)

    def layer_unitaries(self, sign: int, tau: float):
        """Per-step gate layers for one step of size tau, exponentiated."""
        if not self.groups:
            return []
        halves = [
            [(op, _exp_gate(op.term, sign, tau / 2)) for op in group]
            for group in self.groups[:-1]
        ]
        middle = [(op, _exp_gate(op.term, sign, tau)) for op in self.groups[-1]]
        return halves + [middle] + halves[::-1]


def _two_site_matrix(letter_a: str, letter_b: str) -> np.ndarray:
    return np.kron(PAULI[letter_a], PAULI[letter_b])


def make_trotter_plan(family: Family, x, n: int, dt: float = 0.05) -> TrotterPlan:
    """Compile the family Hamiltonian at x into a gate plan.

    The gates are built from H(x/|x|) and the plan covers total_time = |x|,
    so scaling x only changes the schedule length.  Single-site field terms
    are folded half-and-half into the adjacent bond gates (full weight at the
    chain ends); distance-2 couplings become swap-conjugated bond gates;
    contiguous three-site terms become exact 8x8 gates.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    family = Family(family)
    if n < 2:
        raise ValueError("the gate engine needs at least 2 sites")
    t, unit = split_scaling(x)
    if unit is None:
        return TrotterPlan(n=n, dt=dt, total_time=0.0, groups=())
    terms = build_terms(family, unit, n)

    bond = {}  # j -> 4x4 on (j, j+1)
    nn = {}  # j -> 4x4 on (j, j+2)
    trio = {}  # k -> 8x8 on (k, k+1, k+2)

    def accumulate(store, key, mat):
        store[key] = store.get(key, 0) + mat

    for term in terms.terms:
        sites = term.sites
        letters = [letter for _, letter in term.operators]
        if len(sites) == 1:
            (site,) = sites
            mat = term.coefficient * PAULI[letters[0]]
            if site == 0:
                accumulate(bond, 0, np.kron(mat, PAULI["I"]))
            elif site == n - 1:
                accumulate(bond, n - 2, np.kron(PAULI["I"], mat))
            else:
                accumulate(bond, site - 1, 0.5 * np.kron(PAULI["I"], mat))
                accumulate(bond, site, 0.5 * np.kron(mat, PAULI["I"]))
        elif len(sites) == 2 and sites[1] == sites[0] + 1:
            accumulate(
                bond, sites[0], term.coefficient * _two_site_matrix(*letters)
            )
        elif len(sites) == 2 and sites[1] == sites[0] + 2:
            accumulate(nn, sites[0], term.coefficient * _two_site_matrix(*letters))
        elif len(sites) == 3 and sites == (sites[0], sites[0] + 1, sites[0] + 2):
            mat = term.coefficient * np.kron(
                np.kron(PAULI[letters[0]], PAULI[letters[1]]), PAULI[letters[2]]
            )
            accumulate(trio, sites[0], mat)
        else:
            raise ValueError(f"unsupported term geometry: sites {sites}")

    def gate_ops(store, kind, span):
        return {
            key: GateOp(kind=kind, sites=tuple(range(key, key + span + 1, span)), term=mat)
            for key, mat in store.items()
            if np.abs(mat).max() > 0
        }

    bond_ops = gate_ops(bond, "bond", 1)
    nn_ops = gate_ops(nn, "nn", 2)
    trio_ops = {
        k: GateOp(kind="trio", sites=(k, k + 1, k + 2), term=mat)
        for k, mat in trio.items()
        if np.abs(mat).max() > 0
    }

    # Each group holds gates on pairwise-disjoint sites, so the group
    # exponential factorises exactly into its gates.
    groups = [
        [bond_ops[j] for j in sorted(bond_ops) if j % 2 == 0],
        [bond_ops[j] for j in sorted(bond_ops) if j % 2 == 1],
        [nn_ops[j] for j in sorted(nn_ops) if j % 4 in (0, 1)],
        [nn_ops[j] for j in sorted(nn_ops) if j % 4 in (2, 3)],
        [trio_ops[k] for k in sorted(trio_ops) if k % 3 == 0],
        [trio_ops[k] for k in sorted(trio_ops) if k % 3 == 1],
        [trio_ops[k] for k in sorted(trio_ops) if k % 3 == 2],
    ]
    groups = tuple(tuple(g) for g in groups if g)
    return TrotterPlan(n=n, dt=dt, total_time=t, groups=groups)


def _apply_gate_op(tensors, center, op: GateOp, gate, policy):
    """Apply one exponentiated gate op, managing the orthogonality centre."""
    if op.kind == "bond":
        j = op.sites[0]
        center = _move_center(tensors, center, min(max(center, j), j + 1))
        discarded = _apply_two_site(tensors, j, gate, policy, move_right=True)
        return j + 1, discarded
    if op.kind == "nn":
        j = op.sites[0]
        center = _move_center(tensors, center, min(max(center, j), j + 1))
        discarded = _apply_two_site(tensors, j, _SWAP, policy, move_right=True)
        discarded += _apply_two_site(tensors, j + 1, gate, policy, move_right=True)
        _move_center(tensors, j + 2, j + 1)
        discarded += _apply_two_site(tensors, j, _SWAP, policy, move_right=False)
        return j, discarded
    if op.kind == "trio":
        k = op.sites[0]
        center = _move_center(tensors, center, k)
        discarded = _apply_three_site(tensors, k, gate, policy)
        return k + 2, discarded
    raise ValueError(f"unknown gate kind {op.kind!r}")


def tebd_evolve(op: MPO, plan: TrotterPlan, sign: int, policy: TruncationPolicy) -> MPO:
    """Heisenberg-evolve an MPO through the plan's gate schedule.

    Every gate conjugates both physical legs (O -> g^dag O g) and is followed
    by an SVD truncation under `policy`; `sign` reverses the direction of
    evolution.  The returned operator carries the accumulated discarded
    weight.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if plan.n != op.n:
        raise ValueError("plan and operator disagree on the site count")
    tensors = [t.astype(np.complex128, copy=True) for t in op.tensors]
    discarded = op.discarded_weight
    steps = plan.step_sizes
    if steps:
        _canonicalize(tensors)
        center = 0
        gate_tables = {
            tau: plan.layer_unitaries(sign, tau) for tau in sorted(set(steps))
        }
        for tau in steps:
            for layer in gate_tables[tau]:
                for gate_op, gate in layer:
                    center, d = _apply_gate_op(tensors, center, gate_op, gate, policy)
                    discarded += d
    if any(not np.all(np.isfinite(t)) for t in tensors):
        raise NumericalFailure("non-finite tensor entries after TEBD evolution")
    return MPO(n=op.n, tensors=tensors, discarded_weight=discarded)


def trotter_unitary_dense(plan: TrotterPlan, sign: int, cap: int = 12) -> np.ndarray:
    """Kronecker-expand the plan's full gate product into a dense unitary.

    Used as the brute-force reference that applies the *identical* gate
    schedule without any tensor-network machinery.  Sequential Heisenberg
    conjugations O -> g'^dag (g^dag O g) g' compose to (g g')^dag O (g g'),
    so the earliest-applied gate sits leftmost in the returned product U and
    the evolved operator is U^dag O U.
    """
    if plan.n > cap:
        raise ResourceLimitError(f"n={plan.n} exceeds the dense cap of {cap}")
    dim = 2**plan.n
    total = np.eye(dim, dtype=np.complex128)
    for tau in plan.step_sizes:
        for layer in plan.layer_unitaries(sign, tau):
            for gate_op, gate in layer:
                total = total @ _embed_gate_dense(plan.n, gate_op, gate)
    return total


def _embed_gate_dense(n: int, op: GateOp, gate: np.ndarray) -> np.ndarray:
    if op.kind == "nn":
        # distance-2 pair: insert an identity between the two factors
        g = gate.reshape(2, 2, 2, 2)
        wide = np.einsum("acdf,be->abcdef", g, np.eye(2)).reshape(8, 8)
        start, span = op.sites[0], 3
    else:
        wide = gate
        start, span = op.sites[0], len(op.sites)
    left = np.eye(2**start)
    right = np.eye(2 ** (n - start - span))
    return np.kron(np.kron(left, wide), right)


def mpo_multiply(a: MPO, b: MPO, policy: TruncationPolicy) -> MPO:
    """Operator product a @ b as an MPO, compressed on the fly (zip-up)."""
    if a.n != b.n:
        raise ValueError("site counts differ")
    carry = np.ones((1, 1, 1), dtype=np.complex128)  # (new bond, a bond, b bond)
    tensors = []
    discarded = a.discarded_weight + b.discarded_weight
    for i in range(a.n):
        tmp = np.tensordot(carry, a.tensors[i], axes=(1, 0))  # (c, bB, s, t, cA)
        tmp = np.tensordot(tmp, b.tensors[i], axes=([1, 3], [0, 1]))
        # (c, s, cA, u, cB) -> (c, s, u, cA, cB)
        tmp = tmp.transpose(0, 1, 3, 2, 4)
        c, _, _, ca, cb = tmp.shape
        if i == a.n - 1:
            tensors.append(tmp.reshape(c, 2, 2, 1))
            break
        left, rest, d = _svd_split(
            tmp.reshape(c * 4, ca * cb), (c, 2, 2), (ca, cb), policy, True
        )
        tensors.append(left)
        carry = rest
        discarded += d
    return MPO(n=a.n, tensors=tensors, discarded_weight=discarded)


def _otoc_trace(vm: MPO, wm: MPO, n: int, policy, dense_trace_cap) -> tuple[float, float]:
    """(1/2^n) Re Tr(V W V W) plus any extra weight discarded while tracing."""
    if n <= dense_trace_cap:
        a = mpo_to_dense(vm, cap=dense_trace_cap)
        b = mpo_to_dense(wm, cap=dense_trace_cap)
        prod = a @ b
        tr = np.trace(prod @ prod)
        extra = 0.0
    else:
        prod = mpo_multiply(vm, wm, policy)
        tr = mpo_pair_trace(prod, prod)
        extra = prod.discarded_weight - vm.discarded_weight - wm.discarded_weight
    return float(tr.real) / 2**n, extra


def otoc_mpo(
    family: Family,
    x,
    n: int,
    v: str,
    v_site: int,
    w: str,
    w_site: int,
    sign: int,
    policy: TruncationPolicy,
    dt: float = 0.05,
    time_split: bool = True,
    dense_trace_cap: int = DENSE_TRACE_CAP_DEFAULT,
) -> OtocValue:
    """OTOC via TEBD: evolve the Pauli endpoints and contract the trace.

    With time splitting (the default) W is evolved by |x|/2 and V backwards
    by |x|/2, which leaves the trace unchanged but halves how long each
    operator accumulates truncation error.  Without it W carries the whole
    evolution and V stays static.
    """
    value, _ = _otoc_mpo_value(
        family, x, n, v, v_site, w, w_site, sign, policy, dt, time_split,
        dense_trace_cap,
    )
    return value


def _otoc_mpo_value(
    family, x, n, v, v_site, w, w_site, sign, policy, dt, time_split,
    dense_trace_cap,
):
    x = np.asarray(x, dtype=float)
    if time_split:
        half_plan = make_trotter_plan(family, 0.5 * x, n, dt)
        wm = tebd_evolve(pauli_mpo(w, w_site, n), half_plan, sign, policy)
        vm = tebd_evolve(pauli_mpo(v, v_site, n), half_plan, -sign, policy)
    else:
        plan = make_trotter_plan(family, x, n, dt)
        wm = tebd_evolve(pauli_mpo(w, w_site, n), plan, sign, policy)
        vm = pauli_mpo(v, v_site, n)
    f, extra = _otoc_trace(vm, wm, n, policy, dense_trace_cap)
    discarded = vm.discarded_weight + wm.discarded_weight + extra
    return OtocValue(f=f, c=1.0 - f), discarded


def target_mpo(
    target: Target,
    family: Family,
    x,
    n: int,
    policy: TruncationPolicy,
    dt: float = 0.05,
    time_split: bool = True,
    dense_trace_cap: int = DENSE_TRACE_CAP_DEFAULT,
) -> tuple[float, float]:
    """Evaluate a learned OTOC function with the MPO engine.

    Returns (value, accumulated discarded weight).  The nine-term sum shares
    its six evolved operators across the pairwise traces.
    """
    target = Target(target)
    x = np.asarray(x, dtype=float)
    if target is Target.XZ:
        value, discarded = _otoc_mpo_value(
            family, x, n, "X", n - 1, "Z", 0, 1, policy, dt, time_split,
            dense_trace_cap,
        )
        return value.f, discarded

    sign = -1
    letters = ("X", "Y", "Z")
    if time_split:
        half_plan = make_trotter_plan(family, 0.5 * x, n, dt)
        ws = {
            l: tebd_evolve(pauli_mpo(l, 0, n), half_plan, sign, policy)
            for l in letters
        }
        vs = {
            l: tebd_evolve(pauli_mpo(l, n - 1, n), half_plan, -sign, policy)
            for l in letters
        }
    else:
        plan = make_trotter_plan(family, x, n, dt)
        ws = {l: tebd_evolve(pauli_mpo(l, 0, n), plan, sign, policy) for l in letters}
        vs = {l: pauli_mpo(l, n - 1, n) for l in letters}
    total = 0.0
    discarded = sum(m.discarded_weight for m in ws.values())
    discarded += sum(m.discarded_weight for m in vs.values())
    for vl in letters:
        for wl in letters:
            f, extra = _otoc_trace(vs[vl], ws[wl], n, policy, dense_trace_cap)
            total += f
            discarded += extra
    return total, discarded


@dataclass(frozen=True)
class ChiSweepRow:
    chi: int
    value: float
    discarded_weight: float


def chi_sweep(
    family: Family,
    x,
    n: int,
    target: Target,
    chi_list,
    dt: float = 0.05,
    svd_cutoff: float = 1e-12,
    time_split: bool = True,
    dense_trace_cap: int = DENSE_TRACE_CAP_DEFAULT,
) -> list[ChiSweepRow]:
    """Recompute a target at each bond dimension for convergence plots."""
    chis = [int(c) for c in chi_list]
    if not chis:
        raise ValueError("chi_list must be non-empty")
    if any(b <= a for a, b in zip(chis, chis[1:])):
        raise ValueError("chi_list must be strictly ascending")
    rows = []
    for chi in chis:
        policy = TruncationPolicy(chi_max=chi, svd_cutoff=svd_cutoff)
        value, discarded = target_mpo(
            target, family, x, n, policy, dt=dt, time_split=time_split,
            dense_trace_cap=dense_trace_cap,
        )
        rows.append(ChiSweepRow(chi=chi, value=value, discarded_weight=discarded))
    return rows


def sweep_diffs(rows: list[ChiSweepRow]) -> list[float]:
    """Successive |value(chi_{i+1}) - value(chi_i)| convergence diagnostics."""
    return [abs(b.value - a.value) for a, b in zip(rows, rows[1:])]
