"""The six kernel functions and Gram-matrix assembly."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

KERNEL_KINDS = ("linear", "polynomial", "rbf", "laplacian", "sigmoid", "cosine")

# Hyperparameters each kind actually reads; the rest are canonicalised away.
_KERNEL_USES = {
    "linear": (),
    "polynomial": ("gamma", "c0", "degree"),
    "rbf": ("gamma",),
    "laplacian": ("gamma",),
    "sigmoid": ("gamma", "c0"),
    "cosine": (),
}


def kernel_uses(kind: str) -> tuple[str, ...]:
    """The hyperparameter names a kernel kind actually reads."""
    if kind not in _KERNEL_USES:
        raise ValueError(f"unknown kernel kind {kind!r}")
    return _KERNEL_USES[kind]


@dataclass(frozen=True)
class KernelSpec:
    """A kernel kind plus hyperparameters.

    Every spec carries all three hyperparameters so grid-iteration code stays
    uniform; fields a kind does not use are canonicalised to gamma=1, c0=0,
    degree=1 at construction, which also keeps serialised specs canonical.
    """

    kind: str
    gamma: float = 1.0
    c0: float = 0.0
    degree: int = 1

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.degree < 1:
            raise ValueError("degree must be a positive integer")
        uses = _KERNEL_USES[self.kind]
        if "gamma" not in uses:
            object.__setattr__(self, "gamma", 1.0)
        if "c0" not in uses:
            object.__setattr__(self, "c0", 0.0)
        if "degree" not in uses:
            object.__setattr__(self, "degree", 1)
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "c0", float(self.c0))
        object.__setattr__(self, "degree", int(self.degree))

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "gamma": self.gamma,
            "c0": self.c0,
            "degree": self.degree,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "KernelSpec":
        return cls(
            kind=d["kind"],
            gamma=d.get("gamma", 1.0),
            c0=d.get("c0", 0.0),
            degree=d.get("degree", 1),
        )


def _as_points(x) -> np.ndarray:
    arr = np.atleast_2d(np.asarray(x, dtype=float))
    if arr.ndim != 2:
        raise ValueError("inputs must be a vector or a matrix of row vectors")
    return arr


def kernel_matrix(spec: KernelSpec, x, y) -> np.ndarray:
    """Rectangular kernel matrix K[i, j] = kernel(x_i, y_j)."""
    xa, ya = _as_points(x), _as_points(y)
    kind = spec.kind
    if kind == "linear":
        return xa @ ya.T
    if kind == "polynomial":
        return (spec.gamma * (xa @ ya.T) + spec.c0) ** spec.degree
    if kind == "rbf":
        return np.exp(-spec.gamma * squared_distances(xa, ya))
    if kind == "laplacian":
        return np.exp(-spec.gamma * l1_distances(xa, ya))
    if kind == "sigmoid":
        return np.tanh(spec.gamma * (xa @ ya.T) + spec.c0)
    # cosine
    xn = np.linalg.norm(xa, axis=1)
    yn = np.linalg.norm(ya, axis=1)
    if np.any(xn == 0) or np.any(yn == 0):
        raise ValueError("the cosine kernel is undefined for zero vectors")
    return (xa @ ya.T) / np.outer(xn, yn)


def kernel_eval(spec: KernelSpec, x, y) -> float:
    """Kernel value for a single pair of points."""
    return float(kernel_matrix(spec, x, y)[0, 0])


def squared_distances(x, y) -> np.ndarray:
    """Pairwise squared Euclidean distances, clipped at zero."""
    xa, ya = _as_points(x), _as_points(y)
    sq = (
        np.sum(xa * xa, axis=1)[:, None]
        + np.sum(ya * ya, axis=1)[None, :]
        - 2.0 * (xa @ ya.T)
    )
    return np.maximum(sq, 0.0)


def l1_distances(x, y) -> np.ndarray:
    """Pairwise Manhattan distances."""
    xa, ya = _as_points(x), _as_points(y)
    return np.abs(xa[:, None, :] - ya[None, :, :]).sum(axis=2)


def gram_matrix(spec: KernelSpec, x) -> np.ndarray:
    """Symmetric Gram matrix over one point set.

    The upper triangle is mirrored onto the lower one so the result is
    symmetric by construction rather than by floating-point luck.
    """
    xa = _as_points(x)
    if xa.shape[0] == 0:
        raise ValueError("the point set must be non-empty")
    k = kernel_matrix(spec, xa, xa)
    upper = np.triu(k)
    return upper + upper.T - np.diag(np.diag(k))
