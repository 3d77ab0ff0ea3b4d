"""Arithmetic in the twisted convolution algebra and operator-norm bounds.

Elements are finitely supported A-valued functions on G over a fixed twisted
system.  The product and involution are forced by the generator relations
u_g a = action(g)(a) u_g and u_g u_h = cocycle(g, h) u_{gh}:

    (f1 * f2)(k) = sum_g f1(g) . action(g)(f2(g^{-1}k)) . cocycle(g, g^{-1}k)
    f*(h)        = action(h)( cocycle(h^{-1}, h)* . f(h^{-1})* )

Operator norms are bounded from below by compressing the regular
representation to a ball and from above by the l1 norm.  The compression
works in the A^G picture, where the operator attached to f has the A-valued
matrix entry action(h')^{-1}( f(h'h^{-1}) cocycle(h'h^{-1}, h) ) at (h', h);
realizing each entry in the defining representation of A gives a complex
matrix whose largest singular value is the compressed norm.  On finite
groups the full-radius compression is the exact reduced norm.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from .algebra import AlgElement
from .groups import LengthFunction, ball, default_length, word_length
from .system import TwistedSystem

SUPPORT_TOL = 1e-14

# Dense SVD below this dimension, Lanczos (deterministic fixed start) above.
_DENSE_SVD_LIMIT = 600


class CcElement:
    """Finitely supported function G -> A over a twisted system.

    Stored values always have norm >= 1e-14, so the support is canonical.
    Instances are immutable; arithmetic returns new elements.
    """

    def __init__(self, system: TwistedSystem, coeffs: Mapping):
        self.system = system
        pruned = {}
        for g, a in coeffs.items():
            if a.algebra != system.algebra:
                raise ValueError("coefficient algebra does not match the system")
            if a.norm() >= SUPPORT_TOL:
                pruned[system.group.check(g)] = a
        self._coeffs = pruned

    # -- basic structure ------------------------------------------------------

    def support(self) -> list:
        return sorted(self._coeffs, key=self.system.group.sort_key)

    def items(self):
        return [(g, self._coeffs[g]) for g in self.support()]

    def coeff(self, g) -> AlgElement:
        """The coefficient at g; also the Fourier coefficient of the element.

        The expectation onto A is the g = e case.
        """
        return self._coeffs.get(g, self.system.algebra.zero())

    def expectation(self) -> AlgElement:
        return self.coeff(self.system.group.identity())

    def __len__(self):
        return len(self._coeffs)

    def __repr__(self):
        terms = ", ".join(f"{self.system.group.word(g)}" for g in self.support())
        return f"CcElement(supp=[{terms}])"

    # -- linear structure -------------------------------------------------------

    def _same_system(self, other: "CcElement"):
        if self.system is not other.system:
            raise ValueError("elements live over different systems")

    def __add__(self, other: "CcElement") -> "CcElement":
        self._same_system(other)
        out = dict(self._coeffs)
        for g, a in other._coeffs.items():
            out[g] = out[g] + a if g in out else a
        return CcElement(self.system, out)

    def __sub__(self, other: "CcElement") -> "CcElement":
        return self + (-1.0) * other

    def __rmul__(self, scalar) -> "CcElement":
        return CcElement(self.system, {g: scalar * a for g, a in self._coeffs.items()})

    # -- twisted product and involution ------------------------------------------

    def __mul__(self, other):
        if not isinstance(other, CcElement):
            return NotImplemented
        self._same_system(other)
        sys_, grp = self.system, self.system.group
        out: dict = {}
        for g, a in self._coeffs.items():
            act_g = sys_.action(g)
            for h, b in other._coeffs.items():
                k = grp.mul(g, h)
                term = a * act_g(b) * sys_.cocycle(g, h)
                out[k] = out[k] + term if k in out else term
        return CcElement(sys_, out)

    def star(self) -> "CcElement":
        sys_, grp = self.system, self.system.group
        out = {}
        for g, a in self._coeffs.items():
            ginv = grp.inv(g)
            out[ginv] = sys_.act(ginv, sys_.cocycle(g, ginv).star() * a.star())
        return CcElement(sys_, out)

    # -- norms ---------------------------------------------------------------------

    def norm_l1(self) -> float:
        return sum(a.norm() for a in self._coeffs.values())

    def norm_linf(self) -> float:
        return max((a.norm() for a in self._coeffs.values()), default=0.0)

    def gram(self) -> AlgElement:
        """sum_g action(g)^{-1}(f(g)* f(g)), the module inner product <f, f>."""
        total = self.system.algebra.zero()
        for g, a in self._coeffs.items():
            total = total + self.system.act_inv(g, a.star() * a)
        return total

    def module_norm(self) -> float:
        """|| sum_g action(g)^{-1}(f(g)* f(g)) ||^{1/2}."""
        return float(np.sqrt(self.gram().norm()))

    def _weighted(self, weight) -> "CcElement":
        out = {}
        for g, a in self._coeffs.items():
            w = float(weight(g))
            if w < 1.0 - 1e-12:
                raise ValueError(f"weight below 1 at support point {self.system.group.word(g)}")
            out[g] = w * a
        return CcElement(self.system, out)

    def weighted_l2_norm(self, weight) -> float:
        return float(np.sqrt(sum((float(weight(g)) ** 2) * a.norm() ** 2 for g, a in self._weighted_items(weight))))

    def _weighted_items(self, weight):
        for g, a in self._coeffs.items():
            if float(weight(g)) < 1.0 - 1e-12:
                raise ValueError(f"weight below 1 at support point {self.system.group.word(g)}")
            yield g, a

    def weighted_module_norm(self, weight) -> float:
        return self._weighted(weight).module_norm()

    def norm(self, which: str = "l1", weight=None) -> float:
        """Dispatcher: which in {l1, linf, module, weighted-l2, weighted-module}."""
        if which == "l1":
            return self.norm_l1()
        if which == "linf":
            return self.norm_linf()
        if which == "module":
            return self.module_norm()
        if which == "weighted-l2":
            return self.weighted_l2_norm(weight)
        if which == "weighted-module":
            return self.weighted_module_norm(weight)
        raise ValueError(f"unknown norm tag {which!r}")


def delta(system: TwistedSystem, g=None, a: AlgElement | None = None) -> CcElement:
    """a at the single point g (defaults: the unit at the identity)."""
    if g is None:
        g = system.group.identity()
    if a is None:
        a = system.algebra.unit()
    return CcElement(system, {g: a})


def cc_unit(system: TwistedSystem) -> CcElement:
    return delta(system)


def cc_zero(system: TwistedSystem) -> CcElement:
    return CcElement(system, {})


def random_cc(system: TwistedSystem, support: Iterable, rng, scale: float = 1.0) -> CcElement:
    return CcElement(system, {g: system.algebra.random_element(rng, scale) for g in support})


# -- compressed regular representation ---------------------------------------------


def largest_singular_value(matrix: np.ndarray) -> float:
    """Largest singular value; deterministic (fixed Lanczos start above the dense cutoff)."""
    n = matrix.shape[0]
    if n == 0:
        return 0.0
    if n <= _DENSE_SVD_LIMIT:
        return float(np.linalg.svd(matrix, compute_uv=False)[0])
    sparse = scipy.sparse.csr_matrix(matrix)
    v0 = np.ones(n) / np.sqrt(n)
    vals = scipy.sparse.linalg.svds(sparse, k=1, v0=v0, return_singular_vectors=False, maxiter=5000)
    return float(vals[0])


@dataclass(frozen=True)
class CompressedRep:
    """P_R Lambda(f) P_R realized as a complex matrix over ball(R) x rep(A)."""

    system: TwistedSystem
    radius: float
    length: LengthFunction
    index: tuple
    matrix: np.ndarray

    def largest_singular_value(self) -> float:
        return largest_singular_value(self.matrix)

    def top_singular_vector(self) -> np.ndarray:
        """Right singular vector of the top singular value (for witness extraction)."""
        if self.matrix.shape[0] <= _DENSE_SVD_LIMIT:
            _, _, vh = np.linalg.svd(self.matrix)
            return vh[0].conj()
        sparse = scipy.sparse.csr_matrix(self.matrix)
        n = self.matrix.shape[0]
        v0 = np.ones(n) / np.sqrt(n)
        _, _, vh = scipy.sparse.linalg.svds(sparse, k=1, v0=v0)
        return vh[0].conj()


def compression_matrix(f: CcElement, R: float, length: LengthFunction | None = None) -> CompressedRep:
    """Compression of the regular representation of f to the ball of radius R.

    Index order is the deterministic ball order, so matrices are reproducible
    bit for bit.  The A-valued entry at (h', h) is
    action(h')^{-1}( f(h'h^{-1}) cocycle(h'h^{-1}, h) ) for h'h^{-1} in supp(f).
    """
    system = f.system
    if length is None:
        length = default_length(system.group)
    idx = ball(R, length)
    if not idx:
        raise ValueError("empty ball")
    pos = {g: i for i, g in enumerate(idx)}
    D = system.algebra.rep_dim
    n = len(idx)
    M = np.zeros((n * D, n * D), dtype=complex)
    grp = system.group
    for c, h in enumerate(idx):
        for g, a in f.items():
            hp = grp.mul(g, h)
            r = pos.get(hp)
            if r is None:
                continue
            entry = system.act_inv(hp, a * system.cocycle(g, h))
            M[r * D : (r + 1) * D, c * D : (c + 1) * D] += entry.dense()
    return CompressedRep(system, R, length, tuple(idx), M)


def full_radius(system: TwistedSystem) -> float:
    """Radius covering a whole finite group under its word length."""
    L = word_length(system.group)
    return max(L(g) for g in system.group.elements())


@dataclass(frozen=True)
class OpnormBounds:
    lower: float
    upper: float
    trace: tuple  # ((R, largest singular value), ...)

    def as_dict(self) -> dict:
        return {"lower": self.lower, "upper": self.upper,
                "trace": [{"radius": r, "lower": s} for r, s in self.trace]}


def opnorm_bounds(
    f: CcElement,
    R_schedule: Iterable[float] | None = None,
    length: LengthFunction | None = None,
) -> OpnormBounds:
    """Certified operator-norm bounds for the regular representation of f.

    lower: largest singular value of the compression, maximized over the
    schedule (nondecreasing in R; exact on finite groups at full radius).
    upper: the l1 norm.
    """
    system = f.system
    if length is None:
        length = default_length(system.group)
    if R_schedule is None:
        R_schedule = [full_radius(system)] if system.group.is_finite else [4, 8, 16, 32]
    R_schedule = list(R_schedule)
    if not R_schedule:
        raise ValueError("empty radius schedule")
    trace = []
    for R in R_schedule:
        trace.append((float(R), compression_matrix(f, R, length).largest_singular_value()))
    lower = max(s for _, s in trace)
    return OpnormBounds(lower, f.norm_l1(), tuple(trace))


def exact_norm_finite(f: CcElement) -> float:
    """Exact reduced norm on a finite group via the full regular representation."""
    if not f.system.group.is_finite:
        raise ValueError("exact norms are only available on finite groups")
    return compression_matrix(f, full_radius(f.system), word_length(f.system.group)).largest_singular_value()
