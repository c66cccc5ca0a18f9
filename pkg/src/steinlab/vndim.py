"""von Neumann dimension of right submodules of L^2(N)^k.

A ModuleSubspace is a span of vectors in a direct sum of k copies of
L^2(N), together with the right action of a coefficient algebra N_0
(one block operator per basis element, acting diagonally across the
copies) and the trace vectors Omega_b. The dimension is
sum_b <P Omega_b, Omega_b> for the orthogonal projection P onto the
span, valid once P commutes with the right action.

Right operators may be given either as dense (block_dim, block_dim)
matrices or as factor pairs (a, b) standing for kron(a, b); the factored
form keeps the large-coefficient-algebra path fast, since each factor
acts on one tensor leg.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._linalg import frob, gram_onb, onb_transform
from .derivations import Bimodule, CrossedContext, DerivationSpace
from .errors import NotGenerating, NotRightClosed


@dataclass(eq=False)
class ModuleSubspace:
    block_gram: np.ndarray  # GNS Gram of a single copy of L^2(N)
    ncoords: int
    span: np.ndarray  # (ncoords * block_dim, r), raw coordinates
    right_ops: list  # block operators, dense or (a, b) kron factors
    trace_vectors: np.ndarray  # (ncoords * block_dim, t)
    label: str = ""
    gram_factors: tuple | None = None  # (wa, wb) with block_gram = kron(wa, wb)
    star_closed: bool = False  # right_ops closed under adjoints (as a span)

    @property
    def block_dim(self) -> int:
        return self.block_gram.shape[0]


@dataclass
class DimensionResult:
    value: float
    rank: int
    closure_residual: float

    def __float__(self) -> float:
        return self.value


def _blockwise(op, vecs: np.ndarray, ncoords: int) -> np.ndarray:
    """Apply a block operator (dense or kron-factored) to stacked vectors."""
    r = vecs.shape[1]
    if isinstance(op, tuple):
        a, b = op
        da, db = a.shape[0], b.shape[0]
        t = vecs.reshape(ncoords, da, db * r)
        t = np.matmul(a, t)
        t = t.reshape(ncoords * da, db, r)
        t = np.matmul(b, t)
        return t.reshape(ncoords * da * db, r)
    bd = op.shape[0]
    blocks = vecs.reshape(ncoords, bd, r)
    return np.matmul(op, blocks).reshape(ncoords * bd, r)


def vn_dimension(sub: ModuleSubspace, tol: float = 1e-8) -> DimensionResult:
    """Trace of the span projection against the trace vectors.

    Raises NotRightClosed unless the projection commutes with every right
    operator, checked through range invariance. When star_closed is set the
    adjoint of each operator already lies in the span of the list (right
    multiplication satisfies R(m)* = R(m*)), so only one side is tested;
    otherwise both the operator and its adjoint are.
    """
    if sub.gram_factors is not None:
        wa, wb = sub.gram_factors
        ta, tai = onb_transform(wa)
        tb, tbi = onb_transform(wb)
        fwd = (ta, tb)
        dense = [None, None]

        def to_on(op):
            if isinstance(op, tuple):
                return (ta @ op[0] @ tai, tb @ op[1] @ tbi)
            if dense[0] is None:
                dense[0] = np.kron(ta, tb)
                dense[1] = np.kron(tai, tbi)
            return dense[0] @ op @ dense[1]

    else:
        t, tinv = onb_transform(sub.block_gram)
        fwd = t

        def to_on(op):
            if isinstance(op, tuple):
                op = np.kron(op[0], op[1])
            return t @ op @ tinv

    span_on = _blockwise(fwd, sub.span, sub.ncoords)
    q, _ = gram_onb(span_on)
    rank = q.shape[1]
    qc = q.conj()

    worst = 0.0
    for op in sub.right_ops:
        op_on = to_on(op)
        if sub.star_closed:
            sides = (op_on,)
        elif isinstance(op_on, tuple):
            sides = (op_on, (op_on[0].conj().T, op_on[1].conj().T))
        else:
            sides = (op_on, op_on.conj().T)
        for mat in sides:
            img = _blockwise(mat, q, sub.ncoords)
            rem = img - q @ (qc.T @ img)
            worst = max(worst, frob(rem) / max(1.0, frob(img)))
    if worst > tol:
        raise NotRightClosed(f"commutant residual {worst:.3e} above {tol}")

    omega_on = _blockwise(fwd, sub.trace_vectors, sub.ncoords)
    overlaps = q.conj().T @ omega_on
    value = float(np.sum(np.abs(overlaps) ** 2))
    return DimensionResult(value, rank, worst)


def as_fraction(x: float, max_den: int, tol: float = 1e-6) -> Fraction | None:
    """Nearest p/q with q <= max_den if within tol, for report cosmetics."""
    frac = Fraction(x).limit_denominator(max_den)
    if abs(float(frac) - x) <= tol:
        return frac
    return None


# -- builders -----------------------------------------------------------------

def _right_ops_full(alg) -> list:
    """Right multiplication by every basis element b_a (x) b_b^op of N,
    as kron factor pairs."""
    rs = [alg.right_mult(alg.basis(a)) for a in range(alg.dim)]
    ls = [alg.left_mult(alg.basis(b)) for b in range(alg.dim)]
    return [(ra, lb) for ra in rs for lb in ls]


def _right_ops_gens(alg, gens: np.ndarray) -> list:
    """Right multiplication by x (x) 1 and 1 (x) x^op over a *-closed
    generating set of A; enough to pin the commutant. Duplicates (a set
    already containing its stars) are skipped."""
    eye = np.eye(alg.dim, dtype=complex)
    seen = set()
    ops = []
    for j in range(gens.shape[1]):
        for x in (gens[:, j], alg.star_of(gens[:, j])):
            key = (np.round(x, 12) + 0.0).tobytes()
            if key in seen:
                continue
            seen.add(key)
            ops.append((alg.right_mult(x), eye))
            ops.append((eye, alg.left_mult(x)))
    return ops


def _block_traces(bim: Bimodule, k: int) -> np.ndarray:
    omegas = np.zeros((k * bim.dim, k), dtype=complex)
    for c in range(k):
        omegas[c * bim.dim : (c + 1) * bim.dim, c] = bim.unit
    return omegas


def phi_x(space: DerivationSpace, gens: np.ndarray | None = None) -> ModuleSubspace:
    """Image of a derivation space under d -> (d(x))_{x in X}.

    X must generate the algebra, so that the map is injective and the
    dimension does not depend on the choice.
    """
    from .constructions import generates

    bim = space.bim
    alg = bim.algebra
    gens = space.gens if gens is None else np.asarray(gens, dtype=complex)
    if not generates(alg, list(gens.T)):
        raise NotGenerating("argument set does not generate the algebra")
    # block per argument x, derivations along columns
    span = np.vstack(
        [np.einsum("rpj,j->pr", space.basis, x) for x in gens.T]
    )
    if alg.dim <= 10:
        ops = _right_ops_full(alg)
    else:
        ops = _right_ops_gens(alg, gens)
    return ModuleSubspace(
        block_gram=bim.gram,
        ncoords=gens.shape[1],
        span=span,
        right_ops=ops,
        trace_vectors=_block_traces(bim, gens.shape[1]),
        label=f"phi_X({alg.label})",
        gram_factors=(alg.gram, alg.gram),
        star_closed=True,
    )


def twisted_module(
    space: DerivationSpace, twist: np.ndarray, gens: np.ndarray | None = None
) -> ModuleSubspace:
    """Same span as phi_x but with the right action twisted by an
    automorphism matrix on N coordinates (right op R(theta(m)))."""
    sub = phi_x(space, gens)
    bim = space.bim
    if bim.algebra.dim > 10:
        raise NotImplementedError("twisted modules only for small algebras")
    ops = [bim.right_elem(twist[:, m]) for m in range(bim.dim)]
    return ModuleSubspace(sub.block_gram, sub.ncoords, sub.span, ops,
                          sub.trace_vectors, label=sub.label + " twisted",
                          gram_factors=sub.gram_factors, star_closed=True)


def inner_derivation_module(alg, gens: np.ndarray) -> ModuleSubspace:
    """phi_X of the span of commutator derivations, built directly from
    kron-structured operators. Scales to algebras where the dense Leibniz
    solve does not."""
    from .constructions import generates

    bim = Bimodule(alg)
    gens = np.asarray(gens, dtype=complex)
    if not generates(alg, list(gens.T)):
        raise NotGenerating("argument set does not generate the algebra")
    k = gens.shape[1]
    blocks = []
    for j in range(k):
        x = gens[:, j]
        blocks.append(bim.act_left(x) - bim.act_right(x))
    span = np.vstack(blocks)  # columns = phi_X([., xi_m]) for basis xi_m
    return ModuleSubspace(bim.gram, k, span, _right_ops_gens(alg, gens),
                          _block_traces(bim, k), label=f"inner({alg.label})",
                          gram_factors=(alg.gram, alg.gram), star_closed=True)


def restrict_scalars(sub: ModuleSubspace, ctx: CrossedContext) -> ModuleSubspace:
    """View a module over N_big = (A x| G) (x) (A x| G)^op as a module over
    N_0 = A (x) A^op; same span, right action through the inclusion, and
    one trace vector u_g (x) u_h^op per original coordinate and sector."""
    cp = ctx.cp
    big = ctx.big
    if sub.block_dim != big.dim:
        raise ValueError("module is not over the crossed-product bimodule")
    base = cp.base
    calg = cp.algebra
    if base.dim * base.dim <= 100:
        pairs = [
            (base.basis(a), base.basis(b))
            for a in range(base.dim)
            for b in range(base.dim)
        ]
    else:
        eye = np.eye(base.dim, dtype=complex)
        pairs = []
        for j in range(base.dim):
            for x in (eye[:, j], base.star_of(eye[:, j])):
                pairs.append((x, base.unit))
                pairs.append((base.unit, x))
    ops = [
        (calg.right_mult(cp.lift(x)), calg.left_mult(cp.lift(y)))
        for x, y in pairs
    ]
    k = ctx.group.order
    traces = []
    for c in range(sub.ncoords):
        for g in range(k):
            for h in range(k):
                col = np.zeros(sub.ncoords * big.dim, dtype=complex)
                col[c * big.dim : (c + 1) * big.dim] = big.embed(cp.u(g), cp.u(h))
                traces.append(col)
    return ModuleSubspace(
        sub.block_gram,
        sub.ncoords,
        sub.span,
        ops,
        np.column_stack(traces),
        label=sub.label + " over base",
        gram_factors=sub.gram_factors,
        star_closed=True,
    )


@dataclass
class IndependenceReport:
    dim_a: float
    dim_b: float

    @property
    def delta(self) -> float:
        return abs(self.dim_a - self.dim_b)


def generating_set_independence_check(
    space: DerivationSpace, gens_a: np.ndarray, gens_b: np.ndarray, tol: float = 1e-8
) -> IndependenceReport:
    """Dimension of the same derivation space against two generating sets."""
    da = vn_dimension(phi_x(space, gens_a), tol)
    db = vn_dimension(phi_x(space, gens_b), tol)
    return IndependenceReport(da.value, db.value)
