"""Declarative verification runner.

An ExperimentSpec names an algebra, a finite group, and an action. run()
executes a registry of checks against that triple in dependency order
(validation, constructions, derivation spaces, dimensions, identities)
and returns a VerificationReport with one row per check: pass/fail status,
the two compared values, the residual, and a plain statement of the
identity being tested. Rows whose hypotheses do not apply (non-abelian
group for character checks, no designated subgroup, no matrix units) are
reported as skipped, never as pass.

Reports are deterministic for a fixed seed; the JSON form omits wall-clock
timings so repeated runs are byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field

import numpy as np

from ._linalg import frob
from .algebra import FDAlgebra, validate
from .constructions import (
    GroupAction,
    ad_action,
    crossed_product,
    dual_action,
    group_algebra,
    group_central_family,
    matrix_units,
    multimatrix,
    multimatrix_decompose,
    multimatrix_generators,
    permutation_action,
    scaled_generating_set,
    scaling_residual,
    span_equal,
    subalgebra_generate,
    trivial_action,
    validate_action,
)
from .derivations import (
    Bimodule,
    CrossedContext,
    Derivation,
    average_scaling,
    central_projection_element,
    central_vectors,
    commutator_derivation,
    covariance_defect,
    decompose_vanishing,
    derivation_space,
    extend_vanishing,
    relative_derivations,
    restrict_component,
    scaling_conjugation,
)
from .errors import ActionInvalid, SpecInvalid, SteinlabError
from .groups import (
    FiniteGroup,
    Character,
    characters,
    cyclic,
    dihedral_4,
    direct_product,
    subgroup,
    symmetric_3,
)
from .vndim import (
    ModuleSubspace,
    as_fraction,
    generating_set_independence_check,
    phi_x,
    restrict_scalars,
    vn_dimension,
)

# -- JSON parsing ---------------------------------------------------------------

def _complex_array(obj, where: str) -> np.ndarray:
    """Nested lists whose innermost entries are [re, im] pairs."""
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise SpecInvalid(f"{where}: not a numeric array ({exc})") from None
    if arr.ndim == 0 or arr.shape[-1] != 2:
        raise SpecInvalid(f"{where}: complex entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def parse_group(obj) -> FiniteGroup:
    """A group name ("Z/4", "Z/2xZ/2", "V4", "S3", "D4") or an explicit
    {"order": k, "table": [[...]], "label": ...} dictionary."""
    if isinstance(obj, str):
        name = obj.strip()
        if name in ("S3", "S_3"):
            return symmetric_3()
        if name in ("D4", "D_4"):
            return dihedral_4()
        if name == "V4":
            name = "Z/2xZ/2"
        parts = name.split("x")
        built = None
        for part in parts:
            part = part.strip()
            if not part.startswith("Z/"):
                raise SpecInvalid(f"unknown group name {obj!r}")
            try:
                n = int(part[2:])
            except ValueError:
                raise SpecInvalid(f"unknown group name {obj!r}") from None
            factor = cyclic(n)
            built = factor if built is None else direct_product(built, factor)
        if built is None:
            raise SpecInvalid(f"unknown group name {obj!r}")
        return built
    if isinstance(obj, dict):
        try:
            order = int(obj["order"])
            table = np.asarray(obj["table"], dtype=int)
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecInvalid(f"group: {exc}") from None
        return FiniteGroup(order, table, str(obj.get("label", "")))
    raise SpecInvalid("group must be a name or an order/table dictionary")


def parse_algebra(obj) -> tuple[FDAlgebra, list[tuple[int, float]] | None]:
    """Returns the algebra plus its block data when given in multi-matrix
    shorthand (needed for checks that want explicit matrix units)."""
    if not isinstance(obj, dict):
        raise SpecInvalid("algebra must be a dictionary")
    if "multimatrix" in obj:
        body = obj["multimatrix"]
        try:
            blocks = [(int(n), float(a)) for n, a in body["blocks"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecInvalid(f"algebra.multimatrix: {exc}") from None
        label = str(obj.get("label", "")) or "+".join(
            f"M{n}({a:g})" for n, a in blocks
        )
        return multimatrix(blocks, label=label), blocks
    if "group_algebra" in obj:
        grp = parse_group(obj["group_algebra"])
        return group_algebra(grp), None
    for key in ("dim", "mult", "star", "unit", "trace"):
        if key not in obj:
            raise SpecInvalid(f"algebra: missing field {key!r}")
    try:
        alg = FDAlgebra(
            dim=int(obj["dim"]),
            mult=_complex_array(obj["mult"], "algebra.mult"),
            star=_complex_array(obj["star"], "algebra.star"),
            unit=_complex_array(obj["unit"], "algebra.unit"),
            trace=_complex_array(obj["trace"], "algebra.trace"),
            label=str(obj.get("label", "")),
        )
    except SteinlabError as exc:
        raise SpecInvalid(f"algebra: {exc}") from None
    return alg, None


def parse_action(obj, grp: FiniteGroup, alg: FDAlgebra) -> GroupAction:
    """Named generators ("trivial", permutation, ad, dual) or raw matrices."""
    try:
        if obj == "trivial" or obj is None:
            return trivial_action(grp, alg)
        if isinstance(obj, dict) and "matrices" in obj:
            mats = _complex_array(obj["matrices"], "action.matrices")
            return GroupAction(grp, alg, mats)
        if isinstance(obj, dict) and obj.get("name") == "permutation":
            return permutation_action(grp, alg, np.asarray(obj["perms"], dtype=int))
        if isinstance(obj, dict) and obj.get("name") == "ad":
            us = _complex_array(obj["unitaries"], "action.unitaries")
            return ad_action(grp, alg, us)
        if isinstance(obj, dict) and obj.get("name") == "dual":
            if alg.dim != grp.order:
                raise SpecInvalid(
                    "dual action needs the group algebra of the acting group"
                )
            return GroupAction(grp, alg, dual_action(grp.order).matrices)
    except SteinlabError as exc:
        if isinstance(exc, SpecInvalid):
            raise
        raise SpecInvalid(f"action: {exc}") from None
    raise SpecInvalid(f"unrecognized action {obj!r}")


@dataclass
class ExperimentSpec:
    """One verification experiment: an algebra, a group acting on it, the
    checks to run, and reproducibility knobs."""

    label: str
    algebra: FDAlgebra
    group: FiniteGroup
    action: GroupAction
    blocks: list[tuple[int, float]] | None = None
    checks: list[str] | None = None  # None = whole registry
    tolerance: float = 1e-8
    seed: int = 0
    subgroup: list[int] | None = None
    alt_generators: np.ndarray | None = None

    @classmethod
    def from_json(cls, obj: dict) -> "ExperimentSpec":
        if not isinstance(obj, dict):
            raise SpecInvalid("experiment spec must be a JSON object")
        alg, blocks = parse_algebra(obj.get("algebra", {}))
        grp = parse_group(obj.get("group", "Z/2"))
        act = parse_action(obj.get("action", "trivial"), grp, alg)
        checks = obj.get("checks")
        if checks is not None:
            unknown = [c for c in checks if c not in CHECKS]
            if unknown:
                raise SpecInvalid(f"unknown checks: {unknown}")
        sub = obj.get("subgroup")
        if sub is not None:
            sub = [int(s) for s in sub]
        alt = obj.get("alt_generators")
        if alt is not None:
            alt = np.column_stack(
                [_complex_array(v, "alt_generators") for v in alt]
            )
        return cls(
            label=str(obj.get("label", alg.label or "experiment")),
            algebra=alg,
            group=grp,
            action=act,
            blocks=blocks,
            checks=checks,
            tolerance=float(obj.get("tolerance", 1e-8)),
            seed=int(obj.get("seed", 0)),
            subgroup=sub,
            alt_generators=alt,
        )


@dataclass
class CheckRow:
    name: str
    status: str  # "pass" | "fail" | "skipped"
    statement: str
    lhs: float | None = None
    rhs: float | None = None
    residual: float | None = None
    lhs_fraction: str | None = None
    rhs_fraction: str | None = None
    note: str = ""
    elapsed: float = 0.0


@dataclass
class VerificationReport:
    label: str
    seed: int
    tolerance: float
    rows: list[CheckRow] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.status != "fail" for r in self.rows)

    def row(self, name: str) -> CheckRow:
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)


# -- run context with memoized pipeline stages ---------------------------------

class RunContext:
    """Caches the expensive pipeline stages shared between checks."""

    def __init__(self, spec: ExperimentSpec):
        self.spec = spec
        self.alg = spec.algebra
        self.grp = spec.group
        self.act = spec.action
        self.tol = spec.tolerance
        self.rng = np.random.default_rng(spec.seed)
        self._memo: dict[str, object] = {}

    def _get(self, key: str, fn):
        if key not in self._memo:
            self._memo[key] = fn()
        return self._memo[key]

    @property
    def cp(self):
        return self._get("cp", lambda: crossed_product(self.alg, self.act))

    @property
    def ctx(self) -> CrossedContext:
        return self._get("ctx", lambda: CrossedContext(self.cp))

    @property
    def space_a(self):
        return self._get("space_a", lambda: derivation_space(self.alg))

    @property
    def dim_a(self) -> float:
        return self._get(
            "dim_a", lambda: vn_dimension(phi_x(self.space_a), self.tol).value
        )

    @property
    def space_m(self):
        return self._get(
            "space_m",
            lambda: derivation_space(self.cp.algebra, bim=self.ctx.big),
        )

    @property
    def dim_m(self) -> float:
        return self._get(
            "dim_m", lambda: vn_dimension(phi_x(self.space_m), self.tol).value
        )

    @property
    def vanishing(self):
        return self._get(
            "vanishing",
            lambda: relative_derivations(
                self.space_m, self.cp.embed_group, check_subalgebra=False
            ),
        )

    @property
    def dim_van_big(self) -> float:
        return self._get(
            "dim_van_big",
            lambda: vn_dimension(phi_x(self.vanishing), self.tol).value,
        )

    @property
    def dim_van_base(self) -> float:
        return self._get(
            "dim_van_base",
            lambda: vn_dimension(
                restrict_scalars(phi_x(self.vanishing), self.ctx), self.tol
            ).value,
        )

    @property
    def blocks_a(self) -> list[tuple[int, float]]:
        if self.spec.blocks is not None:
            return self.spec.blocks
        return self._get(
            "blocks_a", lambda: multimatrix_decompose(self.alg, self.rng)
        )

    @property
    def blocks_m(self) -> list[tuple[int, float]]:
        return self._get(
            "blocks_m", lambda: multimatrix_decompose(self.cp.algebra, self.rng)
        )

    @property
    def chars(self) -> list[Character]:
        return self._get("chars", lambda: characters(self.grp, self.rng))

    def action_is_trivial(self) -> bool:
        eye = np.eye(self.alg.dim)
        return all(
            frob(self.act.matrices[g] - eye) <= 1e-12
            for g in range(self.grp.order)
        )


def _block_formula(blocks) -> float:
    return 1.0 - sum(a * a / (n * n) for n, a in blocks)


def _greedy_generators(alg: FDAlgebra) -> np.ndarray:
    """A small deterministic generating set: walk the basis, keeping the
    elements that enlarge the generated subalgebra."""
    chosen: list[np.ndarray] = []
    rank = subalgebra_generate(alg, []).shape[1]
    for i in range(alg.dim):
        if rank == alg.dim:
            break
        grown = subalgebra_generate(alg, chosen + [alg.basis(i)])
        if grown.shape[1] > rank:
            chosen.append(alg.basis(i))
            rank = grown.shape[1]
    if not chosen:
        # Nothing enlarges the unital closure, so any scalar works; use a
        # rescaled unit so the set differs from the plain basis.
        return 0.5 * alg.unit.reshape(-1, 1)
    return np.column_stack(chosen)


# -- the checks -----------------------------------------------------------------

def _chk_algebra_valid(rc: RunContext):
    rep = validate(rc.alg, rc.tol)
    axiom, worst = rep.worst()
    status = "pass" if rep.passed else "fail"
    note = "" if rep.passed else f"worst axiom: {axiom}"
    return status, worst, 0.0, worst, note


def _chk_action_valid(rc: RunContext):
    try:
        res = validate_action(rc.act, float("inf"))
    except ActionInvalid as exc:
        return "fail", None, None, float("nan"), str(exc)
    worst = max(res.values())
    status = "pass" if worst <= rc.tol else "fail"
    return status, worst, 0.0, worst, ""


def _chk_group_algebra_dim(rc: RunContext):
    if rc.alg.dim != 1 or not rc.action_is_trivial():
        return "skipped", None, None, None, "needs A = C with the trivial action"
    k = rc.grp.order
    lhs, rhs = rc.dim_m, 1.0 - 1.0 / k
    return _cmp(lhs, rhs, rc.tol)


def _chk_multimatrix_formula(rc: RunContext):
    lhs = rc.dim_a
    rhs = _block_formula(rc.blocks_a)
    return _cmp(lhs, rhs, rc.tol)


def _chk_crossed_multimatrix(rc: RunContext):
    blocks = rc.blocks_m
    wsum = abs(sum(a for _, a in blocks) - 1.0)
    dsum = abs(sum(n * n for n, _ in blocks) - rc.cp.algebra.dim)
    lhs = rc.dim_m
    rhs = _block_formula(blocks)
    residual = max(wsum, dsum, abs(lhs - rhs))
    status = "pass" if residual <= rc.tol else "fail"
    shown = [(n, float(round(a, 9))) for n, a in blocks]
    return status, lhs, rhs, residual, f"blocks {shown}"


def _chk_schreier_crossed(rc: RunContext):
    k = rc.grp.order
    lhs = rc.dim_m
    rhs = 1.0 + (rc.dim_a - 1.0) / k
    return _cmp(lhs, rhs, rc.tol)


def _chk_schreier_vanishing(rc: RunContext):
    k = rc.grp.order
    lhs = rc.dim_van_base
    rhs = k * rc.dim_a
    return _cmp(lhs, rhs, rc.tol)


def _chk_index_scaling_full(rc: RunContext):
    ctx = rc.ctx
    big = ctx.big
    calg = rc.cp.algebra
    full = ModuleSubspace(
        block_gram=big.gram,
        ncoords=1,
        span=np.eye(big.dim, dtype=complex),
        right_ops=[],
        trace_vectors=big.unit.reshape(-1, 1),
        label="full ambient",
        gram_factors=(calg.gram, calg.gram),
        star_closed=True,
    )
    one = vn_dimension(full, rc.tol).value
    lhs = vn_dimension(restrict_scalars(full, ctx), rc.tol).value
    k = rc.grp.order
    rhs = float(k * k)
    residual = max(abs(one - 1.0), abs(lhs - rhs))
    status = "pass" if residual <= rc.tol else "fail"
    return status, lhs, rhs, residual, ""


def _chk_index_scaling_vanishing(rc: RunContext):
    k = rc.grp.order
    lhs = rc.dim_van_base
    rhs = k * k * rc.dim_van_big
    return _cmp(lhs, rhs, rc.tol)


def _chk_subgroup_schreier(rc: RunContext):
    if rc.spec.subgroup is None:
        return "skipped", None, None, None, "no subgroup designated"
    sub, embedding = subgroup(rc.grp, rc.spec.subgroup)
    act_h = GroupAction(
        sub, rc.alg, rc.act.matrices[np.asarray(embedding, dtype=int)]
    )
    cp_h = crossed_product(rc.alg, act_h)
    dim_h = vn_dimension(
        phi_x(derivation_space(cp_h.algebra)), rc.tol
    ).value
    index = rc.grp.order // sub.order
    lhs = rc.dim_m - 1.0
    rhs = (dim_h - 1.0) / index
    status, _, _, residual, _ = _cmp(lhs, rhs, rc.tol)
    return status, lhs, rhs, residual, f"index {index}"


def _chk_betti_difference(rc: RunContext):
    k = rc.grp.order
    lhs = rc.dim_m - 1.0
    rhs = (rc.dim_a - 1.0) / k
    status, _, _, residual, _ = _cmp(lhs, rhs, rc.tol)
    note = "inner and full derivation spaces coincide here, so b1 - b0 = dim Der - 1"
    return status, lhs, rhs, residual, note


def _chk_coset_projections(rc: RunContext):
    ctx = rc.ctx
    cp = rc.cp
    big = ctx.big
    grp = rc.grp
    k = grp.order
    masks = {(g, h): ctx.coset_mask(g, h) for g in range(k) for h in range(k)}
    worst = 0.0
    # orthogonal resolution of identity
    total = sum(masks.values())
    worst = max(worst, float(np.max(np.abs(total - 1.0))))
    # translation relation p_{g,h} L(u_a (x) u_b°) = L(u_a (x) u_b°) p_{a^-1 g, h b^-1}
    for a in range(k):
        for b in range(k):
            lab = big.left_pair(cp.u(a), cp.u(b))
            for g in range(k):
                for h in range(k):
                    m1 = masks[(g, h)]
                    m2 = masks[(grp.mul(grp.inv(a), g), grp.mul(h, grp.inv(b)))]
                    worst = max(
                        worst, frob(m1[:, None] * lab - lab * m2[None, :])
                    )
    # conjugation swaps the sector indices: J p_{g,h} = p_{g^-1,h^-1} J
    s = big.star
    for g in range(k):
        for h in range(k):
            lhs = s * masks[(g, h)][None, :]
            rhs = masks[(grp.inv(g), grp.inv(h))][:, None] * s
            worst = max(worst, frob(lhs - rhs))
    # commutes with the base tensor algebra acting on either side
    for j in range(rc.alg.dim):
        lifted = cp.lift(rc.alg.basis(j))
        for op in (big.act_left(lifted), big.act_right(lifted)):
            for g in range(k):
                for h in range(k):
                    m = masks[(g, h)]
                    worst = max(worst, frob(m[:, None] * op - op * m[None, :]))
    status = "pass" if worst <= rc.tol else "fail"
    return status, worst, 0.0, worst, ""


def _zero_derivation(bim: Bimodule, ncols: int) -> Derivation:
    return Derivation(bim, np.zeros((bim.dim, ncols), dtype=complex))


def _chk_covariance_equivalence(rc: RunContext):
    ctx = rc.ctx
    cp = rc.cp
    big = ctx.big
    cases: list[Derivation] = [_zero_derivation(big, cp.algebra.dim)]
    for r in range(rc.space_m.rank):
        cases.append(rc.space_m.derivation(r))
    if rc.space_a.rank:
        d = rc.space_a.derivation(0)
        for h in range(rc.grp.order):
            cases.append(extend_vanishing(ctx, d, h))
    # an inner derivation moved off the vanishing space: xi = u_s (x) 1°
    s = 1 if rc.grp.identity != 1 else 0
    cases.append(
        commutator_derivation(big, big.embed(cp.u(s), cp.algebra.unit))
    )
    agree = 0
    worst = 0.0
    for d in cases:
        scale = max(1.0, frob(d.matrix))
        defect = covariance_defect(ctx, d)
        vanish = d.restricted_norm(cp.embed_group) / scale
        cov = defect <= rc.tol
        vanishes = vanish <= rc.tol
        if cov == vanishes:
            agree += 1
        if vanishes:
            worst = max(worst, defect)
        if cov:
            worst = max(worst, vanish)
    residual = worst if agree == len(cases) else 1.0
    status = "pass" if agree == len(cases) and residual <= rc.tol else "fail"
    return status, float(agree), float(len(cases)), residual, (
        f"{agree}/{len(cases)} cases agree in both directions"
    )


def _y_columns(rc: RunContext) -> np.ndarray:
    """Arguments Y = (embedded A basis) + (group units) for the crossed
    product pairing."""
    cp = rc.cp
    units = np.column_stack([cp.u(g) for g in range(rc.grp.order)])
    return np.column_stack([cp.embed_base, units])


def _pairing(big: Bimodule, ycols: np.ndarray, d1: Derivation, d2: Derivation):
    """sum_y <d1(y), d2(y)> with the GNS inner product, linear in d1."""
    i1 = d1.matrix @ ycols
    i2 = d2.matrix @ ycols
    return complex(np.sum(np.conj(i2) * (big.gram @ i1)))


def _chk_extension_orthogonality(rc: RunContext):
    if rc.space_a.rank == 0:
        return "pass", 0.0, 0.0, 0.0, "no derivations on the base algebra"
    ctx = rc.ctx
    k = rc.grp.order
    ycols = _y_columns(rc)
    worst = 0.0
    for r in range(min(rc.space_a.rank, 2)):
        d = rc.space_a.derivation(r)
        exts = [extend_vanishing(ctx, d, h) for h in range(k)]
        gram = np.array(
            [[_pairing(ctx.big, ycols, a, b) for a in exts] for b in exts]
        )
        scale = max(1.0, float(np.max(np.abs(np.diag(gram)))))
        off = gram - np.diag(np.diag(gram))
        worst = max(worst, float(np.max(np.abs(off))) / scale)
    status = "pass" if worst <= rc.tol else "fail"
    return status, worst, 0.0, worst, ""


def _chk_extension_vanishing(rc: RunContext):
    if rc.space_a.rank == 0:
        return "pass", 0.0, 0.0, 0.0, "no derivations on the base algebra"
    ctx = rc.ctx
    cp = rc.cp
    worst = 0.0
    for r in range(min(rc.space_a.rank, 2)):
        d = rc.space_a.derivation(r)
        for h in range(rc.grp.order):
            ext = extend_vanishing(ctx, d, h)
            scale = max(1.0, frob(ext.matrix))
            worst = max(worst, ext.leibniz_residual())
            worst = max(worst, ext.restricted_norm(cp.embed_group) / scale)
            worst = max(worst, covariance_defect(ctx, ext))
    status = "pass" if worst <= rc.tol else "fail"
    return status, worst, 0.0, worst, ""


def _chk_round_trip(rc: RunContext):
    ctx = rc.ctx
    grp = rc.grp
    worst = 0.0
    for r in range(min(rc.space_a.rank, 2)):
        d = rc.space_a.derivation(r)
        scale = max(1.0, frob(d.matrix))
        for h in range(grp.order):
            back = restrict_component(
                ctx, extend_vanishing(ctx, d, h), grp.identity, h
            )
            worst = max(worst, frob(back.matrix - d.matrix) / scale)
    dec = decompose_vanishing(ctx, rc.vanishing)
    worst = max(worst, dec.worst_residual)
    status = "pass" if worst <= rc.tol else "fail"
    return status, worst, 0.0, worst, ""


def _chk_central_projection(rc: RunContext):
    if rc.spec.blocks is None:
        return "skipped", None, None, None, "matrix units not supplied"
    alg = rc.alg
    bim = rc.space_a.bim
    units = matrix_units(rc.spec.blocks)
    p, left_p = central_projection_element(alg, units, bim)
    q = central_vectors(alg, np.eye(alg.dim, dtype=complex), bim)
    proj = q @ (q.conj().T @ bim.gram)
    op_res = frob(left_p - proj) / max(1.0, frob(proj))
    lhs = float(np.real(np.conj(bim.unit) @ (bim.gram @ p)))
    rhs = sum(a * a / (n * n) for n, a in rc.spec.blocks)
    residual = max(op_res, abs(lhs - rhs))
    status = "pass" if residual <= rc.tol else "fail"
    return status, lhs, rhs, residual, ""


def _chk_central_family(rc: RunContext):
    grp = rc.grp
    ga = group_algebra(grp)
    bim = Bimodule(ga)
    fam = group_central_family(grp)
    gram = fam.conj().T @ (bim.gram @ fam)
    worst = float(np.max(np.abs(gram - np.eye(grp.order))))
    for g in range(grp.order):
        ug = ga.basis(g)
        worst = max(worst, frob(bim.act_left(ug) @ fam - bim.act_right(ug) @ fam))
    central = central_vectors(ga, np.eye(ga.dim, dtype=complex), bim)
    resid = fam - central @ (central.conj().T @ (bim.gram @ fam))
    worst = max(worst, frob(resid))
    status = "pass" if worst <= rc.tol else "fail"
    return status, float(grp.order), float(central.shape[1]), worst, ""


def _scaled_y_columns(rc: RunContext) -> np.ndarray:
    cp = rc.cp
    xs = [rc.alg.basis(i) for i in range(rc.alg.dim)]
    pairs = scaled_generating_set(xs, rc.act, rc.chars)
    units = [cp.u(g) for g in range(rc.grp.order)]
    return np.column_stack([cp.lift(y) for y, _ in pairs] + units)


def _chk_scaling_unitary(rc: RunContext):
    if not rc.grp.is_abelian:
        return "skipped", None, None, None, "character scaling needs an abelian group"
    ctx = rc.ctx
    ycols = _scaled_y_columns(rc)
    rank = rc.space_m.rank
    if rank == 0:
        return "pass", 0.0, 0.0, 0.0, "no derivations to conjugate"
    picks = [rc.space_m.derivation(r) for r in range(min(rank, 3))]
    coef = rc.rng.standard_normal(rank) + 1j * rc.rng.standard_normal(rank)
    mix = np.einsum("r,rpj->pj", coef, rc.space_m.basis)
    picks.append(Derivation(ctx.big, mix))
    worst = 0.0
    for g in range(rc.grp.order):
        for d1 in picks:
            for d2 in picks:
                before = _pairing(ctx.big, ycols, d1, d2)
                after = _pairing(
                    ctx.big,
                    ycols,
                    scaling_conjugation(ctx, g, d1),
                    scaling_conjugation(ctx, g, d2),
                )
                scale = max(1.0, abs(before))
                worst = max(worst, abs(after - before) / scale)
    status = "pass" if worst <= rc.tol else "fail"
    return status, worst, 0.0, worst, ""


def _chk_scaling_average(rc: RunContext):
    ctx = rc.ctx
    cp = rc.cp
    rank = rc.space_m.rank
    worst = 0.0
    for r in range(min(rank, 4)):
        avg = average_scaling(ctx, rc.space_m.derivation(r))
        scale = max(1.0, frob(avg.matrix))
        worst = max(worst, avg.leibniz_residual())
        worst = max(worst, avg.restricted_norm(cp.embed_group) / scale)
        worst = max(worst, covariance_defect(ctx, avg))
    status = "pass" if worst <= rc.tol else "fail"
    return status, worst, 0.0, worst, ""


def _chk_scaled_generators(rc: RunContext):
    if not rc.grp.is_abelian:
        return "skipped", None, None, None, "character scaling needs an abelian group"
    alg = rc.alg
    xs = [alg.basis(i) for i in range(alg.dim)]
    pairs = scaled_generating_set(xs, rc.act, rc.chars)
    worst = scaling_residual(pairs, rc.act)
    orbit = [rc.act.apply(g, x) for x in xs for g in range(rc.grp.order)]
    before = subalgebra_generate(alg, xs + orbit)
    after = subalgebra_generate(alg, [y for y, _ in pairs])
    same = span_equal(alg, before, after, rc.tol)
    residual = worst if same else max(worst, 1.0)
    status = "pass" if same and residual <= rc.tol else "fail"
    return status, float(after.shape[1]), float(before.shape[1]), residual, (
        f"{len(pairs)} scaled components"
    )


def _chk_generating_independence(rc: RunContext):
    alg = rc.alg
    x1 = np.eye(alg.dim, dtype=complex)
    if rc.spec.alt_generators is not None:
        x2 = rc.spec.alt_generators
    elif rc.spec.blocks is not None and alg.dim > 1:
        x2 = multimatrix_generators(rc.spec.blocks)
    else:
        x2 = _greedy_generators(alg)
    rep = generating_set_independence_check(rc.space_a, x1, x2, rc.tol)
    status = "pass" if rep.delta <= rc.tol else "fail"
    return status, rep.dim_a, rep.dim_b, rep.delta, (
        f"{x1.shape[1]} vs {x2.shape[1]} generators"
    )


CHECKS: dict[str, tuple[str, object]] = {
    "algebra_valid": (
        "multiplication is associative and unital, * is an antimultiplicative "
        "involution, and tau is a faithful tracial state",
        _chk_algebra_valid,
    ),
    "action_valid": (
        "every alpha_g is a trace-preserving unital *-automorphism and "
        "g -> alpha_g is a group homomorphism",
        _chk_action_valid,
    ),
    "group_algebra_dim": (
        "dim Der(C[G]) = 1 - 1/|G|",
        _chk_group_algebra_dim,
    ),
    "multimatrix_formula": (
        "dim Der(A) = 1 - sum_i alpha_i^2 / n_i^2 for A a direct sum of "
        "matrix blocks M_{n_i} with trace weights alpha_i",
        _chk_multimatrix_formula,
    ),
    "crossed_multimatrix": (
        "A x| G is a multi-matrix algebra whose weights sum to 1, whose block "
        "sizes square-sum to dim(A) |G|, and whose derivation dimension obeys "
        "its own block formula",
        _chk_crossed_multimatrix,
    ),
    "schreier_crossed": (
        "dim Der(A x| G) - 1 = (dim Der(A) - 1) / |G|",
        _chk_schreier_crossed,
    ),
    "schreier_vanishing": (
        "the derivations of A x| G vanishing on C[G] have dimension "
        "|G| dim Der(A) over A (x) A°",
        _chk_schreier_vanishing,
    ),
    "index_scaling_full": (
        "restricting scalars from (A x| G) (x) (A x| G)° to A (x) A° "
        "multiplies the dimension of the full module by |G|^2",
        _chk_index_scaling_full,
    ),
    "index_scaling_vanishing": (
        "the vanishing-space dimension over A (x) A° is |G|^2 times its "
        "dimension over (A x| G) (x) (A x| G)°",
        _chk_index_scaling_vanishing,
    ),
    "subgroup_schreier": (
        "dim Der(A x| G) - 1 = (dim Der(A x| H) - 1) / [G:H] for H <= G",
        _chk_subgroup_schreier,
    ),
    "betti_difference": (
        "(b1 - b0)(A x| G) = (b1 - b0)(A) / |G| with b1 - b0 = dim Der - 1",
        _chk_betti_difference,
    ),
    "coset_projection_relations": (
        "the sector projections p_{g,h} resolve the identity, commute with "
        "A (x) A°, satisfy p_{g,h} (u_a (x) u_b°) = (u_a (x) u_b°) "
        "p_{a^-1 g, h b^-1}, and J p_{g,h} = p_{g^-1, h^-1} J",
        _chk_coset_projections,
    ),
    "covariance_equivalence": (
        "a derivation of A x| G is fixed by every scaling conjugation exactly "
        "when it vanishes on C[G]",
        _chk_covariance_equivalence,
    ),
    "extension_orthogonality": (
        "the extensions {d^h}_h of a base derivation are pairwise orthogonal "
        "in <.,.>_Y for Y = (A basis) + group units",
        _chk_extension_orthogonality,
    ),
    "extension_vanishing": (
        "each extension d^h satisfies the Leibniz rule, vanishes on C[G], and "
        "is fixed by the scaling conjugations",
        _chk_extension_vanishing,
    ),
    "round_trip_extend_restrict": (
        "restricting an extension returns the original derivation, and every "
        "vanishing derivation is the sum of its re-extended components",
        _chk_round_trip,
    ),
    "central_projection_formula": (
        "p = sum_i n_i^-1 sum_{j,k} e^(i)_{jk} (x) (e^(i)_{kj})° left-acts as "
        "the orthogonal projection onto the A-central vectors, and "
        "(tau (x) tau)(p) = sum_i alpha_i^2 / n_i^2",
        _chk_central_projection,
    ),
    "central_family_orthonormal": (
        "the vectors |G|^-1/2 sum_k u_{kh} (x) (u_{k^-1})° are an orthonormal "
        "basis of the C[G]-central vectors",
        _chk_central_family,
    ),
    "scaling_unitary": (
        "each scaling conjugation V_g is unitary for <.,.>_Y built from a "
        "character-scaled generating set plus the group units",
        _chk_scaling_unitary,
    ),
    "scaling_average_vanishes": (
        "the group average of the scaling conjugates of any derivation "
        "vanishes on C[G]",
        _chk_scaling_average,
    ),
    "scaled_generators": (
        "character averaging maps a generating set to alpha-eigenvectors "
        "generating the same subalgebra",
        _chk_scaled_generators,
    ),
    "generating_set_independence": (
        "the computed module dimension of the derivation space does not "
        "depend on the generating set",
        _chk_generating_independence,
    ),
}


def _cmp(lhs: float, rhs: float, tol: float):
    residual = abs(lhs - rhs)
    status = "pass" if residual <= tol else "fail"
    return status, float(lhs), float(rhs), float(residual), ""


def _fraction_bound(rc: RunContext) -> int:
    try:
        prod = 1
        for n, _ in rc.blocks_a:
            prod *= n * n
    except SteinlabError:
        prod = rc.alg.dim * rc.alg.dim
    return max(rc.grp.order * rc.grp.order * prod, 2)


def run(spec: ExperimentSpec) -> VerificationReport:
    """Execute the requested checks (default: the whole registry) and
    assemble the report. Validation failures short-circuit dependent checks
    to skipped."""
    rc = RunContext(spec)
    if spec.checks is None:
        selected = list(CHECKS)
    else:
        selected = [name for name in CHECKS if name in set(spec.checks)]
    rows: list[CheckRow] = []
    foundation_ok = True
    max_den = None
    for name in selected:
        statement, fn = CHECKS[name]
        if not foundation_ok and name not in ("algebra_valid", "action_valid"):
            rows.append(
                CheckRow(name, "skipped", statement, note="validation failed upstream")
            )
            continue
        t0 = time.perf_counter()
        try:
            status, lhs, rhs, residual, note = fn(rc)
        except (SteinlabError, np.linalg.LinAlgError, MemoryError) as exc:
            status, lhs, rhs, residual = "fail", None, None, None
            note = f"{type(exc).__name__}: {exc}"
        elapsed = time.perf_counter() - t0
        row = CheckRow(
            name, status, statement,
            lhs=None if lhs is None else float(lhs),
            rhs=None if rhs is None else float(rhs),
            residual=None if residual is None else float(residual),
            note=note, elapsed=elapsed,
        )
        if status == "pass" and row.lhs is not None and row.rhs is not None:
            if max_den is None:
                max_den = _fraction_bound(rc)
            fl = as_fraction(row.lhs, max_den)
            fr = as_fraction(row.rhs, max_den)
            row.lhs_fraction = None if fl is None else str(fl)
            row.rhs_fraction = None if fr is None else str(fr)
        rows.append(row)
        if name in ("algebra_valid", "action_valid") and status == "fail":
            foundation_ok = False
    return VerificationReport(spec.label, spec.seed, spec.tolerance, rows)


# -- built-in corpus ------------------------------------------------------------

def corpus_specs(seed: int = 0, tolerance: float = 1e-8) -> list[ExperimentSpec]:
    """The built-in battery of (algebra, group, action) triples."""
    out: list[ExperimentSpec] = []

    def add(label, alg, grp, act, blocks=None, sub=None):
        out.append(
            ExperimentSpec(
                label=label, algebra=alg, group=grp, action=act,
                blocks=blocks, tolerance=tolerance, seed=seed, subgroup=sub,
            )
        )

    c1 = [(1, 1.0)]
    for n in range(2, 7):
        grp = cyclic(n)
        alg = multimatrix(c1, label="C")
        add(f"C | Z/{n} | trivial", alg, grp, trivial_action(grp, alg), blocks=c1)
    v4 = direct_product(cyclic(2), cyclic(2))
    alg = multimatrix(c1, label="C")
    add("C | Z/2xZ/2 | trivial", alg, v4, trivial_action(v4, alg), blocks=c1)
    s3 = symmetric_3()
    alg = multimatrix(c1, label="C")
    add("C | S3 | trivial", alg, s3, trivial_action(s3, alg), blocks=c1)

    c2b = [(1, 0.5), (1, 0.5)]
    c2 = multimatrix(c2b, label="C^2")
    z2 = cyclic(2)
    add(
        "C^2 | Z/2 | swap", c2, z2,
        permutation_action(z2, c2, [[0, 1], [1, 0]]), blocks=c2b,
    )

    c3b = [(1, 1 / 3), (1, 1 / 3), (1, 1 / 3)]
    c3 = multimatrix(c3b, label="C^3")
    z3 = cyclic(3)
    add(
        "C^3 | Z/3 | cycle", c3, z3,
        permutation_action(z3, c3, [[0, 1, 2], [2, 0, 1], [1, 2, 0]]), blocks=c3b,
    )

    c3ub = [(1, 0.5), (1, 0.3), (1, 0.2)]
    c3u = multimatrix(c3ub, label="C^3 uneven")
    add("C^3 uneven | Z/2 | trivial", c3u, z2, trivial_action(z2, c3u), blocks=c3ub)

    m2b = [(2, 1.0)]
    m2 = multimatrix(m2b, label="M2")
    sign = np.array([1, 0, 0, -1], dtype=complex)  # diag(1, -1) in matrix units
    add(
        "M2 | Z/2 | ad(diag(1,-1))", m2, z2,
        ad_action(z2, m2, np.stack([m2.unit, sign])), blocks=m2b,
    )

    m2cb = [(2, 2 / 3), (1, 1 / 3)]
    m2c = multimatrix(m2cb, label="M2+C")
    sign_c = np.array([1, 0, 0, -1, 1], dtype=complex)
    add(
        "M2+C | Z/2 | ad(diag(1,-1)+1)", m2c, z2,
        ad_action(z2, m2c, np.stack([m2c.unit, sign_c])), blocks=m2cb,
    )

    cz2 = group_algebra(z2)
    add("C[Z/2] | Z/2 | trivial", cz2, z2, trivial_action(z2, cz2))

    for n in (2, 3):
        act = dual_action(n)
        add(f"C[Z/{n}] | Z/{n} | dual", act.algebra, act.group, act)

    z4 = cyclic(4)
    c2_z4 = multimatrix(c2b, label="C^2")
    flip_through = [[0, 1] if g % 2 == 0 else [1, 0] for g in range(4)]
    add(
        "C^2 | Z/4 | swap through Z/2", c2_z4, z4,
        permutation_action(z4, c2_z4, flip_through), blocks=c2b, sub=[0, 2],
    )

    c2_v4 = multimatrix(c2b, label="C^2")
    # (a, b) acts by swap^a; the subgroup {(0,0), (1,0)} realizes the swap
    perms_v4 = [[0, 1], [0, 1], [1, 0], [1, 0]]
    add(
        "C^2 | Z/2xZ/2 | swap on first factor", c2_v4, v4,
        permutation_action(v4, c2_v4, perms_v4), blocks=c2b, sub=[0, 2],
    )
    return out


def run_corpus(seed: int = 0, tolerance: float = 1e-8) -> list[VerificationReport]:
    return [run(spec) for spec in corpus_specs(seed=seed, tolerance=tolerance)]


# -- serialization ---------------------------------------------------------------

def _row_dict(row: CheckRow) -> dict:
    return {
        "name": row.name,
        "status": row.status,
        "statement": row.statement,
        "lhs": row.lhs,
        "rhs": row.rhs,
        "residual": row.residual,
        "lhs_fraction": row.lhs_fraction,
        "rhs_fraction": row.rhs_fraction,
        "note": row.note,
    }


def report_dict(report: VerificationReport) -> dict:
    return {
        "label": report.label,
        "seed": report.seed,
        "tolerance": report.tolerance,
        "passed": report.passed,
        "rows": [_row_dict(r) for r in report.rows],
    }


def to_json(reports: list[VerificationReport]) -> str:
    return json.dumps({"reports": [report_dict(r) for r in reports]}, indent=2)


def _fmt(x) -> str:
    if x is None:
        return ""
    return f"{x:.12g}"


def to_markdown(reports: list[VerificationReport]) -> str:
    lines: list[str] = []
    for rep in reports:
        lines.append(f"## {rep.label}")
        lines.append("")
        lines.append(
            f"seed {rep.seed}, tolerance {rep.tolerance:g}, "
            f"{'all checks pass' if rep.passed else 'FAILURES PRESENT'}"
        )
        lines.append("")
        lines.append("| check | status | lhs | rhs | residual | time (s) | note |")
        lines.append("|---|---|---|---|---|---|---|")
        for r in rep.rows:
            frac = ""
            if r.lhs_fraction and r.rhs_fraction and r.lhs_fraction == r.rhs_fraction:
                frac = f" (= {r.lhs_fraction})"
            lines.append(
                f"| {r.name} | {r.status} | {_fmt(r.lhs)}{frac} | {_fmt(r.rhs)} "
                f"| {_fmt(r.residual)} | {r.elapsed:.3f} | {r.note} |"
            )
        lines.append("")
    return "\n".join(lines)


def to_csv(reports: list[VerificationReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["experiment", "check", "status", "lhs", "rhs", "residual",
         "lhs_fraction", "rhs_fraction", "note"]
    )
    for rep in reports:
        for r in rep.rows:
            writer.writerow(
                [rep.label, r.name, r.status, _fmt(r.lhs), _fmt(r.rhs),
                 _fmt(r.residual), r.lhs_fraction or "", r.rhs_fraction or "",
                 r.note]
            )
    return buf.getvalue()
