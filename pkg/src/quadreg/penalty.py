"""Matrix penalties on the coefficient matrix.

Group-type terms (l2, l_inf and hybrid l1/l_inf) act on columns or rows
``k = 1..p-1`` (0-based), i.e. every column/row except the one belonging to
the intercept. The whole column, linear-effect entry included, forms the
group, which is what produces hierarchical sparsity.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .prox import prox_hybrid_columns, prox_linf_columns, prox_nuclear, soft_threshold


class PenaltyKind(str, enum.Enum):
    L1 = "l1"
    NUCLEAR = "nuclear"
    GROUP_L2_ROWS = "group_l2_rows"
    GROUP_L2_COLS = "group_l2_cols"
    LINF_ROWS = "linf_rows"
    LINF_COLS = "linf_cols"
    HYBRID_ROWS = "hybrid_rows"
    HYBRID_COLS = "hybrid_cols"


class MaskPolicy(str, enum.Enum):
    EXCLUDE_INTERCEPT = "exclude_intercept"
    PENALIZE_ALL = "penalize_all"


_ROW_TO_COL = {
    PenaltyKind.GROUP_L2_ROWS: PenaltyKind.GROUP_L2_COLS,
    PenaltyKind.LINF_ROWS: PenaltyKind.LINF_COLS,
    PenaltyKind.HYBRID_ROWS: PenaltyKind.HYBRID_COLS,
}
_COL_KINDS = frozenset(_ROW_TO_COL.values())

# family name -> (row kind, col kind) for the second penalty of a preset
_GROUP_FAMILIES = {
    "l2": (PenaltyKind.GROUP_L2_ROWS, PenaltyKind.GROUP_L2_COLS),
    "linf": (PenaltyKind.LINF_ROWS, PenaltyKind.LINF_COLS),
    "l1linf": (PenaltyKind.HYBRID_ROWS, PenaltyKind.HYBRID_COLS),
}

PRESETS = ("l1", "l1+l2", "l1+linf", "l1+l1linf", "l1+nuclear")


@dataclass(frozen=True)
class PenaltyTerm:
    kind: PenaltyKind
    weight: float
    mask_policy: MaskPolicy = MaskPolicy.EXCLUDE_INTERCEPT

    def __post_init__(self):
        object.__setattr__(self, "kind", PenaltyKind(self.kind))
        object.__setattr__(self, "mask_policy", MaskPolicy(self.mask_policy))
        if not float(self.weight) >= 0:
            raise ValueError(f"penalty weight must be non-negative, got {self.weight}")
        object.__setattr__(self, "weight", float(self.weight))


@dataclass(frozen=True)
class PenaltySpec:
    terms: tuple[PenaltyTerm, ...] = ()

    def __post_init__(self):
        terms = tuple(self.terms)
        object.__setattr__(self, "terms", terms)
        weights = {t.kind: t.weight for t in terms}
        for row, col in _ROW_TO_COL.items():
            if (row in weights) != (col in weights) or weights.get(row) != weights.get(col):
                raise ValueError(f"{row.value} and {col.value} must appear together "
                                 "with equal weight")

    @classmethod
    def preset(cls, name: str, lambda1: float, lambda2: float = 0.0,
               mask_policy: MaskPolicy | str = MaskPolicy.EXCLUDE_INTERCEPT) -> "PenaltySpec":
        """Build one of the named presets (see ``PRESETS``)."""
        if name not in PRESETS:
            raise ValueError(f"unknown penalty preset {name!r}; choose from {PRESETS}")
        terms = [PenaltyTerm(PenaltyKind.L1, lambda1, mask_policy)]
        second = name.partition("+")[2]
        if second == "nuclear":
            terms.append(PenaltyTerm(PenaltyKind.NUCLEAR, lambda2))
        elif second:
            row, col = _GROUP_FAMILIES[second]
            terms += [PenaltyTerm(row, lambda2), PenaltyTerm(col, lambda2)]
        return cls(tuple(terms))

    def family(self, which: int) -> "PenaltySpec":
        """Sub-spec holding the first (``which=1``) or second (``which=2``) penalty family."""
        if which == 1:
            return PenaltySpec(tuple(t for t in self.terms if t.kind is PenaltyKind.L1))
        return PenaltySpec(tuple(t for t in self.terms if t.kind is not PenaltyKind.L1))

    def with_weights(self, lambda1: float, lambda2: float = 0.0) -> "PenaltySpec":
        return PenaltySpec(tuple(
            replace(t, weight=lambda1 if t.kind is PenaltyKind.L1 else lambda2)
            for t in self.terms))


def l1_mask(p: int, policy: MaskPolicy | str) -> NDArray[np.bool_]:
    mask = np.ones((p, p), dtype=bool)
    if MaskPolicy(policy) is MaskPolicy.EXCLUDE_INTERCEPT:
        mask[0, 0] = False
    return mask


def penalized_mask(spec: PenaltySpec, p: int) -> NDArray[np.bool_]:
    """Entries carrying a positive-weight penalty under ``spec``."""
    mask = np.zeros((p, p), dtype=bool)
    for t in spec.terms:
        if t.weight <= 0:
            continue
        if t.kind is PenaltyKind.L1:
            mask |= l1_mask(p, t.mask_policy)
        elif t.kind is PenaltyKind.NUCLEAR:
            mask[:] = True
        elif t.kind in _COL_KINDS:
            mask[:, 1:] = True
        else:
            mask[1:, :] = True
    return mask


def _column_norms(kind: PenaltyKind, B: NDArray) -> NDArray:
    cols = B[:, 1:]
    if kind is PenaltyKind.GROUP_L2_COLS:
        return np.linalg.norm(cols, axis=0)
    if kind is PenaltyKind.LINF_COLS:
        return np.abs(cols).max(axis=0, initial=0.0)
    return np.maximum(np.abs(cols[0]), np.abs(cols[1:]).sum(axis=0))


def eval_penalty(term: PenaltyTerm, B: ArrayLike) -> float:
    B = np.asarray(B, dtype=np.float64)
    if term.weight == 0:
        return 0.0
    kind = term.kind
    if kind is PenaltyKind.L1:
        value = np.abs(B[l1_mask(B.shape[0], term.mask_policy)]).sum()
    elif kind is PenaltyKind.NUCLEAR:
        value = np.linalg.svd(B, compute_uv=False).sum()
    elif kind in _COL_KINDS:
        value = _column_norms(kind, B).sum()
    else:
        value = _column_norms(_ROW_TO_COL[kind], B.T).sum()
    return term.weight * float(value)


def _prox_columns(kind: PenaltyKind, A: NDArray, lam: float) -> NDArray:
    out = A.copy()
    if kind is PenaltyKind.GROUP_L2_COLS:
        norms = np.linalg.norm(A[:, 1:], axis=0)
        scale = np.where(norms > lam, 1.0 - lam / np.where(norms > 0, norms, 1.0), 0.0)
        out[:, 1:] = A[:, 1:] * scale
        return out
    batched = prox_linf_columns if kind is PenaltyKind.LINF_COLS else prox_hybrid_columns
    out[:, 1:] = batched(A[:, 1:], lam)
    return out


def prox_penalty_term(term: PenaltyTerm, A: ArrayLike, rho: float) -> NDArray:
    """argmin_B  term(B) + rho/2 ||B - A||_F^2."""
    rho = float(rho)
    if not rho > 0:
        raise ValueError(f"rho must be positive, got {rho}")
    A = np.asarray(A, dtype=np.float64)
    lam = term.weight / rho
    if lam == 0:
        return A.copy()
    kind = term.kind
    if kind is PenaltyKind.L1:
        mask = l1_mask(A.shape[0], term.mask_policy)
        return np.where(mask, soft_threshold(A, lam), A)
    if kind is PenaltyKind.NUCLEAR:
        return prox_nuclear(A, lam)
    if kind in _COL_KINDS:
        return _prox_columns(kind, A, lam)
    return _prox_columns(_ROW_TO_COL[kind], A.T, lam).T


def null_gradient(pre, dataset, spec: PenaltySpec) -> NDArray:
    """Negative loss gradient at the best fit using only unpenalized entries.

    The only entry that can escape every penalty is ``B[0, 0]``; when it is
    free, it is fitted first (for an augmented design this is the mean
    response) and the gradient is taken there.
    """
    D = pre.D
    if penalized_mask(spec, D.shape[0])[0, 0]:
        return D.copy()
    X, y = dataset.design, dataset.response
    q = X[:, 0] ** 2
    qq = q @ q
    if qq == 0:
        return D.copy()
    b = (q @ y) / qq
    return D - b * (X.T @ (q[:, None] * X)) / dataset.n


def lambda_max(spec: PenaltySpec, pre, dataset=None) -> float:
    """Smallest-weight bound at which the zero matrix is optimal for this family.

    ``spec`` must hold a single family (l1, nuclear, or a paired row/column
    group kind); weights are ignored. For paired row/column families the
    bound comes from the dual certificate splitting each interaction entry
    evenly between its row and column group, so it is sufficient but not
    necessarily tight.
    """
    kinds = {t.kind for t in spec.terms}
    if not kinds:
        raise ValueError("lambda_max needs a non-empty penalty family")
    probe = spec.with_weights(1.0, 1.0)
    if dataset is None:
        R = np.asarray(pre.D, dtype=np.float64)
    else:
        R = null_gradient(pre, dataset, probe)
    if kinds == {PenaltyKind.L1}:
        (term,) = spec.terms
        return float(np.abs(R[l1_mask(R.shape[0], term.mask_policy)]).max(initial=0.0))
    if kinds == {PenaltyKind.NUCLEAR}:
        return float(np.linalg.svd(R, compute_uv=False)[0])
    col_kinds = kinds & _COL_KINDS
    if len(kinds) != 2 or len(col_kinds) != 1 or _ROW_TO_COL.get(next(iter(kinds - col_kinds))) \
            not in col_kinds:
        names = sorted(k.value for k in kinds)
        raise ValueError(f"lambda_max needs a single penalty family, got {names}")
    (kind,) = col_kinds
    if R.shape[0] < 2:
        return 0.0
    # column k's share of the subgradient: full linear-effect entry, half of each interaction
    Z = R[:, 1:].copy()
    Z[1:] *= 0.5
    if kind is PenaltyKind.GROUP_L2_COLS:
        dual = np.linalg.norm(Z, axis=0)
    elif kind is PenaltyKind.LINF_COLS:
        dual = np.abs(Z).sum(axis=0)
    else:
        dual = np.abs(Z[0]) + np.abs(Z[1:]).max(axis=0, initial=0.0)
    return float(dual.max(initial=0.0))
