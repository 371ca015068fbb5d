"""Scale-size models for the general two-stage network and its black box.

All models are variable-returns-to-scale envelopment programs built from a
:class:`~dea_mpss.data.Dataset` and a ``two_stage_general`` topology.  The
score of the evaluated DMU is zero exactly when it operates at its most
productive scale size; positive scores measure the attainable gap.

Black box (internal structure ignored)::

    max  t2 - t1
    s.t. sum_j l_j x_ij <= t1 x_io      every input i
         sum_j l_j y_rj >= t2 y_ro      every output r
         sum_j l_j = 1,  all variables >= 0

The two-stage system model keeps one intensity vector per stage and links
them through the intermediate measures, either as free targets (one new
decision variable per intermediate) or radially (stage-1 output factor and
stage-2 input factor scale the DMU's own intermediate levels).  Stage
scores are solved lexicographically: the system score is pinned inside a
narrow band while a stage objective is re-optimised.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .data import TWO_STAGE_GENERAL, Dataset, NetworkTopology
from .errors import SolverError, UnsupportedTopologyError, ValidationError
from .lp import LpProblem, LpSolution, SimplexOptions, solve_lp

EPS_MPSS = 1e-6
FIXING_BAND = 1e-6

BLACK_BOX = "black_box"
SYSTEM_VARIABLE = "system_variable"
SYSTEM_RADIAL = "system_radial"
STAGE_1 = "stage1"
STAGE_2 = "stage2"


@dataclass(frozen=True)
class MpssResult:
    """Solved scale-size score for one DMU under one scope.

    ``scale_factors`` holds the input-contraction / output-expansion
    factors actually present in the model; ``optimal_intermediates`` is
    populated only when the intermediates are free decision variables,
    in which case ``intermediates_unique`` reports whether the solved
    target levels are the unique optimum.
    """

    scope: str
    dmu: str
    score: float
    scale_factors: Mapping[str, float]
    reference_weights: Mapping[str, np.ndarray]
    optimal_intermediates: Mapping[str, float] | None = None
    intermediates_unique: bool | None = None

    def is_mpss(self, eps: float = EPS_MPSS) -> bool:
        return abs(self.score) <= eps


def _solve(problem: LpProblem, context: str, options: SimplexOptions | None = None) -> LpSolution:
    sol = solve_lp(problem) if options is None else solve_lp(problem, options)
    if sol.status != "optimal":
        raise SolverError(f"{context}: linear program is {sol.status}")
    return sol


class _Rows:
    """Accumulates constraint triples over a fixed variable layout."""

    def __init__(self, n_vars: int):
        self.n = n_vars
        self.rows: list = []

    def add(self, entries: dict, rel: str, rhs: float = 0.0) -> None:
        a = np.zeros(self.n)
        for j, v in entries.items():
            a[j] += v
        self.rows.append((a, rel, rhs))


def _two_stage_parts(dataset: Dataset, topology: NetworkTopology):
    if topology.shape_tag != TWO_STAGE_GENERAL:
        raise UnsupportedTopologyError(
            f"unsupported topology: expected {TWO_STAGE_GENERAL!r}, got {topology.shape_tag!r}"
        )
    topology.validate_against(dataset)
    up = topology.stage_processes(1)[0]
    down = topology.stage_processes(2)[0]
    mids = topology.intermediate_measures()
    return {
        "X1": dataset.matrix(up.exogenous_inputs),
        "Z": dataset.matrix(mids),
        "Y1": dataset.matrix(up.final_outputs),
        "X2": dataset.matrix(down.exogenous_inputs),
        "Y2": dataset.matrix(down.final_outputs),
        "mids": mids,
    }


def blackbox_mpss(
    dataset: Dataset,
    dmu: str,
    *,
    inputs: Sequence[str] | None = None,
    outputs: Sequence[str] | None = None,
    topology: NetworkTopology | None = None,
) -> MpssResult:
    """Scale-size score of ``dmu`` with the internal structure ignored.

    The input/output split comes either from a topology (all exogenous
    inputs vs. all final outputs, intermediates dropped) or from explicit
    measure lists.
    """
    if topology is not None:
        topology.validate_against(dataset)
        inputs = [m for p in topology.processes for m in p.exogenous_inputs]
        outputs = [m for p in topology.processes for m in p.final_outputs]
    if not inputs or not outputs:
        raise ValidationError("black-box evaluation needs >= 1 input and >= 1 output measure")
    o = dataset.index_of(dmu)
    X = dataset.matrix(inputs)
    Y = dataset.matrix(outputs)
    n = dataset.n_dmus
    nv = 2 + n
    t1, t2, lam = 0, 1, 2
    rows = _Rows(nv)
    for i in range(X.shape[1]):
        rows.add({t1: -X[o, i], **{lam + j: X[j, i] for j in range(n)}}, "<=")
    for r in range(Y.shape[1]):
        rows.add({t2: -Y[o, r], **{lam + j: Y[j, r] for j in range(n)}}, ">=")
    rows.add({lam + j: 1.0 for j in range(n)}, "=", 1.0)
    c = np.zeros(nv)
    c[t2], c[t1] = 1.0, -1.0
    sol = _solve(LpProblem("maximize", c, rows.rows), f"black-box evaluation of {dmu!r}")
    return MpssResult(
        scope=BLACK_BOX,
        dmu=str(dmu),
        score=sol.objective_value,
        scale_factors={"inputs": sol.variable_values[t1], "outputs": sol.variable_values[t2]},
        reference_weights={"system": sol.variable_values[lam:lam + n]},
    )


def _layout(n: int, n_mid: int):
    """Variable offsets shared by the two-stage system models."""
    t1s1, t2s1, t1s2, t2s2 = 0, 1, 2, 3
    lam1 = 4
    lam2 = 4 + n
    zt = 4 + 2 * n
    nv = zt + n_mid
    return t1s1, t2s1, t1s2, t2s2, lam1, lam2, zt, nv


def _system_rows(parts, o, n, *, radial: bool, rows: _Rows, idx) -> None:
    """Constraint block shared by the system, stage-1 and stage-2 models."""
    t1s1, t2s1, t1s2, t2s2, lam1, lam2, zt, _ = idx
    X1, Z, Y1, X2, Y2 = parts["X1"], parts["Z"], parts["Y1"], parts["X2"], parts["Y2"]
    for i in range(X1.shape[1]):
        rows.add({t1s1: -X1[o, i], **{lam1 + j: X1[j, i] for j in range(n)}}, "<=")
    for d in range(Z.shape[1]):
        if radial:
            rows.add({t2s1: -Z[o, d], **{lam1 + j: Z[j, d] for j in range(n)}}, ">=")
            rows.add({t1s2: -Z[o, d], **{lam2 + j: Z[j, d] for j in range(n)}}, "<=")
        else:
            rows.add({zt + d: -1.0, **{lam1 + j: Z[j, d] for j in range(n)}}, ">=")
            rows.add({zt + d: -1.0, **{lam2 + j: Z[j, d] for j in range(n)}}, "<=")
    for r in range(Y1.shape[1]):
        rows.add({t2s1: -Y1[o, r], **{lam1 + j: Y1[j, r] for j in range(n)}}, ">=")
    for i in range(X2.shape[1]):
        rows.add({t1s2: -X2[o, i], **{lam2 + j: X2[j, i] for j in range(n)}}, "<=")
    for r in range(Y2.shape[1]):
        rows.add({t2s2: -Y2[o, r], **{lam2 + j: Y2[j, r] for j in range(n)}}, ">=")
    rows.add({lam1 + j: 1.0 for j in range(n)}, "=", 1.0)
    rows.add({lam2 + j: 1.0 for j in range(n)}, "=", 1.0)


def _result_from(sol: LpSolution, scope, dmu, parts, n, idx, *, with_intermediates=False):
    t1s1, t2s1, t1s2, t2s2, lam1, lam2, zt, _ = idx
    x = sol.variable_values
    intermediates = None
    unique = None
    if with_intermediates:
        mids = parts["mids"]
        intermediates = {m: float(x[zt + d]) for d, m in enumerate(mids)}
        unique = not any(
            not sol.basic[zt + d] and abs(sol.reduced_costs[zt + d]) <= 1e-9
            for d in range(len(mids))
        )
    return MpssResult(
        scope=scope,
        dmu=str(dmu),
        score=sol.objective_value,
        scale_factors={
            "stage1_inputs": float(x[t1s1]),
            "stage1_outputs": float(x[t2s1]),
            "stage2_inputs": float(x[t1s2]),
            "stage2_outputs": float(x[t2s2]),
        },
        reference_weights={
            "stage1": x[lam1:lam1 + n],
            "stage2": x[lam2:lam2 + n],
        },
        optimal_intermediates=intermediates,
        intermediates_unique=unique,
    )


def network_mpss_variable(dataset: Dataset, topology: NetworkTopology, dmu: str) -> MpssResult:
    """System score with the intermediates as free target levels.

    Solves for the stage intensity vectors and a new level for every
    intermediate measure: stage 1 must supply at least the target, stage 2
    may consume at most the target.  The optimal targets are reported as
    ``optimal_intermediates``; they are generally not unique.
    """
    parts = _two_stage_parts(dataset, topology)
    o = dataset.index_of(dmu)
    n = dataset.n_dmus
    idx = _layout(n, len(parts["mids"]))
    rows = _Rows(idx[-1])
    _system_rows(parts, o, n, radial=False, rows=rows, idx=idx)
    c = np.zeros(idx[-1])
    c[idx[3]], c[idx[0]] = 1.0, -1.0  # stage-2 output expansion minus stage-1 input contraction
    sol = _solve(LpProblem("maximize", c, rows.rows), f"system evaluation of {dmu!r}")
    return _result_from(sol, SYSTEM_VARIABLE, dmu, parts, n, idx, with_intermediates=True)


def network_mpss_radial(dataset: Dataset, topology: NetworkTopology, dmu: str) -> MpssResult:
    """System score with radially adjusted intermediates.

    The stage-1 output factor scales the DMU's own intermediate and final
    levels together; the stage-2 input factor scales its intermediate and
    exogenous input levels together.
    """
    parts = _two_stage_parts(dataset, topology)
    o = dataset.index_of(dmu)
    n = dataset.n_dmus
    idx = _layout(n, 0)
    rows = _Rows(idx[-1])
    _system_rows(parts, o, n, radial=True, rows=rows, idx=idx)
    c = np.zeros(idx[-1])
    c[idx[3]], c[idx[0]] = 1.0, -1.0
    sol = _solve(LpProblem("maximize", c, rows.rows), f"radial system evaluation of {dmu!r}")
    return _result_from(sol, SYSTEM_RADIAL, dmu, parts, n, idx)


def stage_mpss(
    dataset: Dataset,
    topology: NetworkTopology,
    dmu: str,
    system_score: float,
    stage: int,
    stage1_score: float | None = None,
    band: float = FIXING_BAND,
) -> MpssResult:
    """Lexicographic stage score under a pinned system score.

    Stage 1 re-optimises its own gap while the radial system score stays
    within ``band`` of ``system_score``; stage 2 additionally pins the
    stage-1 score (``stage1_score`` required).  The equalities are relaxed
    to two-sided bands because floating-point optima rarely re-satisfy an
    exact equality.
    """
    if stage not in (1, 2):
        raise ValidationError(f"stage must be 1 or 2, got {stage!r}")
    if stage == 2 and stage1_score is None:
        raise ValidationError("stage 2 needs the solved stage-1 score")
    parts = _two_stage_parts(dataset, topology)
    o = dataset.index_of(dmu)
    n = dataset.n_dmus
    idx = _layout(n, 0)
    t1s1, t2s1, t1s2, t2s2 = idx[:4]
    rows = _Rows(idx[-1])
    _system_rows(parts, o, n, radial=True, rows=rows, idx=idx)
    rows.add({t2s2: 1.0, t1s1: -1.0}, "<=", system_score + band)
    rows.add({t2s2: 1.0, t1s1: -1.0}, ">=", system_score - band)
    if stage == 2:
        rows.add({t2s1: 1.0, t1s1: -1.0}, "<=", stage1_score + band)
        rows.add({t2s1: 1.0, t1s1: -1.0}, ">=", stage1_score - band)
    c = np.zeros(idx[-1])
    if stage == 1:
        c[t2s1], c[t1s1] = 1.0, -1.0
    else:
        c[t2s2], c[t1s2] = 1.0, -1.0
    prob = LpProblem("maximize", c, rows.rows)
    sol = solve_lp(prob)
    if sol.status != "optimal":
        raise SolverError(
            f"stage-{stage} evaluation of {dmu!r}: fixing band infeasible "
            "(system/stage scores do not belong to this dataset)"
        )
    return _result_from(sol, STAGE_1 if stage == 1 else STAGE_2, dmu, parts, n, idx)


def evaluate_stages(dataset: Dataset, topology: NetworkTopology, dmu: str, band: float = FIXING_BAND):
    """Radial system solve followed by the two pinned stage solves."""
    system = network_mpss_radial(dataset, topology, dmu)
    first = stage_mpss(dataset, topology, dmu, system.score, 1, band=band)
    second = stage_mpss(dataset, topology, dmu, system.score, 2, first.score, band=band)
    return system, first, second
