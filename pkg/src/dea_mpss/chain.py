"""Efficiency and scale-size models for the series-parallel value chain.

The chain has two parallel stage-1 processes (called operation and
research below, after the declaration order in the topology) feeding one
stage-2 process through intermediate measures.  One solve produces all
stage factors at once:

efficiency (factors bounded)::

    min  w1*tO + w2*tR - w3*tM
    s.t. operation:  sum_j l_j  XO_ij <= tO XO_io,   sum_j l_j  ZO_dj >= ZO~_d
         research:   sum_j m_j  XR_kj <= tR XR_ko,   sum_j m_j  ZR_ej >= ZR~_e
         market:     sum_j f_j  ZO_dj <= ZO~_d,      sum_j f_j  ZR_ej <= ZR~_e
                     sum_j f_j  Y_rj  >= tM Y_ro
         each intensity vector sums to 1;  tO <= 1, tR <= 1, tM >= 1

scale size (same constraints, factors merely nonnegative)::

    max  w1*tM - w2*tO - w3*tR

The ZO~/ZR~ values are free target levels for the intermediates; the
scale-size optimum reports them as the appropriate levels for target
setting.  The per-stage split pins the solved chain score inside a narrow
band and re-optimises radial stage factors.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .data import SERIES_PARALLEL_CHAIN, Dataset, NetworkTopology
from .errors import SolverError, UnsupportedTopologyError, ValidationError
from .lp import LpProblem, solve_lp
from .network import EPS_MPSS, FIXING_BAND, _Rows, _solve

DOWN = "↓"
UP = "↑"
MAINTAIN = "maintain"


@dataclass(frozen=True)
class ChainWeights:
    """Preference weights over the chain objectives; all must be >= 0.

    ``(1, 1, 1)`` follows the usual equal-importance convention.  The
    alternative ``(1, 0.5, 0.5)`` normalises the two parallel contraction
    factors so that a DMU evaluated against itself scores exactly zero.
    """

    w1: float = 1.0
    w2: float = 1.0
    w3: float = 1.0

    def __post_init__(self):
        if self.w1 < 0 or self.w2 < 0 or self.w3 < 0:
            raise ValidationError("chain weights must be nonnegative")


SELF_NORMALIZED_WEIGHTS = ChainWeights(1.0, 0.5, 0.5)


def _chain_parts(dataset: Dataset, topology: NetworkTopology):
    if topology.shape_tag != SERIES_PARALLEL_CHAIN:
        raise UnsupportedTopologyError(
            f"unsupported topology: expected {SERIES_PARALLEL_CHAIN!r}, got {topology.shape_tag!r}"
        )
    topology.validate_against(dataset)
    operation, research = topology.stage_processes(1)
    market = topology.stage_processes(2)[0]
    return {
        "XO": dataset.matrix(operation.exogenous_inputs),
        "ZO": dataset.matrix(operation.intermediate_outputs),
        "XR": dataset.matrix(research.exogenous_inputs),
        "ZR": dataset.matrix(research.intermediate_outputs),
        "Y": dataset.matrix(market.final_outputs),
        "zo_names": operation.intermediate_outputs,
        "zr_names": research.intermediate_outputs,
    }


def _chain_layout(n: int, p: int, e: int):
    tO, tR, tM = 0, 1, 2
    lam, mu, phi = 3, 3 + n, 3 + 2 * n
    zo, zr = 3 + 3 * n, 3 + 3 * n + p
    return tO, tR, tM, lam, mu, phi, zo, zr, zr + e


def _chain_rows(parts, o: int, n: int, idx) -> _Rows:
    tO, tR, tM, lam, mu, phi, zo, zr, nv = idx
    XO, ZO, XR, ZR, Y = parts["XO"], parts["ZO"], parts["XR"], parts["ZR"], parts["Y"]
    rows = _Rows(nv)
    for i in range(XO.shape[1]):
        rows.add({tO: -XO[o, i], **{lam + j: XO[j, i] for j in range(n)}}, "<=")
    for d in range(ZO.shape[1]):
        rows.add({zo + d: -1.0, **{lam + j: ZO[j, d] for j in range(n)}}, ">=")
    for k in range(XR.shape[1]):
        rows.add({tR: -XR[o, k], **{mu + j: XR[j, k] for j in range(n)}}, "<=")
    for d in range(ZR.shape[1]):
        rows.add({zr + d: -1.0, **{mu + j: ZR[j, d] for j in range(n)}}, ">=")
    for d in range(ZO.shape[1]):
        rows.add({zo + d: -1.0, **{phi + j: ZO[j, d] for j in range(n)}}, "<=")
    for d in range(ZR.shape[1]):
        rows.add({zr + d: -1.0, **{phi + j: ZR[j, d] for j in range(n)}}, "<=")
    for r in range(Y.shape[1]):
        rows.add({tM: -Y[o, r], **{phi + j: Y[j, r] for j in range(n)}}, ">=")
    for block in (lam, mu, phi):
        rows.add({block + j: 1.0 for j in range(n)}, "=", 1.0)
    return rows


def _intermediates(parts, x, idx) -> dict:
    _, _, _, _, _, _, zo, zr, _ = idx
    out = {m: float(x[zo + d]) for d, m in enumerate(parts["zo_names"])}
    out.update({m: float(x[zr + d]) for d, m in enumerate(parts["zr_names"])})
    return out


@dataclass(frozen=True)
class ChainEfficiency:
    """One-solve efficiency reading for the whole chain.

    ``marketability`` is the reciprocal of the market expansion factor, so
    all three reported efficiencies live in (0, 1].
    """

    dmu: str
    objective: float
    weights: ChainWeights
    theta_operation: float
    theta_rd: float
    theta_market: float
    marketability: float
    intermediates: Mapping[str, float]
    reference_weights: Mapping[str, np.ndarray]

    def is_efficient(self, eps: float = EPS_MPSS) -> bool:
        ideal = self.weights.w1 + self.weights.w2 - self.weights.w3
        return self.objective >= ideal - eps


def chain_efficiency(
    dataset: Dataset,
    topology: NetworkTopology,
    dmu: str,
    weights: ChainWeights = ChainWeights(),
) -> ChainEfficiency:
    """Operation, research and marketability efficiencies in one solve."""
    parts = _chain_parts(dataset, topology)
    o = dataset.index_of(dmu)
    n = dataset.n_dmus
    idx = _chain_layout(n, len(parts["zo_names"]), len(parts["zr_names"]))
    tO, tR, tM = idx[:3]
    nv = idx[-1]
    rows = _chain_rows(parts, o, n, idx)
    rows.add({tO: 1.0}, "<=", 1.0)
    rows.add({tR: 1.0}, "<=", 1.0)
    rows.add({tM: 1.0}, ">=", 1.0)
    c = np.zeros(nv)
    c[tO], c[tR], c[tM] = weights.w1, weights.w2, -weights.w3
    sol = _solve(LpProblem("minimize", c, rows.rows), f"chain efficiency of {dmu!r}")
    x = sol.variable_values
    lam, mu, phi = idx[3], idx[4], idx[5]
    return ChainEfficiency(
        dmu=str(dmu),
        objective=sol.objective_value,
        weights=weights,
        theta_operation=float(x[tO]),
        theta_rd=float(x[tR]),
        theta_market=float(x[tM]),
        marketability=1.0 / float(x[tM]),
        intermediates=_intermediates(parts, x, idx),
        reference_weights={
            "operation": x[lam:lam + n],
            "research": x[mu:mu + n],
            "market": x[phi:phi + n],
        },
    )


@dataclass(frozen=True)
class ChainMpss:
    """Scale-size score of the whole chain plus the appropriate targets."""

    dmu: str
    score: float
    weights: ChainWeights
    theta_operation: float
    theta_rd: float
    theta_market: float
    intermediates: Mapping[str, float]
    intermediates_unique: bool
    reference_weights: Mapping[str, np.ndarray]

    def is_mpss(self, eps: float = EPS_MPSS) -> bool:
        return abs(self.score) <= eps


def chain_mpss(
    dataset: Dataset,
    topology: NetworkTopology,
    dmu: str,
    weights: ChainWeights = ChainWeights(),
) -> ChainMpss:
    """Chain scale-size score; zero means most productive scale size."""
    parts = _chain_parts(dataset, topology)
    o = dataset.index_of(dmu)
    n = dataset.n_dmus
    idx = _chain_layout(n, len(parts["zo_names"]), len(parts["zr_names"]))
    tO, tR, tM = idx[:3]
    nv = idx[-1]
    rows = _chain_rows(parts, o, n, idx)
    c = np.zeros(nv)
    c[tM], c[tO], c[tR] = weights.w1, -weights.w2, -weights.w3
    sol = _solve(LpProblem("maximize", c, rows.rows), f"chain scale size of {dmu!r}")
    x = sol.variable_values
    zo, zr = idx[6], idx[7]
    n_mid = len(parts["zo_names"]) + len(parts["zr_names"])
    unique = not any(
        not sol.basic[zo + d] and abs(sol.reduced_costs[zo + d]) <= 1e-9
        for d in range(n_mid)
    )
    lam, mu, phi = idx[3], idx[4], idx[5]
    return ChainMpss(
        dmu=str(dmu),
        score=sol.objective_value,
        weights=weights,
        theta_operation=float(x[tO]),
        theta_rd=float(x[tR]),
        theta_market=float(x[tM]),
        intermediates=_intermediates(parts, x, idx),
        intermediates_unique=unique,
        reference_weights={
            "operation": x[lam:lam + n],
            "research": x[mu:mu + n],
            "market": x[phi:phi + n],
        },
    )


@dataclass(frozen=True)
class StageFactors:
    """Radial stage factors under a pinned chain score.

    ``operation_mpss`` and ``rd_mpss`` decompose the profitability stage;
    the marketability share is the remainder of the chain score, since the
    model pins ``theta_market - theta1 - theta3`` to the chain score.
    """

    dmu: str
    chain_score: float
    theta1: float
    theta2: float
    theta3: float
    theta4: float
    theta_market: float

    @property
    def operation_mpss(self) -> float:
        return self.theta2 - self.theta1

    @property
    def rd_mpss(self) -> float:
        return self.theta4 - self.theta3

    @property
    def profitability_mpss(self) -> float:
        return self.operation_mpss + self.rd_mpss

    @property
    def marketability_mpss(self) -> float:
        return self.chain_score - self.profitability_mpss


def profitability_mpss(
    dataset: Dataset,
    topology: NetworkTopology,
    dmu: str,
    chain_score: float,
    band: float = FIXING_BAND,
) -> StageFactors:
    """Stage-1 scale-size split with the chain score held fixed.

    The intermediates are adjusted radially here (the operation target is
    ``theta2`` times the DMU's own level, the research target ``theta4``
    times), so with several intermediates per branch the pinned chain
    score may be unreachable; that raises a solver error rather than
    silently drifting off the band.
    """
    parts = _chain_parts(dataset, topology)
    o = dataset.index_of(dmu)
    n = dataset.n_dmus
    XO, ZO, XR, ZR, Y = parts["XO"], parts["ZO"], parts["XR"], parts["ZR"], parts["Y"]
    # layout: [t1, t2, t3, t4, tM, lam(n), mu(n), phi(n)]
    t1, t2, t3, t4, tM = range(5)
    lam, mu, phi = 5, 5 + n, 5 + 2 * n
    nv = 5 + 3 * n
    rows = _Rows(nv)
    for i in range(XO.shape[1]):
        rows.add({t1: -XO[o, i], **{lam + j: XO[j, i] for j in range(n)}}, "<=")
    for d in range(ZO.shape[1]):
        rows.add({t2: -ZO[o, d], **{lam + j: ZO[j, d] for j in range(n)}}, ">=")
    for k in range(XR.shape[1]):
        rows.add({t3: -XR[o, k], **{mu + j: XR[j, k] for j in range(n)}}, "<=")
    for d in range(ZR.shape[1]):
        rows.add({t4: -ZR[o, d], **{mu + j: ZR[j, d] for j in range(n)}}, ">=")
    for d in range(ZO.shape[1]):
        rows.add({t2: -ZO[o, d], **{phi + j: ZO[j, d] for j in range(n)}}, "<=")
    for d in range(ZR.shape[1]):
        rows.add({t4: -ZR[o, d], **{phi + j: ZR[j, d] for j in range(n)}}, "<=")
    for r in range(Y.shape[1]):
        rows.add({tM: -Y[o, r], **{phi + j: Y[j, r] for j in range(n)}}, ">=")
    for block in (lam, mu, phi):
        rows.add({block + j: 1.0 for j in range(n)}, "=", 1.0)
    rows.add({tM: 1.0, t1: -1.0, t3: -1.0}, "<=", chain_score + band)
    rows.add({tM: 1.0, t1: -1.0, t3: -1.0}, ">=", chain_score - band)
    c = np.zeros(nv)
    c[t2], c[t1], c[t4], c[t3] = 1.0, -1.0, 1.0, -1.0
    sol = solve_lp(LpProblem("maximize", c, rows.rows))
    if sol.status != "optimal":
        raise SolverError(
            f"profitability split of {dmu!r}: fixing band infeasible at chain score "
            f"{chain_score!r} (radial intermediates cannot reach it)"
        )
    x = sol.variable_values
    return StageFactors(
        dmu=str(dmu),
        chain_score=float(chain_score),
        theta1=float(x[t1]),
        theta2=float(x[t2]),
        theta3=float(x[t3]),
        theta4=float(x[t4]),
        theta_market=float(x[tM]),
    )


@dataclass(frozen=True)
class TargetRow:
    measure: str
    current: float
    appropriate: float
    gap: float
    direction: str


@dataclass(frozen=True)
class TargetReport:
    """Current vs. appropriate intermediate levels with a strategy label."""

    rows: tuple
    strategy: str
    dmu: str | None = None


def classify_strategy(
    current: Mapping[str, float],
    appropriate: Mapping[str, float],
    *,
    eps_rel: float = 1e-6,
    dmu: str | None = None,
) -> TargetReport:
    """Per-measure gaps and the joined improvement-strategy label.

    gap = appropriate - current.  A gap within ``eps_rel * |current|`` of
    zero reads "maintain" and is omitted from the label; if every measure
    holds, the label itself is "maintain".  Measures are reported in the
    iteration order of ``current``.
    """
    if set(current) != set(appropriate):
        missing = set(current) ^ set(appropriate)
        raise ValidationError(f"current/appropriate key mismatch: {sorted(missing)}")
    rows = []
    moves = []
    for measure, now in current.items():
        target = float(appropriate[measure])
        now = float(now)
        gap = target - now
        threshold = eps_rel * abs(now)
        if gap < -threshold:
            direction = DOWN
        elif gap > threshold:
            direction = UP
        else:
            direction = MAINTAIN
        rows.append(TargetRow(measure, now, target, gap, direction))
        if direction != MAINTAIN:
            moves.append(f"{measure}{direction}")
    return TargetReport(tuple(rows), ", ".join(moves) if moves else MAINTAIN, dmu)


def intermediate_targets(
    dataset: Dataset,
    topology: NetworkTopology,
    dmu: str,
    weights: ChainWeights = ChainWeights(),
) -> TargetReport:
    """Appropriate intermediate levels from the chain scale-size solve."""
    result = chain_mpss(dataset, topology, dmu, weights)
    order = topology.intermediate_measures()
    current = {m: dataset.value(dmu, m) for m in order}
    appropriate = {m: result.intermediates[m] for m in order}
    return classify_strategy(current, appropriate, dmu=str(dmu))
