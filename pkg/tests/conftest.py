import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent))

from dea_mpss.data import Dataset, Link, NetworkTopology, ProcessSpec

FIXTURES = Path(__file__).resolve().parent / "fixtures"

# -- acceptance reporting ----------------------------------------------------

ACCEPTANCE_RESULTS: dict = {}


def record_acceptance(cid: str, label: str, passed, detail: str = "") -> None:
    """passed: True, False, or None for a documented skip."""
    ACCEPTANCE_RESULTS[cid] = (label, passed, detail)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(ACCEPTANCE_RESULTS):
        label, passed, detail = ACCEPTANCE_RESULTS[cid]
        status = {True: "PASS", False: "FAIL", None: "SKIP"}[passed]
        line = f"[{status}] {cid}: {label}"
        if detail:
            line += f" -- {detail}"
        terminalreporter.write_line(line)

# -- shared builders -------------------------------------------------------


def two_stage_topology(m1=1, p=1, s1=1, m2=1, s2=1):
    """General two-stage layout with generated measure names."""
    x1 = [f"in1_{i}" for i in range(m1)]
    z = [f"mid_{d}" for d in range(p)]
    y1 = [f"out1_{r}" for r in range(s1)]
    x2 = [f"in2_{i}" for i in range(m2)]
    y2 = [f"out2_{r}" for r in range(s2)]
    procs = [
        ProcessSpec("upstream", 1, exogenous_inputs=x1, intermediate_outputs=z,
                    final_outputs=y1),
        ProcessSpec("downstream", 2, exogenous_inputs=x2, intermediate_inputs=z,
                    final_outputs=y2),
    ]
    links = [Link("upstream", "downstream", d) for d in z]
    return NetworkTopology(procs, links, "two_stage_general")


def chain_topology(m=1, p=1, k=1, e=1, s=1):
    """Two parallel stage-1 processes feeding one stage-2 process."""
    xo = [f"op_in_{i}" for i in range(m)]
    zo = [f"op_mid_{d}" for d in range(p)]
    xr = [f"rd_in_{i}" for i in range(k)]
    zr = [f"rd_mid_{d}" for d in range(e)]
    y = [f"final_{r}" for r in range(s)]
    procs = [
        ProcessSpec("operation", 1, exogenous_inputs=xo, intermediate_outputs=zo,
                    importance_weight=0.5),
        ProcessSpec("research", 1, exogenous_inputs=xr, intermediate_outputs=zr,
                    importance_weight=0.5),
        ProcessSpec("market", 2, intermediate_inputs=zo + zr, final_outputs=y),
    ]
    links = [Link("operation", "market", d) for d in zo]
    links += [Link("research", "market", d) for d in zr]
    return NetworkTopology(procs, links, "series_parallel_chain")


def dataset_for(topology, rows):
    """Dataset over the topology's measures; ``rows`` is per-DMU value lists."""
    names = topology.referenced_measures()
    ids = [f"u{j + 1}" for j in range(len(rows))]
    measures = {n: [row[i] for row in rows] for i, n in enumerate(names)}
    return Dataset(ids, measures)


def random_dataset(rng: np.random.Generator, topology, n_dmus: int) -> Dataset:
    names = topology.referenced_measures()
    rows = rng.integers(1, 10, size=(n_dmus, len(names))).astype(float)
    return dataset_for(topology, rows.tolist())
