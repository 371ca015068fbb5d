"""End-to-end CLI demo on the bundled 24-insurer dataset.

Writes the data/topology pair to a temp directory and drives the
command-line tool through validation, descriptive statistics, black-box
scale-size scores and the free-intermediate system scores.
"""

import json
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
FIXTURE = ROOT / "tests" / "fixtures" / "insurers_24.csv"

TOPOLOGY = {
    "shape": "two_stage_general",
    "processes": [
        {
            "name": "service", "stage": 1,
            "exogenous_inputs": ["service_expense"],
            "intermediate_outputs": ["direct_premiums", "reinsurance_premiums"],
            "intermediate_inputs": [],
            "final_outputs": ["underwriting_profit"],
            "importance_weight": 1.0,
        },
        {
            "name": "invest", "stage": 2,
            "exogenous_inputs": ["investment_expense"],
            "intermediate_outputs": [],
            "intermediate_inputs": ["direct_premiums", "reinsurance_premiums"],
            "final_outputs": ["investment_profit"],
            "importance_weight": 1.0,
        },
    ],
    "links": [
        {"from": "service", "to": "invest", "measure": "direct_premiums"},
        {"from": "service", "to": "invest", "measure": "reinsurance_premiums"},
    ],
}


def main():
    with tempfile.TemporaryDirectory() as tmp:
        data = Path(tmp) / "insurers.csv"
        topo = Path(tmp) / "insurers_topology.json"
        shutil.copy(FIXTURE, data)
        topo.write_text(json.dumps(TOPOLOGY, indent=2), encoding="utf-8")
        for argv in (
            ["validate", "--data", str(data), "--topology", str(topo)],
            ["summary", "--data", str(data)],
            ["blackbox-mpss", "--data", str(data), "--topology", str(topo)],
            ["network-mpss", "--data", str(data), "--topology", str(topo),
             "--intermediates", "variable"],
        ):
            print(f"\n$ dea-mpss {' '.join(argv)}")
            subprocess.run([sys.executable, "-m", "dea_mpss.cli", *argv], check=True)


if __name__ == "__main__":
    main()
