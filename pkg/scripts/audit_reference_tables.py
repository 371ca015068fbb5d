"""One-off audit of the bundled reference tables' internal arithmetic.

Run from the repo root:  python scripts/audit_reference_tables.py
"""
import csv
import math
from decimal import Decimal
from pathlib import Path

from scipy import stats

FIX = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def read(name):
    with open(FIX / name, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def round_half_away(x):
    return math.floor(x + 0.5) if x >= 0 else math.ceil(x - 0.5)


def main():
    # --- Kruskal-Wallis reproduction ---
    rd = read("rdvc_mpss_reference.csv")
    for label, col in [("operation", "operation"), ("rd", "rd"), ("marketability", "marketability")]:
        g14 = [float(r[f"{col}_2014"]) for r in rd]
        g15 = [float(r[f"{col}_2015"]) for r in rd]
        h, p = stats.kruskal(g14, g15)
        print(f"KW {label:14s} H={h:.4f} p={p:.4f}")

    # --- decomposition identities at 5e-4 (Decimal arithmetic) ---
    ins = read("insurance_mpss_reference.csv")
    tol = Decimal("0.0005")
    for r in ins:
        p1, p2 = Decimal(r["process1"]), Decimal(r["process2"])
        s1, s2 = Decimal(r["stage1"]), Decimal(r["stage2"])
        tan, net = Decimal(r["tandem"]), Decimal(r["network"])
        half = Decimal("0.5")
        checks = {
            "p1+p2=net": abs(p1 + p2 - net),
            "w*p1=s1": abs(half * p1 - s1),
            "w*p2=s2": abs(half * p2 - s2),
            "s1+s2=tan": abs(half * p1 + half * p2 - tan),
        }
        for k, d in checks.items():
            if d > tol:
                print(f"Table1 dmu {r['dmu']}: {k} off by {d}")

    # --- profitability additivity at 2e-3 ---
    for r in rd:
        for yr in ("2014", "2015"):
            d = abs(
                Decimal(r[f"operation_{yr}"]) + Decimal(r[f"rd_{yr}"]) - Decimal(r[f"profitability_{yr}"])
            )
            if d > Decimal("0.002"):
                print(f"Table5 region {r['region']} {yr}: additivity off by {d}")

    # --- gap rounding ---
    tg = read("intermediate_targets_2015.csv")
    bad = 0
    for r in tg:
        for m in ("sales", "patents"):
            comp = float(r[f"{m}_target"]) - float(r[f"{m}_current"])
            if round_half_away(comp) != round_half_away(float(r[f"{m}_gap"])):
                print(
                    f"Table8 region {r['region']} {m}: computed {comp:.3f} -> "
                    f"{round_half_away(comp)} vs printed {r[f'{m}_gap']}"
                )
                bad += 1
    print(f"Table8 mismatched gap cells: {bad}/60")


if __name__ == "__main__":
    main()
