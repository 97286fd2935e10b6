"""Replay every bundled worst-case construction and check its claims.

Each generator ships an expected map (exact values, one-sided bounds,
and asymptotic labels). validate_instance recomputes the measurable ones
with the package's own algorithms.
"""

from testscore import GENERATORS, validate_instance

for name, gen in GENERATORS.items():
    inst = gen()
    report = validate_instance(inst)
    flag = "ok" if report.ok else "FAIL"
    print(f"{name:<16} {flag}   {inst.citation}")
    for row in report.rows:
        if row.measured is None:
            print(f"    {row.name:<32} label    {row.expected:.4f}")
            continue
        rel = {"eq": "=", "lower_bound": ">=", "upper_bound": "<="}[row.kind]
        print(f"    {row.name:<32} measured {row.measured:.4f} {rel} {row.expected:.4f}")
    print()
