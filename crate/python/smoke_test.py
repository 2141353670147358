"""Smoke test for the cubic_periods_py extension.

Build and install first:

    pip install --no-build-isolation -e crates/python
"""

import json
import sys

import cubic_periods_py as cp


def check(cond, msg):
    if not cond:
        print(f"FAIL: {msg}")
        sys.exit(1)
    print(f"ok    {msg}")


def main():
    c = cp.validate_conductor(819)
    check((c.kind, c.odd_primes, c.nu, c.mu, c.field_count) == ("wild", [7, 13], 2, 1, 4),
          "conductor 819 is wild with primes 7, 13")

    try:
        cp.validate_conductor(99)
    except ValueError as e:
        check("11" in str(e), "conductor 99 rejected: " + str(e))
    else:
        check(False, "conductor 99 rejected")

    check(cp.representations(819) == [(51, 5), (24, 10), (-3, 11), (-57, 1)],
          "representations of 819")

    polys = [cp.format_cubic(p) for p in cp.period_polys(819)]
    check(sorted(polys) == sorted(["X^3 - 273X + 1729", "X^3 - 273X - 1547",
                                   "X^3 - 273X - 728", "X^3 - 273X + 91"]),
          "period polynomials of 819")

    check(cp.format_cubic(cp.shanks_poly(18, 5)) == "X^3 - (18/5)X^2 - (33/5)X - 1",
          "Shanks cubic for n = 18/5")
    check(cp.substitute_affine(["1", "0", "-3", "1"], "1", "1") == ["1/1", "3/1", "0/1", "-1/1"],
          "substitution X -> X + 1")

    fields = cp.match_fields(819)
    check(len(fields) == 4 and all(f.all_pass() for f in fields), "all 819 fields verify")
    for f in fields:
        dist = max(abs(a - b) for a, b in zip(sorted(f.periods), sorted(f.predicted_periods)))
        check(dist < 1e-6, f"periods of (M, N) = ({f.m}, {f.n}) follow the Shanks roots ({dist:.1e})")

    try:
        cp.match_fields(819, 1e-30)
    except cp.VerificationError as e:
        check("integer" in str(e), "impossible tolerance raises VerificationError")
    else:
        check(False, "impossible tolerance raises VerificationError")

    report = json.loads(cp.verify_json(7))
    check(report["kind"] == "tame" and all(report["fields"][0]["verdicts"].values()),
          "verify_json for conductor 7")

    check(len(cp.unit_list(True)) == 12 and len(cp.unit_list(False)) == 6, "group ring unit lists")
    check("X^3 - 273X + 1729" in cp.table_markdown(), "table renders")
    print("smoke test passed")


if __name__ == "__main__":
    main()
