"""Smoke test for the indexfiber Python module.

Build and install the extension first, for example:

    pip install maturin
    maturin develop --release -m crates/py/Cargo.toml
"""

import json
import math

import indexfiber


def check(cond, msg):
    if not cond:
        raise AssertionError(msg)
    print("ok  ", msg)


def main():
    check(indexfiber.expected_counts(4, 3) == (2, 6), "generic counts for d=4, l=3")

    fiber = indexfiber.count([1, 1, 2], [1, 2, -3], seed=7)
    check((fiber.mp_count, fiber.mc_count) == (2, 6), "fiber over (1, 2, -3) on (1,1,2)")
    check(fiber.is_generic and fiber.exit_code == 0, "spectrum is generic")
    for coeffs in fiber.representatives:
        check(abs(coeffs[-1] - 1) < 1e-12 and abs(coeffs[-2]) < 1e-10, "representative is monic and centered")
    check(fiber.max_oracle_distance < 1e-7, "representatives reproduce the indices")

    report = json.loads(fiber.to_json())
    check(report["mc_count"] == 6 and len(report["representatives"]) == 6, "JSON report")

    roots = [s["coords"][0] / s["coords"][1] for s in fiber.solutions()]
    check(all(abs(abs(z) - math.sqrt(2)) < 1e-10 for z in roots), "solutions are (+-i sqrt 2 : 1)")

    psi = indexfiber.psi_system([1, 1, 2], [1, 2, -3])
    check(psi == [{(0, 2): 1 + 0j, (2, 0): 0.5 + 0j}], "psi_1 = (z1^2 + 2 z2^2) / 2")

    odd = indexfiber.count([1, 1, 1], [1, 1, -2])
    check(odd.mp_count == 1 and not odd.is_generic, "exceptional cubic")

    empty = indexfiber.count([1, 1, 1, 1], ["0", "0", "0", "0"])
    check(empty.mc_count == 0 and empty.exit_code == 2, "zero indices give an empty fiber")

    zetas = [0.3 + 0.2j, -1.1 + 0.5j, 0.0]
    idx = indexfiber.holomorphic_indices([1, 2, 2], zetas, 1.7 - 0.4j)
    check(abs(sum(idx)) < 1e-12, "indices sum to zero")
    rho, residues = indexfiber.recover_aux([1, 2, 2], idx, zetas)
    check(abs(rho - (1.7 - 0.4j)) < 1e-9 and len(residues[1]) == 2, "rho recovered from fixed points")

    check(indexfiber.roundtrip([1, 1, 2], seed=3), "roundtrip on (1,1,2)")
    check(all(passed for _, passed in indexfiber.selftest()), "selftest")

    try:
        indexfiber.count([1, 1, 2], [1, 2, 3])
    except ValueError:
        check(True, "non-zero index sum is rejected")
    else:
        raise AssertionError("expected ValueError")

    print("all checks passed")


if __name__ == "__main__":
    main()
