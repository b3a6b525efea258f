"""Smoke test for the cutplane Python bindings.

Build and install first:  pip install --no-build-isolation -e crates/python
"""

import math
import os
import tempfile

import cutplane_py as cp


def close(a, b, tol):
    assert abs(a - b) <= tol, f"{a} vs {b}"


def main():
    # special functions against closed forms
    z = math.cosh(1.0)
    close(cp.legendre_q(0.0, 1.0), 0.5 * math.log((z + 1) / (z - 1)), 1e-12)
    close(cp.legendre_p(2, 0.3), 0.5 * (3 * 0.09 - 1), 1e-15)
    close(cp.laguerre(1, 0.7), 0.3, 1e-15)
    try:
        cp.GridFunction("w", [0.0, 2.0, 1.0], [0.0, 0.0, 0.0])
    except cp.CutplaneError as e:
        assert str(e).startswith("[E_INVALID_INPUT]"), e
    else:
        raise AssertionError("an unsorted grid was accepted")

    # Hausdorff check on exact a_n = 1/(n+1)
    seq = cp.CoefficientSequence.from_fractions([(1, n + 1) for n in range(65)])
    assert seq.exact and len(seq) == 65
    report = seq.hausdorff_check(10.0)
    assert report["verdict"] == "pass", report["verdict"]
    close(report["sup"], 1.0, 1e-10)

    # ã(λ) = 1/(λ+1) inverts to F̂(w) = e^{-w}
    line = cp.LineSamples.from_callable(0.0, 200.0, 0.05, lambda lam: 1 / (lam + 1))
    (hat,) = line.jump_hat([1.0])
    close(hat, math.exp(-1.0), 1e-5)

    # forward transform of a sampled F̂ = e^{-w}
    w = [0.005 * i for i in range(8001)]
    fhat = cp.GridFunction("w", w, [math.exp(-x) for x in w])
    close(fhat.atilde(1.0, 2.0), 1 / complex(2.0, 2.0), 1e-6)

    # horocycle integral of F = 1 is the horocycle length
    v = [0.01 * i for i in range(401)]
    one = cp.GridFunction("v", v, [1.0] * len(v))
    close(one.horocycle_radon(1.0), 2 * math.sqrt(2 * math.exp(-1) * (z - 1)), 1e-8)

    # Pollaczek reconstruction for a_n = 1/(n+1)^3
    cubed = cp.CoefficientSequence([(n + 1) ** -3 for n in range(201)], p=2)
    c = cubed.pollaczek(16)
    assert len(c) == 17 and all(math.isfinite(abs(x)) for x in c)
    base = cubed.reconstruct_base([0.5, 1.0], 16)
    assert all(abs(x.imag) < 1e-6 for x in base), base

    # command line entry point
    with tempfile.TemporaryDirectory() as out:
        assert cp.cli(["fixture", "inv-n", "--out", out]) == 0
        assert os.path.exists(os.path.join(out, "inv-n.csv"))
        assert cp.cli(["fixture", "nope", "--out", out]) == 2
        assert cp.CoefficientSequence.read(os.path.join(out, "inv-n.csv")).exact

    (crit,) = cp.run_verify(1)
    assert crit["passed"], crit

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
