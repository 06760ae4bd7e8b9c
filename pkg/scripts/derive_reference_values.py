#!/usr/bin/env python3
"""Regenerate the frozen reference constants used in tests/test_analytic.py.

Every closed-form expression is re-evaluated with 40-digit mpmath
arithmetic, independently of the float64 implementation in
vortexzbw.analytic, and printed both at full precision and as the
float64 literal that the tests freeze.  Run it after any change to the
closed-form code and diff the output against the constants in the test
module.

    python3 scripts/derive_reference_values.py
"""

import math

try:
    import mpmath as mp
except ImportError:
    raise SystemExit("mpmath is required: pip install mpmath (or the [test] extra)")

mp.mp.dps = 40


def closed_form(ell, w0, k_r):
    """(sqrt(2 pi)/w0) e^{-X} [(1/2+X) I_ell(X) + (X/2)(I_{|ell-1|}(X)
    + I_{ell+1}(X))] / I_ell(2X), with X = (w0 k_r)^2 / 8."""
    w0 = mp.mpf(w0)
    X = (w0 * mp.mpf(k_r)) ** 2 / 8
    bracket = (mp.mpf(1) / 2 + X) * mp.besseli(ell, X) + X / 2 * (
        mp.besseli(abs(ell - 1), X) + mp.besseli(ell + 1, X)
    )
    return mp.sqrt(2 * mp.pi) / w0 * mp.e ** (-X) * bracket / mp.besseli(ell, 2 * X)


def small_ring(ell, w0):
    """Limit of the closed form as k_r -> 0: sqrt(2 pi)(ell + 1/2)/(2^ell w0)."""
    return mp.sqrt(2 * mp.pi) * (mp.mpf(ell) + mp.mpf(1) / 2) / (mp.mpf(2) ** ell * mp.mpf(w0))


def gaussian_limit(ell, w0):
    """Mean transverse momentum of the pure vortex Gaussian:
    (sqrt(2)/w0) Gamma(ell + 3/2)/Gamma(ell + 1)."""
    return mp.sqrt(2) / mp.mpf(w0) * mp.gamma(mp.mpf(ell) + mp.mpf(3) / 2) / mp.gamma(ell + 1)


def large_ell(ell, w0):
    """High-charge expansion sqrt(2 ell)/w0 (1 + 3/(8 ell))."""
    ell = mp.mpf(ell)
    return mp.sqrt(2 * ell) / mp.mpf(w0) * (1 + 3 / (8 * ell))


def gamma_ratio_enhancement(ell):
    """Gamma(ell + 3/2) / (Gamma(ell + 1) Gamma(3/2))."""
    return mp.gamma(mp.mpf(ell) + mp.mpf(3) / 2) / (mp.gamma(ell + 1) * mp.gamma(mp.mpf(3) / 2))


def show(label, value):
    as_float = float(value)
    print(f"{label}")
    print(f"    40-digit  {mp.nstr(value, 40)}")
    print(f"    float64   {as_float!r}")


def main():
    sqrt8 = math.sqrt(8.0)  # float, to match the test's parameter exactly

    print("# FROZEN_CLOSED_FORM: (ell, w0, k_r) -> closed form value")
    for ell, w0, k_r in [(0, 1.0, sqrt8), (1, 1.0, sqrt8), (2, 1.0, sqrt8), (0, 2.0, 2.0)]:
        show(f"I(ell={ell}, w0={w0}, k_r={k_r!r})", closed_form(ell, w0, k_r))

    print("\n# FROZEN_GAUSSIAN: (ell, w0) -> Gaussian-limit mean transverse momentum")
    for ell, w0 in [(0, 1.0), (1, 1.0), (4, 1.0), (1, 2.0)]:
        show(f"gaussian_limit(ell={ell}, w0={w0})", gaussian_limit(ell, w0))

    print("\n# FROZEN_SMALL_RING: ell -> small-ring limit at w0 = 1")
    for ell in (0, 1, 2):
        show(f"small_ring(ell={ell}, w0=1)", small_ring(ell, 1))

    print("\n# FROZEN_LOG_AT_X400: log closed form at ell=0, w0=1, X=400")
    k_r = mp.sqrt(8 * mp.mpf(400))
    show("log I(ell=0, w0=1, X=400)", mp.log(closed_form(0, 1, k_r)))

    print("\n# large-ell expansion spot value")
    show("large_ell(ell=100, w0=1)", large_ell(100, 1))

    print("\n# exact amplitude enhancement spot value")
    show("gamma_ratio_enhancement(ell=4)", gamma_ratio_enhancement(4))


if __name__ == "__main__":
    main()
