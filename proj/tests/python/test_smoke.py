"""Smoke tests for the python module: import, build, core numbers."""

import math
import sys

import numpy as np

import palintoep as pt


def check(condition, label):
    if not condition:
        print(f"FAIL {label}")
        sys.exit(1)
    print(f"ok   {label}")


def main():
    check(pt.__version__, "version string present")

    pt.validate_spec(1, 8)
    try:
        pt.validate_spec(1, 6)
        check(False, "dimension error raised")
    except pt.DimensionError:
        check(True, "dimension error raised")

    row = [pt.link_index(1, j, 8, 1) for j in range(1, 9)]
    check(row == [0, 1, 1, 0, 0, 1, 1, 0], "doubly palindromic first row")

    matrix = pt.build_matrix(1, 8, [1.0, -2.0])
    check(matrix.shape == (8, 8), "matrix shape")
    check(np.allclose(matrix, matrix.T), "matrix symmetry")
    check(list(matrix[0]) == [1.0, -2.0, -2.0, 1.0, 1.0, -2.0, -2.0, 1.0], "first row entries")

    eig = pt.eigenvalues(matrix)
    check(abs(eig.sum() - np.trace(matrix)) < 1e-9, "trace identity")

    entries = pt.sample_entries(1, 64, "gaussian", seed=7, sample_index=3)
    check(entries.shape == (16,), "entry vector length N / 2^(n+1)")
    again = pt.sample_entries(1, 64, "gaussian", seed=7, sample_index=3)
    check(np.array_equal(entries, again), "sampling determinism")

    sample = pt.build_matrix(1, 64, list(entries))
    moments = pt.spectral_moments(sample, 4)
    check(abs(moments[0] - 1.0) == 0.0, "zeroth moment is one")
    tp = pt.trace_power_moment(sample, 4)
    check(abs(tp - moments[4]) <= 1e-6 * max(abs(tp), 1.0), "trace path agrees")

    check(pt.exact_expected_moment(8, 1, 2) == 1.0, "exact second moment")
    check(pt.exact_expected_moment(8, 1, 3) == 0.0, "exact odd moment")
    check(abs(pt.exact_expected_moment(8, 1, 4) - 8.5625) < 1e-12, "exact fourth moment")

    check(pt.fourth_moment_limit(1) == 4.5, "fourth moment limit")
    check(pt.conjectured_moment(3) == 37.5, "conjectured sixth moment")
    check(pt.dpt_adjacent_sum(4) == pt.dpt_adjacent_contribution(4), "adjacent sum identity")
    check(len(pt.enumerate_pair_matchings(4)) == 3, "three fourth-moment matchings")

    fit = pt.extrapolate([8.0, 16.0, 32.0, 64.0], [4.5 + 10.0 / x for x in (8, 16, 32, 64)], 1)
    check(abs(fit["limit"] - 4.5) < 1e-9, "extrapolation recovery")

    estimates = pt.monte_carlo_moments(1, 16, "gaussian", seed=11, num_matrices=400, k_max=2)
    second = estimates[2]
    check(abs(second["mean"] - 1.0) <= 3.0 * second["stderr"], "monte carlo second moment")

    check(abs(pt.gaussian_tail(0.0) - 0.5) == 0.0, "gaussian tail at zero")
    check(math.isclose(pt.gaussian_tail(2.0), 0.0227501319, rel_tol=1e-6), "gaussian tail at two")

    print("all smoke checks passed")


if __name__ == "__main__":
    main()
