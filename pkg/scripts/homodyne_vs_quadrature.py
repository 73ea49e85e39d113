"""Simulated x-homodyne protocol versus the quadrature optimum.

For each test problem the Monte Carlo error of "homodyne every mode, then
apply the sign test" is compared with the integral of the decision function
over its negative region. Agreement within a few standard errors is what
optimality of the homodyne protocol predicts.

    python scripts/homodyne_vs_quadrature.py --samples 1000000
"""

import argparse

import numpy as np

from qsd import (
    DiscriminationProblem,
    GaussianMixture,
    GaussianState,
    coherent_state,
    optimal_gaussian_error,
    simulate_homodyne_protocol,
)
from qsd.numerics import MonteCarloSpec


def problems():
    for alpha in (0.25, 0.5, 1.0):
        for p in (0.5, 0.75, 0.9):
            yield f"BPSK alpha={alpha} p={p}", DiscriminationProblem(
                coherent_state([alpha]), coherent_state([-alpha]), p)
    broad = [GaussianState(1, np.diag([gx, 1.0]), np.array([dx, 0.0]))
             for gx, dx in ((1.0, 1.2), (2.0, -0.4), (3.5, 2.5))]
    yield "mixed x-variances", DiscriminationProblem(
        GaussianMixture([0.5, 0.3, 0.2], broad),
        GaussianState(1, np.diag([1.5, 1.0]), np.array([-1.0, 0.0])))
    yield "two-mode mixtures", DiscriminationProblem(
        GaussianMixture([0.5, 0.5], [coherent_state([0.8, 0.0]), coherent_state([0.0, 0.8])]),
        GaussianMixture([0.5, 0.5], [coherent_state([-0.8, 0.0]), coherent_state([0.0, -0.8])]),
        0.4)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--samples", type=int, default=1_000_000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    print(f"{'problem':28s} {'quadrature':>12s} {'simulated':>12s} {'z':>6s}")
    for i, (name, prob) in enumerate(problems()):
        quad = optimal_gaussian_error(prob)
        sim = simulate_homodyne_protocol(prob, MonteCarloSpec(args.samples, args.seed + i))
        z = (sim.value - quad.value) / sim.estimate.stderr
        print(f"{name:28s} {quad.value:12.7f} {sim.value:12.7f} {z:6.2f}")


if __name__ == "__main__":
    main()
