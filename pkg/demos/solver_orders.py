"""Measure the convergence order of the ODE solvers.

Integrates the linear field v(z, t) = z (exact answer z * e^{-1}) with
Euler and Heun at increasing step counts and fits the log-log error slope:
Euler is first order, Heun second.

    python3 demos/solver_orders.py
"""

import numpy as np

from curveflow import SolverConfig, integrate


def main():
    z0 = np.array([1.0])
    exact = np.exp(-1.0)
    steps = np.array([8, 16, 32, 64, 128, 256])
    for method in ("euler", "heun"):
        errs = []
        for n in steps:
            z = integrate(lambda z, t: z, z0, SolverConfig(method, int(n)))
            errs.append(abs(float(z[0]) - exact))
        slope, _ = np.polyfit(np.log(steps), np.log(errs), 1)
        print("%-6s errors %s  ->  order %.3f"
              % (method, ["%.2e" % e for e in errs], -slope))


if __name__ == "__main__":
    main()
