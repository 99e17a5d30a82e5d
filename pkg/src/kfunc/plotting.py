"""Optional SVG figure of a flow trace (needs matplotlib)."""

import numpy as np


def plot_trace(trace, path):
    """Energy and residual against iteration, plus the final field, in one SVG file."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "kfunc"
    it = trace.column("iteration")
    fig, axes = plt.subplots(1, 3, figsize=(12, 3.5))
    axes[0].plot(it, trace.column("energy"))
    axes[0].set_xlabel("iteration")
    axes[0].set_ylabel("energy")
    axes[1].semilogy(it, np.maximum(trace.column("residual"), 1e-300))
    axes[1].set_xlabel("iteration")
    axes[1].set_ylabel("residual (max-norm)")
    rho = trace.rho
    axes[2].plot(rho.grid.nodes, rho.values)
    axes[2].set_xlabel("x")
    axes[2].set_ylabel("final rho")
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
