"""Optional PNG figures written next to the CSV artifacts."""
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "figure.figsize": (6.4, 4.0),
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 9,
    "legend.fontsize": 8,
    "savefig.dpi": 150,
}
# no timestamps or version strings in the files
_META = {"Software": None}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, metadata=_META)
    plt.close(fig)
    return path


def plot_trajectory(traj, path, t_scale=1.0):
    """Active power, frequency and voltage magnitude per bus against time."""
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(3, 1, sharex=True, figsize=(6.4, 6.0))
        t = np.asarray(traj.t) / t_scale
        for j, bus in enumerate(traj.buses):
            for ax, col in zip(axes, range(3)):
                ax.plot(t, traj.outputs[:, j, col], label=f"bus {bus}")
        for ax, lab in zip(axes, ("p (p.u.)", "omega (p.u.)", "|v| (p.u.)")):
            ax.set_ylabel(lab)
        axes[0].legend(loc="best")
        axes[-1].set_xlabel("t (s)")
        return _save(fig, path)


def plot_iterations(result, path):
    """Gains and residual against the outer iteration index."""
    with plt.rc_context(STYLE):
        fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True)
        ks = [it.k for it in result.iterations]
        gains = np.array([it.gains for it in result.iterations])
        for i in range(gains.shape[1]):
            ax1.plot(ks, gains[:, i], "o-", label=f"gain {i + 1}")
        ax1.set_ylabel("K_P (p.u.)")
        ax1.legend(loc="best")
        ax2.semilogy(ks, np.maximum(result.residuals, 1e-300), "s-")
        ax2.axhline(result.epsilon, ls="--", color="k", lw=0.8)
        ax2.set_ylabel("residual")
        ax2.set_xlabel("outer iteration")
        return _save(fig, path)


def plot_grid(rows, points, path, optimum=None):
    """Log objective over a two-gain grid; infeasible cells left blank."""
    arr = np.array([r[:3] for r in rows], float)
    k1 = arr[:points, 0]
    k2 = arr[::points, 1]
    vals = arr[:, 2].reshape(points, points)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        mesh = ax.pcolormesh(k1, k2, np.log10(vals), shading="nearest")
        fig.colorbar(mesh, ax=ax, label="log10 objective")
        if optimum is not None:
            ax.plot(*optimum, "r*", ms=10)
        ax.set_xlabel("K_P bus 1")
        ax.set_ylabel("K_P bus 2")
        return _save(fig, path)
