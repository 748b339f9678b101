"""SVG figures: G_kappa^E over [E-1, 1] and the log-log convergence plot."""

from __future__ import annotations

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .mourre import evaluate_G  # noqa: E402

PLOT_KINDS = ("g-curve", "rate-loglog")


def g_curve_data(kappa: int, rho: dict, E: float, points: int = 801):
    xs = np.linspace(E - 1.0, 1.0, points)
    return {"x": xs, "y": evaluate_G(kappa, rho, E, xs), "kappa": kappa, "E": E}


def rate_plot_data(fit):
    n = np.array(fit.indices, dtype=float)
    return {"x": np.log(n), "y": np.log(np.array(fit.gaps)), "kappa": fit.kappa,
            "slope": fit.slope, "intercept": fit.intercept}


def emit_plot(kind: str, data: dict, path) -> None:
    """Write a standalone SVG for ``kind`` ("g-curve" or "rate-loglog").

    The output is byte-identical for identical data.
    """
    if kind not in PLOT_KINDS:
        raise ValueError(f"unknown plot kind {kind!r}")
    x, y = np.asarray(data["x"]), np.asarray(data["y"])
    if x.size == 0:
        raise ValueError("nothing to plot")
    with plt.rc_context({"svg.hashsalt": "threshold-lab", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6.4, 4.0))
        if kind == "g-curve":
            ax.plot(x, y, color="tab:blue", lw=1.5)
            ax.axhline(0.0, color="black", lw=0.8)
            ax.set_xlabel("x")
            ax.set_ylabel("G(x)")
            ax.set_title(f"G for kappa={data['kappa']}, E={data['E']:.6g}, x in [E-1, 1]")
        else:
            ax.plot(x, y, "o", color="black", ms=4, label="log gap")
            line = data["slope"] * x + data["intercept"]
            ax.plot(x, line, color="tab:orange", label=f"slope {data['slope']:.4f}")
            ax.set_xlabel("log(n)")
            ax.set_ylabel("log(E_2n - 2cos(pi/kappa))")
            ax.set_title(f"Convergence of E_2n, kappa={data['kappa']}")
            ax.legend()
        ax.grid(True, lw=0.3)
        fig.tight_layout()
        try:
            fig.savefig(path, format="svg", metadata={"Date": None})
        except OSError as exc:
            raise OSError(f"cannot write plot to {path}: {exc.strerror or exc}") from exc
        finally:
            plt.close(fig)
