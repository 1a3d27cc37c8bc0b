"""Figure rendering for bound curves (headless Agg backend)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .bounds import CurveRow


def render_curves(rows: list[CurveRow], kappa: int, path: str, n: int = 64) -> None:
    """Render the single/double advantage curves against x = log2(t) to a file."""
    xs = [r.log2_t for r in rows]
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.plot(xs, [r.single for r in rows], color="tab:blue",
            label=r"single cipher: $t/2^{\kappa}$")
    ax.plot(xs, [r.double_upper for r in rows], color="tab:red",
            label=r"double cipher, upper: $t^2/2^{2\kappa}$")
    ax.plot(xs, [r.double_lower for r in rows], color="tab:red", linestyle="--",
            label="double cipher, lower (meet-in-the-middle)")
    ax.set_xlabel(r"$x = \log_2 t$ (cipher computations)")
    ax.set_ylabel("maximal advantage")
    ax.set_title(rf"Distinguishing advantage ceilings, $\kappa={kappa}$, $n={n}$")
    ax.set_ylim(-0.02, 1.05)
    ax.grid(True, alpha=0.3)
    ax.legend(loc="upper left", fontsize=9)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
