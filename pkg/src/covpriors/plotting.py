"""Render emitted tables as matplotlib figures.

The CLI's --plot option routes through here; the data file stays the
primary product and every figure is derivable from it.  matplotlib is
imported lazily so that data-only runs never touch it.
"""

from __future__ import annotations

import numpy as np

# first column on the x axis; (log_x, log_y) hints per subcommand
_AXES_HINTS = {
    "gauss-stdmean": ("n", False, True),
    "multinormal": ("q", False, True),
    "multinomial": ("m", True, True),
    "stein": ("s_x", False, False),
    "neyman-scott": ("zeta0", False, False),
    "marginalization": ("zeta", False, False),
    "fisher": (None, False, False),
    "verify": (None, False, False),
}


def render_table(subcommand: str, columns: dict, metadata: dict, path: str) -> None:
    """Plot every numeric column of a table against its abscissa column."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    x_name, log_x, log_y = _AXES_HINTS.get(subcommand, (None, False, False))
    numeric = {k: v for k, v in columns.items()
               if np.issubdtype(np.asarray(v).dtype, np.number)}
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    if x_name is not None and x_name in numeric and len(numeric) > 1:
        x = np.asarray(numeric[x_name], dtype=float)
        for name, vals in numeric.items():
            if name == x_name:
                continue
            y = np.asarray(vals, dtype=float)
            if log_y and np.any(y <= 0):
                continue
            ax.plot(x, y, marker=".", lw=1.0, label=name)
        ax.set_xlabel(x_name)
        if log_x:
            ax.set_xscale("log")
        if log_y:
            ax.set_yscale("log")
        ax.legend(fontsize=8)
    else:
        names = list(numeric)
        if not names:
            plt.close(fig)
            raise ValueError("table holds no numeric columns to plot")
        vals = np.asarray(numeric[names[-1]], dtype=float)
        ax.plot(np.arange(vals.size), vals, marker=".", lw=1.0, label=names[-1])
        ax.set_xlabel("row")
        ax.legend(fontsize=8)
    title = metadata.get("subcommand", subcommand)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
