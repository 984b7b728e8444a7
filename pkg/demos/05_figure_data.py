r"""Regenerating the figure tables
===============================

``figure_data`` produces the tables behind three views of the model: SNR
along r at fixed s, the SNR map over (s, r) with its optimal ridge, and SNR
against s for each source. This demo writes them as CSV and, when
matplotlib is installed (``pip install ghostfock[demos]``), draws them.
"""

import sys
from pathlib import Path

from ghostfock.sweep import figure_data

out = Path(sys.argv[1] if len(sys.argv) > 1 else "ghostfock-demo-out")
out.mkdir(parents=True, exist_ok=True)

tables = {}
for fig in ("2a", "2b", "3"):
    for name, table in figure_data(fig).items():
        tables[name] = table
        with open(out / f"{name}.csv", "w", newline="") as fh:
            table.write_csv(fh)
        print(f"{name}: {len(table.rows)} rows")

######################################################################
# Plotting
# --------
# Only the figure against s is drawn here. The other tables follow the
# same pattern.

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("matplotlib not installed; CSV files only")
else:
    fig3 = tables["fig3"]
    s = fig3.column("s")
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for col, label in (("snr_tmss", "twin beam"), ("snr_sub", "subtraction"), ("snr_add", "addition"),
                       ("snr_opt", "optimized t a + r a^dag")):
        ax.plot(s, fig3.column(col), label=label)
    ax.set_xlabel("squeezing s")
    ax.set_ylabel("per-frame SNR")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out / "fig3.png", dpi=120)
    print("wrote", out / "fig3.png")
