"""How much excitation loss can a W state absorb before its Bell violation dies?

Sweeps the certified threshold p_th(n) for the one-excitation Dicke state
under both inequalities.  The Hardy curve climbs towards ~0.1889 and the
MABK curve towards ~0.2741; neither ever crosses 1/3, which is the known
ceiling for this family of states and measurements.

Writes w_state_loss_threshold.svg next to the CSV-like table it prints.
"""

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from dickebell import InequalityKind, w_threshold_optimized

N_VALUES = [2, 3, 4, 6, 8, 12, 17, 25, 40, 60, 100, 180, 320, 560, 1000, 2000]
PLOT_FILE = "w_state_loss_threshold.svg"


def main():
    curves = {}
    print(f"{'n':>5}  {'hardy':>10}  {'mabk':>10}")
    for kind in (InequalityKind.HARDY, InequalityKind.MABK):
        curves[kind.value] = [w_threshold_optimized(n, kind).threshold
                              for n in N_VALUES]
    for i, n in enumerate(N_VALUES):
        print(f"{n:>5}  {curves['hardy'][i]:>10.6f}  {curves['mabk'][i]:>10.6f}")

    tail_h = curves["hardy"][-1]
    tail_m = curves["mabk"][-1]
    print(f"\nlargest-n values: hardy {tail_h:.4f} (asymptote 0.1889), "
          f"mabk {tail_m:.4f} (asymptote 0.2741)")
    assert max(curves["hardy"] + curves["mabk"]) < 1 / 3 + 1e-6

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogx(N_VALUES, curves["hardy"], "o-", label="Hardy")
    ax.semilogx(N_VALUES, curves["mabk"], "s-", label="MABK")
    ax.axhline(1 / 3, color="gray", ls=":", label="1/3 ceiling")
    ax.set_xlabel("parties n")
    ax.set_ylabel("excitation-loss threshold $p_{th}$")
    ax.set_title("W-state loss tolerance")
    ax.legend()
    fig.tight_layout()
    fig.savefig(PLOT_FILE)
    print(f"wrote {PLOT_FILE}")


if __name__ == "__main__":
    main()
