"""The two loss models rank the two inequalities in opposite order.

Under excitation loss (amplitudes decay, particle count fixed) the MABK
inequality tolerates slightly more loss than Hardy at every k.  Under
particle loss (whole qubits discarded) the picture is mixed, and for the
W state it flips: MABK survives more lost particles, because losing m of
n particles from |n,1> is the same as excitation loss at p = m/n on the
n-m survivors, where MABK's threshold is the larger one.

Runs at n=12 to stay quick; the n=30 version of the same comparison is
`dickebell reproduce fig4` / `fig5` material.
"""

from dickebell import InequalityKind, threshold_excitation, threshold_particle

N = 12
K_VALUES = [1, 2, 3, 4, 6]


def main():
    print(f"excitation loss at n={N}")
    print(f"{'k':>4}  {'hardy p_th':>11}  {'mabk p_th':>11}")
    for k in K_VALUES:
        ph = threshold_excitation(N, k, InequalityKind.HARDY).threshold
        pm = threshold_excitation(N, k, InequalityKind.MABK).threshold
        marker = "  <- MABK ahead" if pm > ph else ""
        print(f"{k:>4}  {ph:>11.6f}  {pm:>11.6f}{marker}")

    print(f"\nparticle loss at n={N} (m* = lost particles tolerated)")
    print(f"{'k':>4}  {'hardy m*':>9}  {'mabk m*':>9}")
    for k in K_VALUES:
        mh = threshold_particle(N, k, InequalityKind.HARDY).m_star
        mm = threshold_particle(N, k, InequalityKind.MABK).m_star
        marker = "  <- MABK ahead" if mm > mh else ""
        print(f"{k:>4}  {mh:>9}  {mm:>9}{marker}")


if __name__ == "__main__":
    main()
