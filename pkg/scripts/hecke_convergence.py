"""Relative error of the torus-integral identities as the lattice bound grows."""
import argparse
from fractions import Fraction

from gmzv.numfield import field, green_period_check, hecke_formula_check


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--D", type=int, default=5)
    ap.add_argument("--s", type=float, default=2.0)
    ap.add_argument("--bounds", default="2500,10000,40000")
    ap.add_argument("--deltas", default="2,1")
    args = ap.parse_args()
    fld = field(args.D)
    bounds = [float(b) for b in args.bounds.split(",")]
    print(f"Eisenstein series, D={args.D}, s={args.s}")
    for b in bounds:
        rep = hecke_formula_check(fld, args.s, b)
        print(f"  bound {b:>9.0f}  lhs {rep.lhs.real:.12f}  rhs {rep.rhs.real:.12f}  rel {rep.relative_error:.2e}")
    for delta in (float(d) for d in args.deltas.split(",")):
        for x in (None, (Fraction(1, 3), Fraction(0))):
            print(f"Green function, delta={delta}, x={x}")
            for b in bounds:
                rep = green_period_check(fld, delta, (0, 0), x, b)
                print(f"  bound {b:>9.0f}  lhs {rep.lhs.real:.12f}  rhs {rep.rhs.real:.12f}  rel {rep.relative_error:.2e}")


if __name__ == "__main__":
    main()
