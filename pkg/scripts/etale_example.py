#!/usr/bin/env python3
"""Walk through the etale map D(x, y) = (y e^x, e^x) onto the upper half plane.

Pulls back the standard connection, lifts the affine fields of the orbit,
solves for all infinitesimal affine transformations upstairs and probes
which of them are complete.
"""
import argparse

from flataffine.connection import Connection, is_affine_map, is_flat_affine
from flataffine.deck import etale_example
from flataffine.exppoly import UPPER_HALF_PLANE, Domain, parse_field
from flataffine.flows import completeness_probe, closed_form_flows, verify_flow
from flataffine.infaff import Ansatz, solve_infaff


def main():
    ap = argparse.ArgumentParser(description="etale example walkthrough")
    ap.add_argument("--samples", type=int, default=50)
    ap.add_argument("--t-max", type=float, default=50.0)
    args = ap.parse_args()

    ex = etale_example()
    c = ex.connection
    print("pulled-back connection (nonzero symbols, 1-based k,i,j):")
    for (k, i, j), v in c.nonzero_symbols():
        print(f"  G^{k + 1}_{i + 1}{j + 1} = {v}")
    print("flat affine:", is_flat_affine(c))
    print("D affine onto the standard connection:", is_affine_map(ex.D, c, Connection.standard(2, UPPER_HALF_PLANE)))

    print("\nlifts of orbit fields:")
    for X, L in zip(ex.orbit_basis + ex.incomplete_orbit_fields, ex.lifts + ex.incomplete_lifts):
        print(f"  {str(X):<22} -> {L}")

    B = solve_infaff(c, Ansatz(2, [(-1, 0)]))
    print(f"\ninfinitesimal affine transformations: dim {B.dim}")
    for X in B:
        print("  ", X)

    print("\nflows:")
    full = Domain.full(2)
    for fl in closed_form_flows():
        X = parse_field(fl.field_literal)
        rep = verify_flow(X, fl.phi)
        v = completeness_probe(X, full, n_samples=args.samples, t_max=args.t_max)
        extra = f" t*={v.t_star:.6f} from {tuple(round(a, 4) for a in v.point)}" if v.incomplete else ""
        print(f"  {fl.name} {fl.field_literal:<32} ode {rep.max_defect_ode:.1e} "
              f"law {rep.max_defect_grouplaw:.1e}  {v.verdict}{extra}")


if __name__ == "__main__":
    main()
