"""Valuations of reduced discriminants, read off root-value depths.

|D_G(gamma)| = q^(-v) with v the sum of ord_gamma(alpha) over the roots with
alpha(gamma) != 1; each orbit contributes n_alpha * d_alpha.
"""

from __future__ import annotations

from fractions import Fraction

from .elements import INF, Approximation, CovectorProfile, ElementProfile, centralizer_ids, head_profile


def disc_val_gamma(profile: ElementProfile, ids=None) -> Fraction:
    """v with |D(gamma)| = q^-v, optionally restricted to a set of orbit ids."""
    total = Fraction(0)
    for o in profile.part.orbits:
        if ids is not None and o.orbit_id not in ids:
            continue
        d = profile[o.orbit_id].d
        if d is not INF:
            total += o.n * d
    return total


def disc_val_xstar(cv: CovectorProfile, ids=None) -> Fraction:
    """Sum of ord d alpha^vee(X*) over roots outside the Levi."""
    total = Fraction(0)
    for o in cv.part.orbits:
        if ids is not None and o.orbit_id not in ids:
            continue
        d, _ = cv.values[o.orbit_id]
        if d is not INF:
            total += o.n * d
    return total


def part_disc_sides(ap: Approximation) -> tuple:
    """(v(gamma), v(gamma_<r) + v_H(gamma_>=r)) computed separately."""
    whole = disc_val_gamma(ap.gamma)
    head = disc_val_gamma(head_profile(ap))
    # on Root_H the tail has the same root values as gamma
    tail = disc_val_gamma(ap.gamma, ids=centralizer_ids(ap))
    return whole, head + tail


def check_part_disc(ap: Approximation) -> bool:
    whole, factored = part_disc_sides(ap)
    return whole == factored
