import numpy as np
from cscbalance import *


def main():
    """
    On a momentum-construction metric the Euler field is the only symmetry and a
    point reduces to its height. With weights (a1, a2) the target heights balance
    """
    model = LeBrunProfileModel(-1.0, 1.0)
    for a1, a2, m in [(1.0, 1.0, 2), (1.0, 2.0, 2), (1.0, 2.0, 3)]:
        z1, z2 = target_heights(model.a_minus, model.a_plus, a1, a2, m)
        print(f"a=({a1}, {a2}) m={m}: heights=({z1:.12f}, {z2:.12f})")
    """
    Any two points at different interior heights can be moved along the flow to
    a balanced pair. Bisection in the flow time and damped Newton agree
    """
    z = (-0.5, 0.2)
    bisected = bisect_two_points(model, z[0], z[1], 1.0, 1.0, 2)
    config = two_point_configuration(model, z[0], z[1], 1.0, 1.0, 2)
    newton = solve_balance(model, config)
    print(f"bisection: t={bisected.s_star[0]:.12f} heights={bisected.flowed_points[:, 0]}")
    print(f"newton:    t={newton.s_star[0]:.12f} heights={newton.flowed_points[:, 0]}")
    print(f"closed form t = {np.arctanh(0.5) - np.arctanh(0.2):.12f}")
    """
    The same works for the sine profile, whose flow is integrated numerically
    """
    sine = LeBrunProfileModel(-1.0, 1.0, "sine")
    report = bisect_two_points(sine, z[0], z[1], 1.0, 1.0, 2)
    print(f"sine profile: t={report.s_star[0]:.12f} heights={report.flowed_points[:, 0]}")
    """
    Pairs at equal heights or on the endpoint sections are outside the flow argument
    """
    for pair in [(-0.5, 0.2), (0.3, 0.3), (1.0, 1.0), (-1.0, 0.4)]:
        print(pair, classify_lebrun_pair(model, *pair).value)


if __name__ == "__main__":
    main()
