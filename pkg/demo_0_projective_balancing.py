import numpy as np
from cscbalance import *


def main():
    """
    Points on the projective plane are given by the squared moduli of their
    homogeneous coordinates. The torus fixed points balance but every torus field
    vanishes at them, so the general position condition fails
    """
    model = ProjectiveTorusModel(2)
    fixed_points = model.configuration(np.eye(3), [1.0, 1.0, 1.0])
    print("fixed points:", check_conditions(model, fixed_points).to_dict())
    """
    A small perturbation restores general position, and damped Newton on the
    Kempf-Ness potential finds the balancing flow
    """
    rng = np.random.default_rng(42)
    perturbed = model.configuration(np.eye(3) + 1e-2 * rng.dirichlet(np.ones(3), size=3), [1.0, 1.0, 1.0])
    print("perturbed:", check_conditions(model, perturbed).to_dict())
    report = solve_balance(model, perturbed)
    print(f"status={report.status.value} steps={report.newton_steps} s*={report.s_star}")
    for k, r in enumerate(report.residual_history):
        print(f"  iterate {k}: |S(s)| = {r:.3e}")
    """
    A fixed point next to a point that converges to it cannot be balanced, the
    flow parameter runs off to infinity
    """
    unstable = model.configuration([[1.0, 0.0, 0.0], [1.0, 1e-6, 1e-6]], [1.0, 1.0])
    report = solve_balance(model, unstable)
    print(f"unstable pair: status={report.status.value} |s|={np.linalg.norm(report.s_star):.3e}")
    floor = scan_residual_floor(model, unstable, radius=10.0, points_per_axis=21)
    print(f"  smallest residual on |s| <= 10: {floor.min_residual:.4f}")


if __name__ == "__main__":
    main()
