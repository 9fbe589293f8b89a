from cscbalance import *


def main():
    """
    Random triples on the projective plane can almost always be rebalanced
    """
    model = ProjectiveTorusModel(2)
    report = sample_point_density(model, 1.0, 3, samples=1000, seed=42)
    print(f"balanced fraction {report.success_fraction:.4f}, generic fraction {report.genericity_fraction:.4f}")
    """
    Around a balanced pair the balancing equation stays solvable when the weights move
    """
    lebrun = LeBrunProfileModel()
    z1, z2 = target_heights(-1.0, 1.0, 1.0, 1.0, 2)
    config = two_point_configuration(lebrun, z1, z2, 1.0, 1.0, 2)
    for radius in (0.1, 0.5, 2.0):
        report = certify_weight_openness(lebrun, config, radius=radius, grid=9)
        print(f"radius {radius}: {report.successes}/{len(report.records)} balanced, certified {report.certified_radius}")
    """
    Every pair of weights admits a balanced pair of heights
    """
    pairs = [(0.1, 10.0), (1.0, 1.0), (3.0, 0.2), (7.5, 7.0)]
    report = witness_weight_surjectivity(lebrun, pairs, m=3)
    print(f"weight pairs witnessed: {report.successes}/{len(pairs)}")


if __name__ == "__main__":
    main()
