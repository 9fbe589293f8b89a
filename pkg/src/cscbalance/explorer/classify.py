import enum
from cscbalance._exceptions import DomainError
from cscbalance._interfaces import KahlerModel

HEIGHT_TOL: float = 1.0e-12


class PairClass(str, enum.Enum):
    """Where a pair of points on a one-field model stands

    IN_AP_WITNESSED: distinct interior heights, the flow argument balances them
    IN_CAL_M: equal interior heights, balancing and genericity exclude each other;
        inconclusive, never a verdict of non-membership
    ENDPOINT_CASE: both heights on the same endpoint section
    OUTSIDE_ARGUMENT: one endpoint height, or the two different endpoint sections
    """

    IN_AP_WITNESSED = "IN_AP_WITNESSED"
    IN_CAL_M = "IN_CAL_M"
    ENDPOINT_CASE = "ENDPOINT_CASE"
    OUTSIDE_ARGUMENT = "OUTSIDE_ARGUMENT"


def classify_lebrun_pair(
    model: KahlerModel, z1: float, z2: float, tol: float = HEIGHT_TOL
) -> PairClass:
    if model.point_dim != 1 or model.dim_d != 1:
        raise DomainError("pair classification needs a model with a single symmetry field")
    z1, z2 = (float(model.canonical([z])[0]) for z in (z1, z2))
    lo, hi = model.a_minus, model.a_plus

    def interior(z: float) -> bool:
        return lo + tol < z < hi - tol

    if interior(z1) and interior(z2):
        return PairClass.IN_CAL_M if abs(z1 - z2) <= tol else PairClass.IN_AP_WITNESSED
    for end in (lo, hi):
        if abs(z1 - end) <= tol and abs(z2 - end) <= tol:
            return PairClass.ENDPOINT_CASE
    return PairClass.OUTSIDE_ARGUMENT
