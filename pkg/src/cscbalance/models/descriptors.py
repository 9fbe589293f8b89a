from typing import Any, Dict, Mapping
from cscbalance._exceptions import DocumentError
from cscbalance._interfaces import KahlerModel
from cscbalance.models.lebrun import LeBrunProfileModel
from cscbalance.models.profiles import PROFILES
from cscbalance.models.projective import ProjectiveTorusModel


_DESCRIPTOR_KEYS: Dict[str, Dict[str, Any]] = {
    "projective_torus": {"m": None},
    "lebrun_profile": {"a_minus": -1.0, "a_plus": 1.0, "profile": "quadratic"},
}


def _number(doc: Mapping[str, Any], key: str, default: Any) -> Any:
    val = doc.get(key, default)
    if val is None:
        raise DocumentError(f"model descriptor is missing '{key}'", key=key)
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise DocumentError(f"model descriptor key '{key}' must be a number, got {val!r}", key=key)
    return val


def model_from_descriptor(doc: Mapping[str, Any]) -> KahlerModel:
    """Build a model from {"type": "projective_torus", "m": 2} or
    {"type": "lebrun_profile", "a_minus": -1.0, "a_plus": 1.0, "profile": "quadratic"}
    """
    if not isinstance(doc, Mapping):
        raise DocumentError("model descriptor must be a JSON object", key="model")
    kind = doc.get("type")
    if kind not in _DESCRIPTOR_KEYS:
        raise DocumentError(
            f"unknown model type {kind!r}, expected one of {sorted(_DESCRIPTOR_KEYS)}", key="type"
        )
    allowed = _DESCRIPTOR_KEYS[kind]
    for key in doc:
        if key != "type" and key not in allowed:
            raise DocumentError(f"unknown key '{key}' in {kind} descriptor", key=key)
    try:
        if kind == "projective_torus":
            m = _number(doc, "m", None)
            if int(m) != m:
                raise DocumentError(f"'m' must be an integer, got {m}", key="m")
            return ProjectiveTorusModel(int(m))
        profile = doc.get("profile", allowed["profile"])
        if profile not in PROFILES:
            raise DocumentError(
                f"unknown profile {profile!r}, expected one of {sorted(PROFILES)}", key="profile"
            )
        return LeBrunProfileModel(
            float(_number(doc, "a_minus", allowed["a_minus"])),
            float(_number(doc, "a_plus", allowed["a_plus"])),
            profile,
        )
    except DocumentError:
        raise
    except ValueError as err:
        raise DocumentError(f"invalid {kind} descriptor: {err}", key="model") from err
