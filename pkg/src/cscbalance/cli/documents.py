import hashlib
import json
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Sequence, Union
from cscbalance._exceptions import DocumentError
from cscbalance._interfaces import KahlerModel
from cscbalance.balance.solver import SolverOptions
from cscbalance.halgebra.algebra import Configuration
from cscbalance.models.descriptors import model_from_descriptor

DOCUMENT_KEYS = ("model", "points", "weights", "m", "labels", "options")
SOLVER_KEYS = (
    "tol_res",
    "tol_pd",
    "max_iter",
    "divergence_bound",
    "armijo",
    "backtrack",
    "min_step",
    "bisect_xtol",
)
EXPERIMENT_KEYS = ("seed", "samples", "radius", "grid", "n", "workers")
INTEGER_KEYS = ("max_iter", "seed", "samples", "grid", "n", "workers", "m")


@dataclass()
class RunConfigDocument:
    """A parsed run document

    Attributes:
        model (KahlerModel): model built from the descriptor
        descriptor (dict): the descriptor as given
        points (list | None): point coordinates or heights
        weights (list | float | None): asymptotic weights
        m (int | None): complex dimension
        labels (list | None): per-point tags
        options (dict): solver and experiment options
        sha256 (str): digest of the raw document bytes
    """

    model: KahlerModel
    descriptor: dict
    sha256: str
    points: Union[List[Any], None] = None
    weights: Union[List[float], float, None] = None
    m: Union[int, None] = None
    labels: Union[List[str], None] = None
    options: Dict[str, Any] = field(default_factory=dict)

    def require(self, *keys: str) -> None:
        for key in keys:
            if getattr(self, key) is None:
                raise DocumentError(f"document is missing '{key}'", key=key)

    def configuration(self) -> Configuration:
        self.require("points", "weights")
        try:
            return self.model.configuration(self.points, self.weights, self.m, self.labels)
        except DocumentError:
            raise
        except (TypeError, ValueError) as err:
            raise DocumentError(f"invalid configuration: {err}", key="points") from err

    def solver_options(self, overrides: Mapping[str, Any]) -> SolverOptions:
        values = {k: v for k, v in self.options.items() if k in SOLVER_KEYS}
        values.update({k: v for k, v in overrides.items() if k in SOLVER_KEYS and v is not None})
        try:
            return SolverOptions(**values).validate()
        except ValueError as err:
            raise DocumentError(f"invalid solver options: {err}", key="options") from err

    def option(self, key: str, overrides: Mapping[str, Any], default: Any) -> Any:
        if overrides.get(key) is not None:
            return overrides[key]
        return self.options.get(key, default)


def _check_number(key: str, val: Any) -> None:
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise DocumentError(f"'{key}' must be a number, got {val!r}", key=key)
    if key in INTEGER_KEYS and int(val) != val:
        raise DocumentError(f"'{key}' must be an integer, got {val!r}", key=key)


def _check_options(options: Any) -> Dict[str, Any]:
    if not isinstance(options, Mapping):
        raise DocumentError("'options' must be an object", key="options")
    for key, val in options.items():
        if key not in SOLVER_KEYS and key not in EXPERIMENT_KEYS:
            raise DocumentError(f"unknown option '{key}'", key=key)
        if key == "tol_pd" and val is None:
            continue
        _check_number(key, val)
    return {k: (int(v) if k in INTEGER_KEYS else v) for k, v in options.items()}


def _check_list(key: str, val: Any) -> List[Any]:
    if not isinstance(val, list) or not val:
        raise DocumentError(f"'{key}' must be a non-empty list", key=key)
    return val


def parse_document(raw: bytes) -> RunConfigDocument:
    """Parse and validate a run document, raising DocumentError with the key or line/column"""
    try:
        doc = json.loads(raw.decode("utf-8"))
    except UnicodeDecodeError as err:
        raise DocumentError(f"document is not UTF-8: {err}") from err
    except json.JSONDecodeError as err:
        raise DocumentError(
            f"malformed JSON at line {err.lineno}, column {err.colno}: {err.msg}",
            line=err.lineno, column=err.colno,
        ) from err
    if not isinstance(doc, Mapping):
        raise DocumentError("document must be a JSON object")
    for key in doc:
        if key not in DOCUMENT_KEYS:
            raise DocumentError(f"unknown key '{key}'", key=key)
    if "model" not in doc:
        raise DocumentError("document is missing 'model'", key="model")
    res = RunConfigDocument(
        model=model_from_descriptor(doc["model"]),
        descriptor=dict(doc["model"]),
        sha256=hashlib.sha256(raw).hexdigest(),
    )
    if "points" in doc:
        res.points = _check_list("points", doc["points"])
    if "weights" in doc:
        weights = doc["weights"]
        if isinstance(weights, list):
            for w in _check_list("weights", weights):
                _check_number("weights", w)
        else:
            _check_number("weights", weights)
        res.weights = weights
    if "m" in doc:
        _check_number("m", doc["m"])
        res.m = int(doc["m"])
    if "labels" in doc:
        labels = _check_list("labels", doc["labels"])
        if not all(isinstance(l, str) for l in labels):
            raise DocumentError("'labels' must be strings", key="labels")
        res.labels = labels
    if "options" in doc:
        res.options = _check_options(doc["options"])
    return res


def read_document(path: str) -> RunConfigDocument:
    if path == "-":
        raw = sys.stdin.buffer.read()
    else:
        try:
            with open(path, "rb") as f:
                raw = f.read()
        except OSError as err:
            raise DocumentError(f"cannot read {path}: {err.strerror}") from err
    return parse_document(raw)


def pair(doc: RunConfigDocument, key: str) -> Sequence[float]:
    """The two entries of a two-point document, points given as heights or [height] rows"""
    doc.require(key)
    vals = getattr(doc, key)
    if not isinstance(vals, list) or len(vals) != 2:
        raise DocumentError(f"'{key}' must list exactly two entries", key=key)
    flat = [v[0] if isinstance(v, list) and len(v) == 1 else v for v in vals]
    for v in flat:
        _check_number(key, v)
    return [float(v) for v in flat]
