"""JSON run configuration: matrix literals, the scenario schema, validation.

A matrix literal is a list of d rows, each a list of d entries, each entry a
two-element list [re, im]; a vector literal is a list of [re, im] pairs. The
2x2 identity is [[[1,0],[0,0]],[[0,0],[1,0]]].

Scenario schema (all errors carry the offending field path):

    {
      "dim": int,                       optional cross-check
      "initial_state": matrix-literal | {"pure": vector-literal},
      "weak_povm": {"catalog": name, ...params} |
                   {"elements": [matrix-literal, ...],
                    "weights": [real, ...] (optional),
                    "labels": [str, ...] (optional)},
      "epsilon": real,
      "final_povm": {"elements": [...], "labels": [...] (optional)},
      "second_final_povm": same shape, optional,
      "seed": int (required)
    }

A catalog weak_povm supplies the missing scenario pieces; explicit
initial_state / final_povm entries override the catalog's. The "random"
catalog derives its seed from the top-level seed (sub-stream 0) unless the
params carry their own.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from . import rng
from .catalog import CATALOG_NAMES, ScenarioBundle, catalog
from .errors import ConfigError, WeaktomoError
from .povm import StrongPovm, build_family
from .states import density_matrix, pure_state

SCENARIO_KEYS = {
    "dim", "initial_state", "weak_povm", "epsilon",
    "final_povm", "second_final_povm", "seed",
}
COMMAND_KEYS = {"reconstruct", "postselect", "joint", "sweep", "sample"}


def parse_complex_entry(obj: Any, path: str) -> complex:
    if (
        not isinstance(obj, (list, tuple))
        or len(obj) != 2
        or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in obj)
    ):
        raise ConfigError(f"{path}: expected a [re, im] pair, got {obj!r}")
    return complex(float(obj[0]), float(obj[1]))


def parse_vector_literal(obj: Any, path: str) -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise ConfigError(f"{path}: expected a nonempty list of [re, im] pairs")
    return np.array([parse_complex_entry(e, f"{path}[{i}]") for i, e in enumerate(obj)])


def parse_matrix_literal(obj: Any, path: str) -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise ConfigError(f"{path}: expected a nonempty list of rows")
    d = len(obj)
    rows = []
    for i, row in enumerate(obj):
        if not isinstance(row, list) or len(row) != d:
            raise ConfigError(f"{path}[{i}]: expected a row of {d} entries")
        rows.append([parse_complex_entry(e, f"{path}[{i}][{j}]") for j, e in enumerate(row)])
    return np.array(rows, dtype=np.complex128)


def matrix_to_literal(m: np.ndarray) -> list:
    m = np.asarray(m, dtype=np.complex128)
    return [[[float(e.real), float(e.imag)] for e in row] for row in m]


def _require_keys(obj: dict, allowed: set[str], path: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(f"{path}: unknown fields {sorted(unknown)}; allowed: {sorted(allowed)}")


def _parse_strong_povm(obj: Any, path: str) -> StrongPovm:
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: expected an object with 'elements'")
    _require_keys(obj, {"elements", "labels"}, path)
    if "elements" not in obj:
        raise ConfigError(f"{path}: missing 'elements'")
    raw = obj["elements"]
    if not isinstance(raw, list) or not raw:
        raise ConfigError(f"{path}.elements: expected a nonempty list of matrix literals")
    elems = np.stack(
        [parse_matrix_literal(e, f"{path}.elements[{i}]") for i, e in enumerate(raw)]
    )
    labels = tuple(obj.get("labels", ()))
    if labels and not all(isinstance(l, str) for l in labels):
        raise ConfigError(f"{path}.labels: expected strings")
    try:
        return StrongPovm(elems, labels)
    except (WeaktomoError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _parse_initial_state(obj: Any, path: str) -> np.ndarray:
    if isinstance(obj, dict):
        _require_keys(obj, {"pure"}, path)
        if "pure" not in obj:
            raise ConfigError(f"{path}: expected 'pure' or a matrix literal")
        return pure_state(parse_vector_literal(obj["pure"], f"{path}.pure"))
    mat = parse_matrix_literal(obj, path)
    try:
        return density_matrix(mat)
    except (WeaktomoError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _catalog_scenario(params: dict, epsilon: float, top_seed: int, path: str) -> ScenarioBundle:
    _require_keys(params, {"catalog", "dim", "rank", "outcomes", "seed"}, path)
    name = params["catalog"]
    if name not in CATALOG_NAMES:
        raise ConfigError(f"{path}.catalog: unknown scenario {name!r}; choose from {CATALOG_NAMES}")
    kwargs: dict[str, Any] = {"epsilon": epsilon}
    if name == "random":
        for key in ("dim", "rank"):
            if key not in params:
                raise ConfigError(f"{path}: random scenarios need '{key}'")
            kwargs[key] = int(params[key])
        if "outcomes" in params:
            kwargs["n_outcomes"] = int(params["outcomes"])
        kwargs["seed"] = int(params.get("seed", rng.derive_stream(top_seed, 0)))
    elif any(k in params for k in ("dim", "rank", "outcomes", "seed")):
        raise ConfigError(f"{path}: only the 'random' catalog takes parameters")
    try:
        return catalog(name, **kwargs)
    except (WeaktomoError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def scenario_from_config(cfg: dict, seed: int) -> ScenarioBundle:
    """Assemble the scenario from a validated top-level config mapping."""
    if "epsilon" not in cfg:
        raise ConfigError("epsilon: required")
    epsilon = cfg["epsilon"]
    if not isinstance(epsilon, (int, float)) or isinstance(epsilon, bool) or epsilon < 0:
        raise ConfigError(f"epsilon: expected a nonnegative number, got {epsilon!r}")
    if "weak_povm" not in cfg:
        raise ConfigError("weak_povm: required")
    wp = cfg["weak_povm"]
    if not isinstance(wp, dict):
        raise ConfigError("weak_povm: expected an object")

    if "catalog" in wp:
        bundle = _catalog_scenario(wp, float(epsilon), seed, "weak_povm")
        initial = bundle.initial_state
        final = bundle.final
        second = bundle.second_final
        family = bundle.family
        name = bundle.name
    else:
        _require_keys(wp, {"elements", "weights", "labels"}, "weak_povm")
        strong = _parse_strong_povm(
            {"elements": wp.get("elements"), "labels": wp.get("labels", ())}, "weak_povm"
        )
        weights = wp.get("weights")
        if weights is not None and (
            not isinstance(weights, list)
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in weights)
        ):
            raise ConfigError("weak_povm.weights: expected a list of numbers")
        try:
            family = build_family(strong, float(epsilon), weights)
        except (WeaktomoError, ValueError) as exc:
            raise ConfigError(f"weak_povm: {exc}") from exc
        if "initial_state" not in cfg:
            raise ConfigError("initial_state: required for inline weak_povm")
        initial, final, second, name = None, None, None, "inline"

    if "initial_state" in cfg:
        initial = _parse_initial_state(cfg["initial_state"], "initial_state")
    if "final_povm" in cfg:
        final = _parse_strong_povm(cfg["final_povm"], "final_povm")
    if "second_final_povm" in cfg:
        second = _parse_strong_povm(cfg["second_final_povm"], "second_final_povm")

    if "dim" in cfg and int(cfg["dim"]) != family.dim:
        raise ConfigError(f"dim: declared {cfg['dim']} but operators have dimension {family.dim}")
    if initial is None:
        raise ConfigError("initial_state: required")
    if initial.shape[0] != family.dim:
        raise ConfigError(
            f"initial_state: dimension {initial.shape[0]} does not match weak POVM dimension {family.dim}"
        )
    if final is not None and final.dim != family.dim:
        raise ConfigError("final_povm: dimension does not match the weak POVM")
    if second is not None and second.dim != family.dim:
        raise ConfigError("second_final_povm: dimension does not match the weak POVM")
    try:
        return ScenarioBundle(name, initial, family, final, second)
    except (WeaktomoError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | Path) -> dict:
    """Read and structurally validate a config file (scenario + command sections)."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be an object")
    _require_keys(cfg, SCENARIO_KEYS | COMMAND_KEYS, "config")
    if "seed" not in cfg:
        raise ConfigError("seed: required (determinism policy forbids implicit entropy)")
    if not isinstance(cfg["seed"], int) or isinstance(cfg["seed"], bool):
        raise ConfigError(f"seed: expected an integer, got {cfg['seed']!r}")
    return cfg
