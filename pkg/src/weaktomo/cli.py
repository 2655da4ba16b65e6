"""Batch front-end.

Subcommands: reconstruct, postselect, joint, sweep, sample. Every run takes
a JSON config (scenario schema plus an optional per-command section), an
output directory, and emits CSV and/or JSON reports with figures alongside.
Exit codes: 0 success, 1 configuration/IO error, 2 violated mathematical
precondition (incomplete frame, zero-probability post-selection, zero
strength, ...).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import reports
from .catalog import ScenarioBundle
from .config import (
    ConfigError,
    load_config,
    matrix_to_literal,
    scenario_from_config,
)
from .errors import WeaktomoError
from .experiments import (
    estimate_transient,
    joint_distribution,
    sample,
    sweep_epsilon,
    sweep_samples,
)
from .linalg import trace_distance
from .postselect import (
    decompose_by_postselection,
    joint_quasi_probability,
    order_independence_check,
    transient_state,
)
from .povm import EXACT, LINEARIZED, StrongPovm, measurement_operators
from .tomography import build_frame, coefficients_from_probabilities, reconstruct


def _section(cfg: dict, name: str, allowed: set[str]) -> dict:
    section = cfg.get(name, {})
    if not isinstance(section, dict):
        raise ConfigError(f"{name}: expected an object")
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"{name}: unknown fields {sorted(unknown)}; allowed: {sorted(allowed)}")
    return section


def _optional_count(section: dict, key: str, name: str) -> int | None:
    if key not in section:
        return None
    value = section[key]
    if not isinstance(value, int) or isinstance(value, bool) or value < 0:
        raise ConfigError(f"{name}.{key}: expected a nonnegative integer, got {value!r}")
    return value


def _require_final(scenario: ScenarioBundle, command: str) -> StrongPovm:
    if scenario.final is None:
        raise ConfigError(f"final_povm: required by the {command} command")
    return scenario.final


def _mode(section: dict, name: str) -> str:
    mode = section.get("mode", EXACT)
    if mode not in (EXACT, LINEARIZED):
        raise ConfigError(f"{name}.mode: expected '{EXACT}' or '{LINEARIZED}', got {mode!r}")
    return mode


def cmd_reconstruct(cfg: dict, scenario: ScenarioBundle, out: Path, seed: int, fmt: str, plot: bool) -> None:
    section = _section(cfg, "reconstruct", {"samples"})
    n = _optional_count(section, "samples", "reconstruct")
    frame = build_frame(scenario.family)
    rho = scenario.initial_state
    if n is None:
        probabilities = scenario.family.probabilities(rho)
    else:
        final = scenario.final if scenario.final is not None else StrongPovm.trivial(scenario.dim)
        dist = joint_distribution(rho, measurement_operators(scenario.family, EXACT), final)
        summary = sample(dist, n, seed)
        probabilities = summary.counts.sum(axis=1).astype(np.float64) / summary.total
    estimate = reconstruct(frame, probabilities)
    coeffs = coefficients_from_probabilities(frame, probabilities)
    distance = trace_distance(estimate, rho)
    if fmt in ("csv", "both"):
        reports.write_csv(
            out / "reconstruct.csv",
            ["outcome", "weight", "scaled_weight", "probability", "coefficient"],
            [
                [scenario.family.labels[m], scenario.family.weights[m],
                 scenario.family.scaled_weights[m], probabilities[m], coeffs[m]]
                for m in range(scenario.family.n_outcomes)
            ],
        )
    if fmt in ("json", "both"):
        reports.write_json(
            out / "reconstruct.json",
            {
                "epsilon": scenario.family.epsilon,
                "samples": n,
                "frame_rank": frame.rank,
                "frame_complete": frame.complete,
                "trace_distance_to_true_state": distance,
                "reconstructed": matrix_to_literal(estimate),
                "probabilities": list(probabilities),
                "coefficients": list(coeffs),
            },
        )
    if plot:
        reports.render_matrix_figure(estimate, out / "reconstruct.png", "reconstructed state")
    print(f"reconstruct: frame rank {frame.rank}, trace distance {distance:.3e}")


def cmd_postselect(cfg: dict, scenario: ScenarioBundle, out: Path, seed: int, fmt: str, plot: bool) -> None:
    section = _section(cfg, "postselect", {"samples"})
    n = _optional_count(section, "samples", "postselect")
    final = _require_final(scenario, "postselect")
    rho = scenario.initial_state
    result = decompose_by_postselection(rho, final)

    estimates: dict[str, dict] = {}
    if n is not None:
        frame = build_frame(scenario.family)
        dist = joint_distribution(rho, measurement_operators(scenario.family, EXACT), final)
        summary = sample(dist, n, seed)
        for report in result.reports:
            f = final.index_of(report.label)
            if summary.counts[:, f].sum() < 1:
                continue
            est = estimate_transient(summary, frame, f)
            estimates[report.label] = {
                "min_eigenvalue": est.min_eigenvalue,
                "negativity": est.negativity,
                "trace_distance_to_closed_form": trace_distance(est.matrix, report.transient.matrix),
                "matrix": matrix_to_literal(est.matrix),
            }

    if fmt in ("csv", "both"):
        header = ["outcome", "probability", "min_eigenvalue", "negativity"]
        if estimates:
            header += ["estimated_min_eigenvalue", "estimated_negativity", "estimate_trace_distance"]
        rows = []
        for report in result.reports:
            row = [report.label, report.probability, report.min_eigenvalue, report.negativity]
            if estimates:
                est = estimates.get(report.label)
                row += (
                    [est["min_eigenvalue"], est["negativity"], est["trace_distance_to_closed_form"]]
                    if est
                    else ["", "", ""]
                )
            rows.append(row)
        reports.write_csv(out / "postselect.csv", header, rows)
    if fmt in ("json", "both"):
        reports.write_json(
            out / "postselect.json",
            {
                "epsilon": scenario.family.epsilon,
                "decomposition_residual": result.residual,
                "skipped_outcomes": list(result.skipped),
                "samples": n,
                "outcomes": [
                    {
                        "label": r.label,
                        "probability": r.probability,
                        "min_eigenvalue": r.min_eigenvalue,
                        "negativity": r.negativity,
                        "transient": matrix_to_literal(r.transient.matrix),
                    }
                    for r in result.reports
                ],
                "estimates": estimates,
            },
        )
    if plot:
        spectra = {
            r.label: np.linalg.eigvalsh(r.transient.matrix) for r in result.reports
        }
        reports.render_spectrum_figure(
            spectra, out / "postselect.png", "post-selected sub-ensemble spectra"
        )
    print(
        f"postselect: {len(result.reports)} outcomes, residual {result.residual:.3e}, "
        f"min eigenvalue {min(r.min_eigenvalue for r in result.reports):.6f}"
    )


def cmd_joint(cfg: dict, scenario: ScenarioBundle, out: Path, seed: int, fmt: str, plot: bool) -> None:
    _section(cfg, "joint", set())
    final = _require_final(scenario, "joint")
    if scenario.second_final is None:
        raise ConfigError("second_final_povm: required by the joint command")
    second = scenario.second_final
    rho = scenario.initial_state
    table = np.array(
        [
            [joint_quasi_probability(rho, ef, eg) for eg in second.elements]
            for ef in final.elements
        ]
    )
    check = order_independence_check(rho, final, second)
    negative_cells = int((table < 0.0).sum())
    out_of_range_cells = int(((table < 0.0) | (table > 1.0)).sum())
    if fmt in ("csv", "both"):
        reports.write_csv(
            out / "joint.csv",
            ["outcome", *second.labels],
            [[final.labels[f], *table[f]] for f in range(final.n_outcomes)],
        )
    if fmt in ("json", "both"):
        reports.write_json(
            out / "joint.json",
            {
                "first_labels": list(final.labels),
                "second_labels": list(second.labels),
                "table": [list(row) for row in table],
                "negative_cells": negative_cells,
                "out_of_range_cells": out_of_range_cells,
                "max_order_deviation": check.max_order_deviation,
                "max_joint_deviation": check.max_joint_deviation,
                "first_marginal": list(table.sum(axis=1)),
                "second_marginal": list(table.sum(axis=0)),
            },
        )
    if plot:
        reports.render_table_figure(
            table, final.labels, second.labels, out / "joint.png", "joint quasi-probability"
        )
    print(
        f"joint: {negative_cells} negative cells, order deviation {check.max_order_deviation:.3e}"
    )


def cmd_sweep(cfg: dict, scenario: ScenarioBundle, out: Path, seed: int, fmt: str, plot: bool) -> None:
    section = _section(
        cfg, "sweep", {"axis", "epsilons", "counts", "mode", "samples", "postselect", "repeats", "fit_range"}
    )
    _require_final(scenario, "sweep")
    axis = section.get("axis")
    if axis not in ("epsilon", "samples"):
        raise ConfigError("sweep.axis: expected 'epsilon' or 'samples'")
    mode = _mode(section, "sweep")
    postselect = section.get("postselect", 0)
    fit_range = section.get("fit_range")
    if fit_range is not None:
        if not isinstance(fit_range, list) or len(fit_range) != 2:
            raise ConfigError("sweep.fit_range: expected [lo, hi]")
        fit_range = (float(fit_range[0]), float(fit_range[1]))
    try:
        if axis == "epsilon":
            grid = section.get("epsilons")
            if not isinstance(grid, list) or len(grid) < 4:
                raise ConfigError("sweep.epsilons: expected a list of >= 4 strengths")
            n = _optional_count(section, "samples", "sweep")
            result = sweep_epsilon(
                scenario, grid, mode=mode, n=n, seed=seed, postselect=postselect, fit_range=fit_range
            )
        else:
            grid = section.get("counts")
            if not isinstance(grid, list) or len(grid) < 4:
                raise ConfigError("sweep.counts: expected a list of >= 4 sample counts")
            repeats = section.get("repeats", 20)
            if not isinstance(repeats, int) or isinstance(repeats, bool) or repeats < 1:
                raise ConfigError("sweep.repeats: expected a positive integer")
            result = sweep_samples(
                scenario,
                scenario.family.epsilon,
                grid,
                seed,
                repeats=repeats,
                mode=mode,
                postselect=postselect,
                fit_range=fit_range,
            )
    except (IndexError, KeyError) as exc:
        raise ConfigError(f"sweep.postselect: {exc}") from exc
    if fmt in ("csv", "both"):
        reports.write_csv(
            out / "sweep.csv",
            [result.axis, "error", "min_eigenvalue", "negativity"],
            [[p.parameter, p.error, p.min_eigenvalue, p.negativity] for p in result.points],
        )
    if fmt in ("json", "both"):
        reports.write_json(
            out / "sweep.json",
            {
                "axis": result.axis,
                "mode": result.mode,
                "scenario": result.scenario,
                "postselect": result.postselect_label,
                "fixed_epsilon": result.fixed_epsilon,
                "fixed_samples": result.fixed_samples,
                "repeats": result.repeats,
                "fitted_slope": result.fitted_slope,
                "fit_intercept": result.fit_intercept,
                "fit_range": list(result.fit_range),
                "points": [
                    {
                        result.axis: p.parameter,
                        "error": p.error,
                        "min_eigenvalue": p.min_eigenvalue,
                        "negativity": p.negativity,
                    }
                    for p in result.points
                ],
            },
        )
    if plot:
        reports.render_sweep_figure(result, out / "sweep.png")
    print(f"sweep: axis {result.axis}, fitted slope {result.fitted_slope:.4f}")


def cmd_sample(cfg: dict, scenario: ScenarioBundle, out: Path, seed: int, fmt: str, plot: bool) -> None:
    section = _section(cfg, "sample", {"count", "mode"})
    final = _require_final(scenario, "sample")
    n = _optional_count(section, "count", "sample")
    if n is None:
        raise ConfigError("sample.count: required")
    mode = _mode(section, "sample")
    dist = joint_distribution(
        scenario.initial_state, measurement_operators(scenario.family, mode), final
    )
    summary = sample(dist, n, seed)
    if fmt in ("csv", "both"):
        reports.write_csv(
            out / "sample.csv",
            ["outcome", *summary.final_labels],
            [
                [summary.weak_labels[m], *summary.counts[m]]
                for m in range(summary.counts.shape[0])
            ],
        )
    if fmt in ("json", "both"):
        reports.write_json(
            out / "sample.json",
            {
                "total": summary.total,
                "seed": summary.seed,
                "weak_labels": list(summary.weak_labels),
                "final_labels": list(summary.final_labels),
                "counts": [list(map(int, row)) for row in summary.counts],
            },
        )
    if plot:
        reports.render_counts_figure(summary, out / "sample.png")
    print(f"sample: {summary.total} draws over {summary.counts.size} cells")


_COMMANDS = {
    "reconstruct": cmd_reconstruct,
    "postselect": cmd_postselect,
    "joint": cmd_joint,
    "sweep": cmd_sweep,
    "sample": cmd_sample,
}


class _Parser(argparse.ArgumentParser):
    # usage problems are configuration errors: exit 1, not argparse's 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="weaktomo", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to the JSON run configuration")
        p.add_argument("--out", required=True, help="output directory (created if missing)")
        p.add_argument("--format", choices=["csv", "json", "both"], default="both")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--no-plot", action="store_true", help="skip figure rendering")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        seed = args.seed if args.seed is not None else int(cfg["seed"])
        scenario = scenario_from_config(cfg, seed)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _COMMANDS[args.command](cfg, scenario, out, seed, args.format, not args.no_plot)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1
    except WeaktomoError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
