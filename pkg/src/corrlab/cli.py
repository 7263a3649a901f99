"""Command-line front end.

Subcommands map one-to-one onto library operations: ``payoff`` (exact or
Monte Carlo payoffs), ``fig3`` (per-state bar data as CSV), ``helstrom``,
``locc-search``, ``cnot-verify``, ``fit-noise`` and ``mutual-info``.

Exit codes: 0 success, 2 usage error, 3 no solution, 4 I/O failure.

A flat KEY=VALUE config file (--config) supplies defaults for any long
option of the chosen subcommand; explicit flags win. Machine-readable
output carries no timestamps, so runs with an explicit --seed are
byte-reproducible.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from corrlab import core, experiment, optics, reports, strategies
from corrlab.ensembles import Correlation, EnsembleSpec, POLARIZATION_LABELS, average_state
from corrlab.experiment import NoiseSpec, RunConfig, StrategySpec
from corrlab.optics import NoSolutionError
from corrlab.reports import fmt6

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NO_SOLUTION = 3
EXIT_IO = 4

_NOISE_MODEL_NAMES = {
    "depolarizing": "statistics_depolarizing",
    "fock": "fock_distinguishability",
}

_BASIS_ALIASES = {"HV": "H", "DA": "D", "RL": "R"}


def _axis_arg(text: str):
    """Axis descriptor: basis name (HV/DA/RL), a label, or "theta,phi"."""
    if text in _BASIS_ALIASES:
        return _BASIS_ALIASES[text]
    if text in POLARIZATION_LABELS:
        return text
    if "," in text:
        theta, phi = text.split(",", 1)
        return (float(theta), float(phi))
    raise ValueError(
        f"invalid axis {text!r}: use one of HV/DA/RL, a polarization label, or theta,phi"
    )


def _fresh_seed() -> int:
    return int.from_bytes(os.urandom(8), "big") >> 1


def _add_common(parser: argparse.ArgumentParser, seeded: bool = True) -> None:
    parser.add_argument("--config", help="flat KEY=VALUE file supplying option defaults")
    parser.add_argument("--output", help="write the report to this path instead of stdout")
    parser.add_argument(
        "--format",
        choices=("json", "csv", "pretty"),
        default=None,
        help="output format (default: pretty; fig3 defaults to csv)",
    )
    if seeded:
        parser.add_argument("--seed", type=int, default=None,
                            help="master seed; generated and echoed when omitted")
        parser.add_argument("--workers", type=int, default=os.cpu_count() or 1,
                            help="worker threads for Monte Carlo chunks")


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(
        prog="corrlab",
        description="Joint vs local discrimination of correlated photon-pair preparations.",
    )
    subs = parser.add_subparsers(dest="command", required=True)
    by_name: dict[str, argparse.ArgumentParser] = {}

    p = subs.add_parser("payoff", help="expected payoff of a strategy on an ensemble")
    p.add_argument("--strategy", choices=("joint", "local", "helstrom"), default="joint")
    p.add_argument("--axis", type=_axis_arg, default="H",
                   help="measurement basis for the local strategy (HV, DA, RL, a label, or theta,phi)")
    p.add_argument("--ensemble", choices=("discrete6", "uniform_sphere", "arc"),
                   default="discrete6")
    p.add_argument("--exact", action="store_true", help="exact probabilities instead of Monte Carlo")
    p.add_argument("--shots", type=int, default=100_000)
    p.add_argument("--noise-model", choices=("none", "depolarizing", "fock"), default="none")
    p.add_argument("--noise-value", type=float, default=0.88)
    _add_common(p)
    by_name["payoff"] = p

    p = subs.add_parser("fig3", help="per-state success-probability bar data (CSV)")
    p.add_argument("--exact", action="store_true",
                   help="exact noisy probabilities in the simulated column")
    p.add_argument("--shots", type=int, default=120_000)
    p.add_argument("--noise-model", choices=("none", "depolarizing", "fock"), default="depolarizing")
    p.add_argument("--noise-value", type=float, default=0.88)
    _add_common(p)
    by_name["fig3"] = p

    p = subs.add_parser("helstrom", help="minimum-error oracle on the class-average states")
    p.add_argument("--ensemble", choices=("discrete6", "uniform_sphere", "arc"),
                   default="discrete6")
    _add_common(p, seeded=False)
    by_name["helstrom"] = p

    p = subs.add_parser("locc-search", help="grid search over fixed local product strategies")
    p.add_argument("--ensemble", choices=("discrete6", "uniform_sphere", "arc"),
                   default="uniform_sphere")
    p.add_argument("--resolution", type=int, default=24)
    p.add_argument("--log", help="write the per-cell search log CSV to this path")
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    _add_common(p, seeded=False)
    by_name["locc-search"] = p

    p = subs.add_parser("cnot-verify", help="check the post-selected gate against CNOT")
    _add_common(p, seeded=False)
    by_name["cnot-verify"] = p

    p = subs.add_parser("fit-noise", help="fit the noise weight to a target payoff")
    p.add_argument("--target", type=float, required=True)
    p.add_argument("--model", choices=("depolarizing", "fock"), default="depolarizing")
    _add_common(p, seeded=False)
    by_name["fit-noise"] = p

    p = subs.add_parser("mutual-info", help="mutual information diagnostics of the Bell analyzer")
    p.add_argument("--variable", choices=experiment.MI_VARIABLES, default="alice_label")
    p.add_argument("--conditioning", choices=experiment.MI_CONDITIONINGS, default="none")
    p.add_argument("--shots", type=int, default=100_000)
    p.add_argument("--noise-model", choices=("none", "depolarizing", "fock"), default="none")
    p.add_argument("--noise-value", type=float, default=0.88)
    p.add_argument("--bootstrap", type=int, default=200)
    _add_common(p)
    by_name["mutual-info"] = p

    return parser, by_name


def _load_config_file(path: str) -> dict[str, str]:
    entries: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected KEY=VALUE, got {line!r}")
            key, value = line.split("=", 1)
            entries[key.strip().replace("-", "_")] = value.strip()
    return entries


def _apply_config_defaults(sub: argparse.ArgumentParser, entries: dict[str, str]) -> None:
    actions = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, raw in entries.items():
        if key not in actions:
            sub.error(f"unknown config key {key!r}")
        action = actions[key]
        if isinstance(action, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
            defaults[key] = raw.lower() in ("1", "true", "yes", "on")
        elif action.type is not None:
            try:
                defaults[key] = action.type(raw)
            except ValueError as exc:
                sub.error(f"bad config value for {key}: {exc}")
        else:
            defaults[key] = raw
        if action.choices is not None and defaults[key] not in action.choices:
            sub.error(f"config value {raw!r} for {key} not in {sorted(action.choices)}")
    sub.set_defaults(**defaults)


def _noise_spec(args) -> NoiseSpec | None:
    model = getattr(args, "noise_model", "none")
    if model == "none":
        return None
    return NoiseSpec(model=_NOISE_MODEL_NAMES[model], value=args.noise_value)


def _class_of_label(label: str) -> str:
    return "identical" if label[0] == label[1] or label in ("identical",) else "orthogonal"


def _payoff_csv(report) -> tuple[list[str], list[list]]:
    rows = [
        [label, _class_of_label(label), p, se] for label, (p, se) in report.per_state.items()
    ]
    return ["label", "class", "p", "stderr"], rows


def cmd_payoff(args) -> tuple[dict, dict, tuple, list[str]]:
    noise = _noise_spec(args)
    kind = {"joint": "joint", "local": "local_same_axis", "helstrom": "helstrom"}[args.strategy]
    spec = StrategySpec(kind=kind, axis_a=args.axis if kind == "local_same_axis" else None)
    ensemble = EnsembleSpec(args.ensemble)
    seed = args.seed if args.seed is not None else _fresh_seed()
    config = {
        "ensemble": args.ensemble,
        "strategy": args.strategy,
        "axis": str(args.axis),
        "noise_model": args.noise_model,
        "noise_value": args.noise_value if noise else None,
        "exact": bool(args.exact),
        "shots": None if args.exact else args.shots,
        "seed": None if args.exact else seed,
    }
    if args.exact:
        report = experiment.theory_report(ensemble, spec, noise)
    else:
        run_cfg = RunConfig(ensemble=ensemble, strategy=spec, noise=noise,
                            shots=args.shots, master_seed=seed)
        report = experiment.payoff_report(experiment.run(run_cfg, workers=args.workers))
    results = reports.payoff_report_dict(report)
    pretty = [f"payoff: {fmt6(report.overall[0])} (stderr {fmt6(report.overall[1])})"]
    pretty += [
        f"  {label}: {fmt6(p)} +/- {fmt6(se)}" for label, (p, se) in report.per_state.items()
    ]
    return config, results, _payoff_csv(report), pretty


def _fig3_rows(args, seed: int) -> list[dict]:
    ensemble = EnsembleSpec("discrete6")
    noise = _noise_spec(args)
    theory_joint = experiment.theory_report(ensemble, StrategySpec("joint"), None)
    theory_local = experiment.theory_report(
        ensemble, StrategySpec("local_same_axis", axis_a="H"), None
    )
    if args.exact:
        simulated = experiment.theory_report(ensemble, StrategySpec("joint"), noise)
    else:
        run_cfg = RunConfig(ensemble=ensemble, strategy=StrategySpec("joint"), noise=noise,
                            shots=args.shots, master_seed=seed)
        simulated = experiment.payoff_report(experiment.run(run_cfg, workers=args.workers))
    rows = []
    for label, (pj, _) in theory_joint.per_state.items():
        rows.append(
            {
                "label": label,
                "class": _class_of_label(label),
                "theory_joint": pj,
                "simulated": simulated.per_state[label][0],
                "theory_local": theory_local.per_state[label][0],
            }
        )
    return rows


def cmd_fig3(args) -> tuple[dict, dict, tuple, list[str]]:
    seed = args.seed if args.seed is not None else _fresh_seed()
    rows = _fig3_rows(args, seed)
    config = {
        "exact": bool(args.exact),
        "noise_model": args.noise_model,
        "noise_value": args.noise_value if args.noise_model != "none" else None,
        "shots": None if args.exact else args.shots,
        "seed": None if args.exact else seed,
    }
    header = ["label", "class", "theory_joint", "simulated", "theory_local"]
    csv_rows = [[r[h] for h in header] for r in rows]
    pretty = [
        f"{r['label']:>2} ({r['class']}): joint {fmt6(r['theory_joint'])}, "
        f"simulated {fmt6(r['simulated'])}, local {fmt6(r['theory_local'])}"
        for r in rows
    ]
    return config, {"bars": rows}, (header, csv_rows), pretty


def cmd_helstrom(args) -> tuple[dict, dict, tuple, list[str]]:
    ensemble = EnsembleSpec(args.ensemble)
    rho0 = average_state(ensemble, Correlation.ORTHOGONAL)
    rho1 = average_state(ensemble, Correlation.IDENTICAL)
    strategy, payoff = strategies.helstrom_strategy(rho0, rho1)
    p_sym, p_anti = core.sym_antisym_projectors()
    gaps = {
        "e1_vs_triplet_rho0": float(np.trace((strategy.povm.e1 - p_sym) @ rho0).real),
        "e1_vs_triplet_rho1": float(np.trace((strategy.povm.e1 - p_sym) @ rho1).real),
        "e0_vs_singlet_rho0": float(np.trace((strategy.povm.e0 - p_anti) @ rho0).real),
        "e0_vs_singlet_rho1": float(np.trace((strategy.povm.e0 - p_anti) @ rho1).real),
    }
    results = {
        "payoff": payoff,
        "expectation_gaps_vs_bell_povm": gaps,
        "max_expectation_gap": max(abs(v) for v in gaps.values()),
    }
    config = {"ensemble": args.ensemble}
    pretty = [f"helstrom payoff: {fmt6(payoff)}",
              f"max expectation gap vs Bell POVM: {fmt6(results['max_expectation_gap'])}"]
    csv_rows = (["key", "value"], [[k, v] for k, v in
                [("payoff", payoff), ("max_expectation_gap", results["max_expectation_gap"])]])
    return config, results, csv_rows, pretty


def cmd_locc_search(args) -> tuple[dict, dict, tuple, list[str]]:
    ensemble = EnsembleSpec(args.ensemble)
    result = strategies.local_grid_search(ensemble, args.resolution, workers=args.workers)
    if args.log:
        header = list(result.LOG_COLUMNS)
        text = reports.csv_text(header, result.log.tolist())
        with open(args.log, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    config = {
        "ensemble": args.ensemble,
        "resolution": args.resolution,
        "log": args.log,
    }
    ta, pa, tb, pb = result.best_angles
    results = {
        "payoff": result.payoff,
        "best": {
            "theta_a": ta,
            "phi_a": pa,
            "theta_b": tb,
            "phi_b": pb,
            "rule_id": result.best_rule_id,
        },
        "cells": int(result.log.shape[0]),
    }
    pretty = [
        f"best local product payoff: {fmt6(result.payoff)}",
        f"axes: theta_a={fmt6(ta)} phi_a={fmt6(pa)} theta_b={fmt6(tb)} phi_b={fmt6(pb)}",
        f"decision rule id: {result.best_rule_id}",
    ]
    csv_payload = (list(result.LOG_COLUMNS), result.log.tolist())
    return config, results, csv_payload, pretty


def cmd_cnot_verify(args) -> tuple[dict, dict, tuple, list[str]]:
    net = optics.build_cnot_network()
    gate = optics.conditional_gate(net)
    phase, dev = optics.cnot_deviation(gate)
    unitarity = float(
        np.abs(net.transfer @ net.transfer.conj().T - np.eye(net.mode_count)).max()
    )
    analyzer = {
        f"{ctrl},{tgt}": bell for (ctrl, tgt), bell in optics.bell_analyzer_map(net).items()
    }
    results = {
        "success_probability": gate.success_probability,
        "max_deviation_from_cnot": dev,
        "global_phase": phase,
        "transfer_unitarity_deviation": unitarity,
        "analyzer_map": analyzer,
        "network": net.to_json_dict(),
    }
    pretty = [
        f"coincidence success probability: {fmt6(gate.success_probability)}",
        f"max deviation from (1/3) CNOT: {fmt6(dev)}",
        f"analyzer map: {analyzer}",
    ]
    csv_payload = (["key", "value"],
                   [["success_probability", gate.success_probability],
                    ["max_deviation_from_cnot", dev],
                    ["global_phase", phase]])
    return {}, results, csv_payload, pretty


def cmd_fit_noise(args) -> tuple[dict, dict, tuple, list[str]]:
    model = _NOISE_MODEL_NAMES[args.model]
    fitted = optics.fit_noise(args.target, model)
    value = fitted.depolarizing if args.model == "depolarizing" else fitted.overlap
    parallel = optics.parallel_identification_under_noise(model, value)
    results = {
        "model": model,
        "target_payoff": args.target,
        "fitted_weight": value,
        "weight_name": "lambda" if args.model == "depolarizing" else "overlap",
        "predicted_parallel_identification": parallel,
    }
    pretty = [
        f"fitted {results['weight_name']}: {fmt6(value)}",
        f"predicted parallel-state identification: {fmt6(parallel)}",
    ]
    if args.model == "depolarizing":
        fidelity = optics.implied_average_gate_fidelity(value)
        results["implied_average_gate_fidelity"] = fidelity
        pretty.append(
            f"average gate fidelity if the weight were a depolarizing channel: {fmt6(fidelity)}"
        )
    config = {"model": args.model, "target": args.target}
    csv_payload = (["key", "value"], [[k, v] for k, v in results.items() if k != "model"])
    return config, results, csv_payload, pretty


def cmd_mutual_info(args) -> tuple[dict, dict, tuple, list[str]]:
    noise = _noise_spec(args)
    seed = args.seed if args.seed is not None else _fresh_seed()
    run_cfg = RunConfig(
        ensemble=EnsembleSpec("discrete6"),
        strategy=StrategySpec("joint"),
        noise=noise,
        shots=args.shots,
        master_seed=seed,
    )
    records = experiment.run(run_cfg, workers=args.workers)
    report = experiment.mutual_info(
        records, args.variable, args.conditioning, n_boot=args.bootstrap, seed=seed
    )
    config = {
        "variable": args.variable,
        "conditioning": args.conditioning,
        "shots": args.shots,
        "seed": seed,
        "noise_model": args.noise_model,
        "noise_value": args.noise_value if noise else None,
        "bootstrap": args.bootstrap,
    }
    results = reports.mutual_info_dict(report)
    pretty = [
        f"mutual information ({args.variable} | {args.conditioning}):",
        f"  plug-in: {fmt6(report.estimate_bits)} bits",
        f"  bias-corrected: {fmt6(report.bias_corrected_bits)} bits",
        f"  bootstrap stderr: {fmt6(report.bootstrap_stderr_bits)} bits",
    ]
    csv_payload = (["key", "value"], [[k, v] for k, v in results.items()])
    return config, results, csv_payload, pretty


_COMMANDS = {
    "payoff": cmd_payoff,
    "fig3": cmd_fig3,
    "helstrom": cmd_helstrom,
    "locc-search": cmd_locc_search,
    "cnot-verify": cmd_cnot_verify,
    "fit-noise": cmd_fit_noise,
    "mutual-info": cmd_mutual_info,
}

_DEFAULT_FORMATS = {"fig3": "csv"}


def main(argv: list[str] | None = None) -> int:
    parser, by_name = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        sub = by_name[args.command]
        try:
            entries = _load_config_file(args.config)
        except OSError as exc:
            print(f"corrlab: cannot read config file: {exc}", file=sys.stderr)
            return EXIT_IO
        except ValueError as exc:
            print(f"corrlab: {exc}", file=sys.stderr)
            return EXIT_USAGE
        _apply_config_defaults(sub, entries)
        args = parser.parse_args(argv)

    try:
        config, results, csv_payload, pretty = _COMMANDS[args.command](args)
    except NoSolutionError as exc:
        print(f"corrlab: no solution: {exc}", file=sys.stderr)
        return EXIT_NO_SOLUTION
    except ValueError as exc:
        print(f"corrlab: invalid value: {exc}", file=sys.stderr)
        return EXIT_USAGE

    fmt = args.format or _DEFAULT_FORMATS.get(args.command, "pretty")
    if fmt == "json":
        text = reports.report_json(args.command, config, results)
    elif fmt == "csv":
        header, rows = csv_payload
        text = reports.csv_text(header, rows)
    else:
        text = "\n".join(pretty) + "\n"

    try:
        if args.output:
            with open(args.output, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"corrlab: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
