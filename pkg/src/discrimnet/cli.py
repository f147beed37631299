"""Command-line interface: certification, discrimination, sweep and demo runs.

Configuration is reproducibility-first: a flat ``key = value`` config file
supplies any of the documented keys, command-line flags override file
values, and every artifact written carries the short hash of the resolved
configuration plus the seed.  Identical configurations produce
byte-identical delimited artifacts.

Exit codes: 0 success, 2 configuration error, 3 certification failed,
4 inconclusive or probe-required refusal, 5 internal error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from . import report as report_mod
from .certify import certify, needs_trusted_probe, run_trusted_probe
from .discriminate import discriminate, extract_readout
from .errors import (
    InconclusiveError,
    MdiRequiredError,
    UncertifiedDevicesError,
    ValidationError,
)
from .guessing import DEFAULT_C_STEP, DEFAULT_Q_STEP, sweep_real_states
from .network import (
    certification_correlations,
    classical_strategy,
    conjugated_strategy,
    discrimination_correlations,
    estimate_table,
    honest_strategy,
    sample_counts,
    werner_strategy,
)
from .qubits import PureState

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CERTIFICATION = 3
EXIT_INCONCLUSIVE = 4
EXIT_INTERNAL = 5

COMMANDS = ("certify", "discriminate", "sweep", "demo")

#: Built-in demo ensemble: the conjugate pair that forces the trusted probe.
DEMO_ENSEMBLE = "0.7853981633974483,1.5707963267948966;0.7853981633974483,4.71238898038469"


class ConfigError(ValueError):
    """Invalid configuration; message names the offending field."""


@dataclass(frozen=True)
class RunConfig:
    """Resolved run configuration (file values overridden by flags)."""

    command: str
    strategy: str = "honest"
    ensemble: str = ""
    priors: str = ""
    shots: str = "exact"
    trials: int = 20
    seed: int = 0
    tolerance: float | None = None
    grid_step: float = DEFAULT_C_STEP
    q_step: float = DEFAULT_Q_STEP
    output: str = ""
    format: str = "csv"
    probe: str = "off"

    def shot_count(self) -> int | None:
        return None if self.shots == "exact" else int(self.shots)

    def as_mapping(self) -> dict[str, object]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _parse_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    known = {f.name for f in fields(RunConfig)}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path!r}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"config: line {lineno} is not 'key = value': {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in known:
            raise ConfigError(f"config.{key}: unknown key (line {lineno})")
        values[key] = value
    return values


def _coerce(name: str, value: str):
    if name in ("trials", "seed"):
        try:
            out = int(value)
        except ValueError:
            raise ConfigError(f"config.{name}: expected an integer, got {value!r}") from None
        if out < 0 or (name == "trials" and out < 1):
            raise ConfigError(f"config.{name}: out of range: {value!r}")
        return out
    if name in ("tolerance", "grid_step", "q_step"):
        try:
            return float(value)
        except ValueError:
            raise ConfigError(f"config.{name}: expected a number, got {value!r}") from None
    return value


def _validate(cfg: RunConfig) -> RunConfig:
    if cfg.command not in COMMANDS:
        raise ConfigError(f"config.command: must be one of {COMMANDS}, got {cfg.command!r}")
    if cfg.shots != "exact":
        try:
            shots = int(cfg.shots)
        except ValueError:
            raise ConfigError(f"config.shots: must be 'exact' or an integer, got {cfg.shots!r}")
        if shots < 1:
            raise ConfigError(f"config.shots: must be >= 1, got {cfg.shots!r}")
    if cfg.format not in ("csv", "json-lines"):
        raise ConfigError(f"config.format: must be csv or json-lines, got {cfg.format!r}")
    if cfg.probe not in ("auto", "off"):
        raise ConfigError(f"config.probe: must be auto or off, got {cfg.probe!r}")
    if not 0.0 < cfg.grid_step <= 2.0:
        raise ConfigError(f"config.grid_step: must lie in (0, 2], got {cfg.grid_step!r}")
    if not 0.0 < cfg.q_step <= 1.0:
        raise ConfigError(f"config.q_step: must lie in (0, 1], got {cfg.q_step!r}")
    name = cfg.strategy
    if not (name in ("honest", "conjugated") or name.startswith("werner:") or name.startswith("classical:")):
        raise ConfigError(
            "config.strategy: must be honest, conjugated, werner:P or classical:FILE, "
            f"got {name!r}"
        )
    return cfg


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="discrimnet",
        description="Simulate, certify and run network-based quantum state discrimination.",
    )
    parser.add_argument("command", nargs="?", choices=COMMANDS, help="what to run")
    parser.add_argument("--config", help="key = value configuration file; flags override it")
    parser.add_argument("--strategy", help="honest | conjugated | werner:P | classical:FILE")
    parser.add_argument(
        "--ensemble",
        help="semicolon-separated omega,theta pairs, e.g. '0,0;0.3927,0'",
    )
    parser.add_argument("--priors", help="comma-separated priors matching the ensemble")
    parser.add_argument("--shots", help="'exact' or shots per input tuple")
    parser.add_argument("--trials", type=int, help="sampled discrimination trials")
    parser.add_argument("--seed", type=int, help="base RNG seed")
    parser.add_argument("--tolerance", type=float, help="certification tolerance override")
    parser.add_argument("--grid-step", dest="grid_step", type=float, help="sweep amplitude step")
    parser.add_argument("--q-step", dest="q_step", type=float, help="sweep prior step")
    parser.add_argument("--output", help="primary artifact path; figures land beside it")
    parser.add_argument("--format", help="csv | json-lines")
    parser.add_argument("--probe", help="auto | off: engage the trusted probe when required")
    return parser


def resolve_config(argv=None) -> RunConfig:
    args = build_parser().parse_args(argv)
    values: dict[str, object] = {}
    if args.config:
        for key, value in _parse_config_file(args.config).items():
            values[key] = _coerce(key, value)
    for key in (
        "command", "strategy", "ensemble", "priors", "shots", "trials",
        "seed", "tolerance", "grid_step", "q_step", "output", "format", "probe",
    ):
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    if "command" not in values or not values["command"]:
        raise ConfigError("config.command: missing (give it as the first argument or in the file)")
    try:
        cfg = RunConfig(**values)  # type: ignore[arg-type]
    except TypeError as exc:
        raise ConfigError(f"config: {exc}") from exc
    return _validate(cfg)


def _parse_classical_file(path: str):
    assignment: dict[str, int] = {}
    for key, value in _parse_classical_lines(path):
        assignment[key] = value
    try:
        return classical_strategy(
            alice_outcomes={x: assignment[f"a{x}"] for x in (1, 2, 3)},
            bob_outcomes={y: assignment[f"b{y}"] for y in range(1, 7)},
            joint_outcome=assignment["bell"],
            charlie_outcomes={z: assignment[f"c{z}"] for z in (1, 2)},
        )
    except KeyError as exc:
        raise ConfigError(f"config.strategy: classical file misses key {exc.args[0]!r}") from exc


def _parse_classical_lines(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"config.strategy: cannot read {path!r}: {exc}") from exc
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        try:
            yield key.strip(), int(value.strip())
        except ValueError:
            raise ConfigError(f"config.strategy: bad classical assignment line {raw!r}") from None


def build_strategy(cfg: RunConfig):
    name = cfg.strategy
    if name == "honest":
        return honest_strategy()
    if name == "conjugated":
        return conjugated_strategy()
    if name.startswith("werner:"):
        try:
            return werner_strategy(float(name.split(":", 1)[1]))
        except (ValueError, ValidationError) as exc:
            raise ConfigError(f"config.strategy: {exc}") from exc
    return _parse_classical_file(name.split(":", 1)[1])


def parse_ensemble(cfg: RunConfig):
    raw = cfg.ensemble or (DEMO_ENSEMBLE if cfg.command == "demo" else "")
    if not raw:
        raise ConfigError("config.ensemble: required for this command")
    states = []
    for i, chunk in enumerate(raw.split(";")):
        parts = chunk.split(",")
        if len(parts) != 2:
            raise ConfigError(f"config.ensemble[{i}]: expected 'omega,theta', got {chunk!r}")
        try:
            omega, theta = float(parts[0]), float(parts[1])
            states.append(PureState(omega, theta).density())
        except (ValueError, ValidationError) as exc:
            raise ConfigError(f"config.ensemble[{i}]: {exc}") from exc
    if cfg.priors:
        try:
            priors = [float(p) for p in cfg.priors.split(",")]
        except ValueError as exc:
            raise ConfigError(f"config.priors: {exc}") from exc
        if len(priors) != len(states):
            raise ConfigError(
                f"config.priors: {len(priors)} priors for {len(states)} ensemble members"
            )
    else:
        priors = [1.0 / len(states)] * len(states)
    if abs(sum(priors) - 1.0) > 1e-9 or min(priors) < 0:
        raise ConfigError(f"config.priors: must be nonnegative and sum to 1, got {priors}")
    return list(zip(priors, states))


def _provenance(cfg: RunConfig) -> dict[str, object]:
    # the artifact location does not affect the computation, so it stays out
    # of the hash: moving an output must not change its recorded provenance
    hashed = {k: v for k, v in cfg.as_mapping().items() if k != "output"}
    return {"config_hash": report_mod.config_hash(hashed), "seed": cfg.seed}


def _derived_seed(base: int, *stream: int) -> int:
    return int(np.random.SeedSequence([base, *stream]).generate_state(1)[0])


def _certification_report(cfg: RunConfig, strategy):
    table = certification_correlations(strategy)
    if cfg.shot_count() is not None:
        table = estimate_table(sample_counts(table, cfg.shot_count(), _derived_seed(cfg.seed, 0)))
    return certify(table, cfg.tolerance)


def cmd_certify(cfg: RunConfig) -> int:
    strategy = build_strategy(cfg)
    report = _certification_report(cfg, strategy)
    for key, value in report.as_mapping().items():
        print(f"{key} = {report_mod.format_value(value)}")
    if cfg.output:
        provenance = _provenance(cfg)
        if cfg.format == "json-lines":
            report_mod.write_records_jsonl(cfg.output, [report.as_mapping()], provenance)
        else:
            report_mod.write_key_value_report(cfg.output, report.as_mapping(), provenance)
        report_mod.render_certification_figure(report, Path(cfg.output).with_suffix(".png"))
    return EXIT_OK if report.passed else EXIT_CERTIFICATION


def _maybe_probe(cfg: RunConfig, strategy, ensemble):
    pairs_need_probe = any(
        needs_trusted_probe(ensemble[i][1], ensemble[j][1])
        for i in range(len(ensemble))
        for j in range(i + 1, len(ensemble))
    )
    if not pairs_need_probe:
        return None
    if cfg.probe != "auto":
        raise MdiRequiredError(
            "ensemble contains a conjugate pair; rerun with probe = auto"
        )
    return run_trusted_probe(strategy, cfg.shot_count(), _derived_seed(cfg.seed, 3))


def _run_trials(cfg: RunConfig, strategy, ensemble, probe, certification):
    shots = cfg.shot_count()
    records = []
    if shots is None:
        truths = list(range(len(ensemble)))
    else:
        rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 1]))
        priors = [q for q, _ in ensemble]
        truths = [int(t) for t in rng.choice(len(ensemble), size=cfg.trials, p=priors)]
    for trial, true_index in enumerate(truths):
        table = discrimination_correlations(strategy, ensemble[true_index][1])
        if shots is not None:
            table = estimate_table(sample_counts(table, shots, _derived_seed(cfg.seed, 2, trial)))
        readout = extract_readout(table)
        record = {"trial": trial, "true_index": int(true_index)}
        try:
            decision = discriminate(readout, ensemble, probe=probe, certification=certification)
        except InconclusiveError:
            record.update(
                {"decided": False, "chosen_index": -1, "mode": "", "margin": 0.0, "correct": False}
            )
        else:
            record.update(
                {
                    "decided": True,
                    "chosen_index": decision.chosen_index,
                    "mode": decision.mode,
                    "margin": decision.margin,
                    "correct": bool(decision.chosen_index == true_index),
                }
            )
        record["used_settings"] = ""
        if record["decided"]:
            record["used_settings"] = "+".join(str(s) for s in decision.used_settings)
        records.append(record)
    return records


def cmd_discriminate(cfg: RunConfig, transcript: bool = False) -> int:
    strategy = build_strategy(cfg)
    ensemble = parse_ensemble(cfg)
    if transcript:
        print(f"step 1: collecting correlations from strategy '{strategy.label}' "
              f"({cfg.shots} shots per input)")
    certification = _certification_report(cfg, strategy)
    if transcript:
        print("step 2: certification gate")
        for key, value in certification.as_mapping().items():
            print(f"  {key} = {report_mod.format_value(value)}")
    if not certification.passed:
        print("certification failed; refusing to discriminate", file=sys.stderr)
        return EXIT_CERTIFICATION
    probe = _maybe_probe(cfg, strategy, ensemble)
    if transcript and probe is not None:
        print(f"step 3a: trusted probe resolved the third-setting sign to {probe.sign:+d}")
    records = _run_trials(cfg, strategy, ensemble, probe, certification)
    decided = [r for r in records if r["decided"]]
    accuracy = (
        sum(1 for r in decided if r["correct"]) / len(decided) if decided else float("nan")
    )
    if transcript:
        print("step 3: decisions")
        for r in records:
            verdict = "correct" if r["correct"] else ("wrong" if r["decided"] else "inconclusive")
            print(
                f"  trial {r['trial']}: true={r['true_index']} chosen={r['chosen_index']} "
                f"mode={r['mode'] or '-'} margin={r['margin']:.4f} [{verdict}]"
            )
    print(f"decided {len(decided)}/{len(records)} trials, accuracy = {accuracy:.4f}")
    if cfg.output:
        provenance = _provenance(cfg)
        fieldnames = [
            "trial", "true_index", "chosen_index", "mode", "margin",
            "correct", "decided", "used_settings",
        ] + list(provenance)
        rows = [{**r, **provenance} for r in records]
        if cfg.format == "json-lines":
            report_mod.write_records_jsonl(cfg.output, records, provenance)
        else:
            report_mod.write_records_csv(cfg.output, fieldnames, rows, provenance)
        stem = Path(cfg.output)
        report_mod.render_decision_figure(records, stem.with_name(stem.stem + "_margins.png"))
    if not decided:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def cmd_sweep(cfg: RunConfig) -> int:
    result = sweep_real_states(q_step=cfg.q_step, c_step=cfg.grid_step)
    print(
        f"sweep over {result.q_values.size} priors x {result.state_c.size} states: "
        f"max over priors of avg gap = {result.max_of_avg:.6f}, "
        f"global max gap = {result.global_max:.6f}"
    )
    if cfg.output:
        provenance = _provenance(cfg)
        stem = Path(cfg.output)
        if cfg.format == "json-lines":
            report_mod.write_records_jsonl(
                cfg.output, report_mod.sweep_pair_records(result, provenance), provenance
            )
        else:
            report_mod.write_sweep_csv(cfg.output, result, provenance)
        report_mod.write_sweep_summary_csv(
            stem.with_name(stem.stem + "_summary.csv"), result, provenance
        )
        report_mod.render_sweep_figures(
            result,
            stem.with_name(stem.stem + "_gap_vs_q.png"),
            stem.with_name(stem.stem + "_gap_heatmap.png"),
        )
    return EXIT_OK


def cmd_demo(cfg: RunConfig) -> int:
    print("end-to-end discrimination demo")
    print(f"ensemble parameters: {cfg.ensemble or DEMO_ENSEMBLE}")
    if cfg.probe == "off":
        cfg = replace(cfg, probe="auto")
    return cmd_discriminate(cfg, transcript=True)


def run(cfg: RunConfig) -> int:
    """Dispatch a resolved configuration; returns the process exit code."""
    handler = {
        "certify": cmd_certify,
        "discriminate": cmd_discriminate,
        "sweep": cmd_sweep,
        "demo": cmd_demo,
    }[cfg.command]
    return handler(cfg)


def main(argv=None) -> int:
    try:
        cfg = resolve_config(argv)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return run(cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (MdiRequiredError, InconclusiveError) as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except UncertifiedDevicesError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_CERTIFICATION
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
