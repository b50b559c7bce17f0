"""Command-line front end.

    localpulse synthesize --config job.json [--out DIR]
    localpulse verify     --config job.json [--out DIR] [--schedule schedule.json]
    localpulse table      --config job.json [--out DIR] [--orders 1,10,100]

Exit codes: 0 success, 2 configuration error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import jsonio
from .errors import InvalidInputError, UnsupportedScheduleError
from .performance import (
    PerformanceParams,
    closed_form_jt,
    closed_form_jte,
    format_table,
    measured_jte,
    optimal_amplitude,
    table1,
)
from .scheduler import Schedule, c_constants, slot_count, synthesize, transition_spec
from .simulator import (
    exact_unitary,
    pulse_sample_times,
    schedule_to_field,
    simulate_schedule,
    write_controls_csv,
    write_trajectory_csv,
)
from .states import PureState, fidelity, random_state, state_from_json, to_geometric
from .waveforms import WaveformFamily

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VERIFY = 3

FIDELITY_THRESHOLD = 1.0 - 1e-6

CONFIG_KEYS = {
    "dim",
    "initial",
    "target",
    "family",
    "order",
    "lambda",
    "bound",
    "rk4_steps_per_pulse",
    "samples_per_pulse",
    "orders",
    "output_dir",
}

log = logging.getLogger("localpulse")


class ConfigError(Exception):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"config field '{field_name}': {message}")
        self.field_name = field_name


@dataclass
class JobConfig:
    dim: int
    initial: PureState
    target: PureState
    family: WaveformFamily
    lam: float
    bound: float | None
    rk4_steps_per_pulse: int = 2000
    samples_per_pulse: int = 512
    orders: list[int] = field(default_factory=lambda: [1, 2, 5, 10])
    output_dir: Path = Path(".")

    @property
    def params(self) -> PerformanceParams:
        return PerformanceParams(self.lam, self.bound)

    @classmethod
    def from_dict(cls, raw: dict) -> "JobConfig":
        if not isinstance(raw, dict):
            raise ConfigError("<root>", "config must be a JSON object")
        unknown = sorted(set(raw) - CONFIG_KEYS)
        if unknown:
            raise ConfigError(unknown[0], "unknown key")

        def require(name):
            if name not in raw:
                raise ConfigError(name, "missing")
            return raw[name]

        states = {}
        for name in ("initial", "target"):
            try:
                states[name] = state_from_json(require(name))
            except InvalidInputError as exc:
                raise ConfigError(name, str(exc)) from None
        dim = raw.get("dim", states["initial"].dim)
        if not isinstance(dim, int) or isinstance(dim, bool) or dim < 2:
            raise ConfigError("dim", f"must be an integer >= 2, got {dim!r}")
        for name, st in states.items():
            if st.dim != dim:
                raise ConfigError(name, f"has dimension {st.dim}, expected {dim}")

        try:
            family = WaveformFamily(require("family"), raw.get("order"))
        except InvalidInputError as exc:
            bad = "order" if "order" in str(exc) else "family"
            raise ConfigError(bad, str(exc)) from None

        lam = require("lambda")
        if not _is_number(lam) or not (math.isfinite(lam) and lam > 0):
            raise ConfigError("lambda", f"must be a positive number, got {lam!r}")

        bound = raw.get("bound", "unbounded")
        if bound == "unbounded" or bound is None:
            bound = None
        elif not _is_number(bound) or not (math.isfinite(bound) and bound > 0):
            raise ConfigError("bound", f"must be a positive number or \"unbounded\", got {bound!r}")

        steps = raw.get("rk4_steps_per_pulse", 2000)
        if not isinstance(steps, int) or isinstance(steps, bool) or steps < 1:
            raise ConfigError("rk4_steps_per_pulse", f"must be a positive integer, got {steps!r}")
        samples = raw.get("samples_per_pulse", 512)
        if not isinstance(samples, int) or isinstance(samples, bool) or samples < 1:
            raise ConfigError("samples_per_pulse", f"must be a positive integer, got {samples!r}")
        orders = raw.get("orders", [1, 2, 5, 10])
        if not isinstance(orders, list) or not all(
            isinstance(n, int) and not isinstance(n, bool) and n >= 1 for n in orders
        ):
            raise ConfigError("orders", f"must be a list of integers >= 1, got {orders!r}")

        return cls(
            dim=dim,
            initial=states["initial"],
            target=states["target"],
            family=family,
            lam=float(lam),
            bound=None if bound is None else float(bound),
            rk4_steps_per_pulse=steps,
            samples_per_pulse=samples,
            orders=list(orders),
            output_dir=Path(raw.get("output_dir", ".")),
        )


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def load_config(path: str | Path) -> JobConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError("--config", f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("--config", f"invalid JSON: {exc}") from None
    return JobConfig.from_dict(raw)


def optimal_schedule(cfg: JobConfig) -> Schedule:
    amp = optimal_amplitude(cfg.family, cfg.params)
    return synthesize(transition_spec(cfg.initial, cfg.target, cfg.family, amp))


def _out_dir(cfg: JobConfig, override: str | None) -> Path:
    out = Path(override) if override else cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_synthesize(cfg: JobConfig, out: Path) -> int:
    schedule = optimal_schedule(cfg)
    jsonio.write(out / "schedule.json", schedule.to_json())
    write_controls_csv(
        out / "controls.csv",
        schedule_to_field(schedule),
        pulse_sample_times(schedule, cfg.samples_per_pulse),
    )
    c1, c2 = c_constants(to_geometric(cfg.initial), to_geometric(cfg.target))
    summary = {
        "pulse_count": len(schedule.pulses),
        "t_f": schedule.t_f,
        "j_t": closed_form_jt(cfg.family, c1, c2, cfg.bound),
        "j_te": measured_jte(schedule, cfg.lam),
        "j_te_closed_form": closed_form_jte(cfg.family, c1, c2, cfg.params),
        "amplitude": optimal_amplitude(cfg.family, cfg.params),
    }
    sys.stdout.write(jsonio.dumps(summary))
    return EXIT_OK


def verify_schedule(cfg: JobConfig, schedule: Schedule) -> dict:
    """Run both propagators on ``schedule`` and collect the report fields."""
    if schedule.dim != cfg.dim:
        raise ConfigError("--schedule", f"schedule dim {schedule.dim} does not match config dim {cfg.dim}")
    exact_fid = None
    exact_vec = None
    try:
        exact_vec = exact_unitary(schedule) @ cfg.initial.amplitudes
        exact_fid = fidelity(PureState.from_vector(exact_vec), cfg.target)
    except UnsupportedScheduleError as exc:
        log.warning("%s", exc)
    traj = simulate_schedule(schedule, cfg.initial, cfg.rk4_steps_per_pulse, target=cfg.target)
    numeric_fid = fidelity(traj.final, cfg.target)
    discrepancy = None if exact_vec is None else float(np.linalg.norm(traj.final_vector - exact_vec))
    return {
        "traj": traj,
        "report": {
            "dim": schedule.dim,
            "pulse_count": len(schedule.pulses),
            "t_f": schedule.t_f,
            "exact_fidelity": exact_fid,
            "numeric_fidelity": numeric_fid,
            "propagator_discrepancy": discrepancy,
            "measured_jte": measured_jte(schedule, cfg.lam),
            "rk4_steps_per_pulse": cfg.rk4_steps_per_pulse,
            "rk4_renormalizations": traj.renormalizations,
            "rk4_max_norm_drift": traj.max_norm_drift,
            "fidelity_threshold": FIDELITY_THRESHOLD,
            "passed": numeric_fid >= FIDELITY_THRESHOLD,
        },
    }


def cmd_verify(cfg: JobConfig, out: Path, schedule_path: str | None = None) -> int:
    if schedule_path:
        try:
            with open(schedule_path, encoding="utf-8") as fh:
                schedule = Schedule.from_json(json.load(fh))
        except (OSError, json.JSONDecodeError, InvalidInputError, TypeError, ValueError) as exc:
            raise ConfigError("--schedule", str(exc)) from None
    else:
        schedule = optimal_schedule(cfg)
    result = verify_schedule(cfg, schedule)
    traj = result["traj"]
    write_trajectory_csv(
        out / "trajectory.csv",
        traj,
        traj.nearest_indices(pulse_sample_times(schedule, cfg.samples_per_pulse)),
    )
    report = result["report"]
    jsonio.write(out / "report.json", report)
    sys.stdout.write(jsonio.dumps(report))
    return EXIT_OK if report["passed"] else EXIT_VERIFY


def cmd_table(cfg: JobConfig, out: Path, orders: list[int] | None = None) -> int:
    c1, c2 = c_constants(to_geometric(cfg.initial), to_geometric(cfg.target))
    rows = table1(c1, c2, cfg.params, orders if orders is not None else cfg.orders)
    payload = {
        "c1": c1,
        "c2": c2,
        "lambda": cfg.lam,
        "bound": "unbounded" if cfg.bound is None else cfg.bound,
        "rows": [r.to_json() for r in rows],
    }
    jsonio.write(out / "table1.json", payload)
    text = format_table(rows)
    (out / "table1.txt").write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK


def cmd_selftest(seed: int, count: int, steps_per_pulse: int) -> int:
    """Random transitions through both propagators; exit 3 on any failure."""
    rng = np.random.default_rng(seed)
    families = [WaveformFamily("bb"), WaveformFamily("ls"), WaveformFamily("ln", 3)]
    worst = {"exact_fidelity": 1.0, "numeric_fidelity": 1.0, "propagator_discrepancy": 0.0}
    ok = True
    for i in range(count):
        dim = int(rng.integers(2, 7))
        fam = families[i % len(families)]
        cfg = JobConfig(
            dim=dim,
            initial=random_state(rng, dim),
            target=random_state(rng, dim),
            family=fam,
            lam=float(rng.uniform(0.5, 5.0)),
            bound=float(rng.uniform(0.5, 3.0)),
            rk4_steps_per_pulse=steps_per_pulse,
        )
        schedule = optimal_schedule(cfg)
        rep = verify_schedule(cfg, schedule)["report"]
        worst["exact_fidelity"] = min(worst["exact_fidelity"], rep["exact_fidelity"])
        worst["numeric_fidelity"] = min(worst["numeric_fidelity"], rep["numeric_fidelity"])
        worst["propagator_discrepancy"] = max(worst["propagator_discrepancy"], rep["propagator_discrepancy"])
        ok &= rep["passed"] and rep["exact_fidelity"] >= 1 - 1e-8 and len(schedule.pulses) <= slot_count(dim)
    sys.stdout.write(jsonio.dumps({"seed": seed, "count": count, "passed": ok, **worst}))
    return EXIT_OK if ok else EXIT_VERIFY


def _parse_orders(text: str) -> list[int]:
    try:
        orders = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not orders or min(orders) < 1:
        raise argparse.ArgumentTypeError("orders must be integers >= 1")
    return orders


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="localpulse",
        description="Local waveform pulse synthesis for N-level state transitions.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, metavar="{synthesize,verify,table}")

    def job_parser(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="JSON job description")
        p.add_argument("--out", help="output directory (overrides output_dir)")
        return p

    job_parser("synthesize", "write the optimal-amplitude schedule and control traces")
    p = job_parser("verify", "propagate a schedule both ways and report fidelities")
    p.add_argument("--schedule", help="verify this schedule.json instead of synthesizing one")
    p = job_parser("table", "time / time-energy table for all waveform families")
    p.add_argument("--orders", type=_parse_orders, help="polynomial orders, e.g. 1,10,100")

    p = sub.add_parser("selftest")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--steps", type=int, default=2000)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        if args.command == "selftest":
            if args.seed < 0 or args.count < 1 or args.steps < 1:
                raise ConfigError("--seed/--count/--steps", "must be nonnegative / positive integers")
            return cmd_selftest(args.seed, args.count, args.steps)
        cfg = load_config(args.config)
        out = _out_dir(cfg, args.out)
        if args.command == "synthesize":
            return cmd_synthesize(cfg, out)
        if args.command == "verify":
            return cmd_verify(cfg, out, args.schedule)
        return cmd_table(cfg, out, args.orders)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
