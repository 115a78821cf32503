# mogpdr/main.py
"""Batch entry point: train, simulate, compare, oracle-check."""
from __future__ import annotations

import argparse
import logging
import os
import sys

import numpy as np

from mogpdr import __version__
from mogpdr.config import settings
from mogpdr.drcvar.ambiguity import random_ambiguity_set
from mogpdr.drcvar.oracle import compare_instance
from mogpdr.errors import ConfigError, MoGPDRError, OracleGapError, exit_code_for
from mogpdr.mogp.model import Dataset, MoGPModel
from mogpdr.mogp.training import train_mogp
from mogpdr.mpc.controller import setup_controller
from mogpdr.mpc.models import ControllerKind, ControllerState
from mogpdr.reports.plots import plot_costs, plot_trajectories
from mogpdr.reports.report import write_report
from mogpdr.sim.campaign import CampaignResult, run_campaign
from mogpdr.sim.disturbance import collect_training_data
from mogpdr.sim.harness import build_baselines, build_controllers
from mogpdr.storage.csv_logs import write_campaign
from mogpdr.storage.experiment import ExperimentConfig, load_experiment, save_experiment
from mogpdr.storage.model_store import load_model, save_model
from mogpdr.utils.logging import setup_logging

logger = logging.getLogger("mogpdr.main")

ORACLE_RISK_LEVELS = (0.05, 0.1, 0.2, 0.5)
MODEL_FILE = "model.json"


# ---- Helpers ----


def _output_dir(cfg: ExperimentConfig, override: str | None) -> str:
    out = override or cfg.output_dir or os.path.join(settings.output_dir, cfg.name)
    os.makedirs(out, exist_ok=True)
    return out


def _with_overrides(cfg: ExperimentConfig, args: argparse.Namespace) -> ExperimentConfig:
    campaign = {}
    if getattr(args, "runs", None) is not None:
        campaign["runs"] = args.runs
    if getattr(args, "steps", None) is not None:
        campaign["steps"] = args.steps
    if getattr(args, "seed", None) is not None:
        campaign["base_seed"] = args.seed
    if any(campaign.get(k, 1) < 1 for k in ("runs", "steps")):
        raise ConfigError("--runs and --steps must be positive")
    if campaign:
        cfg = cfg.model_copy(update={"campaign": cfg.campaign.model_copy(update=campaign)})
    return cfg


def _train(cfg: ExperimentConfig, out: str, seed: int | None = None) -> MoGPModel:
    sys_model = cfg.system_model()
    tr = cfg.training
    data = collect_training_data(sys_model, cfg.disturbance, tr.n_points, tr.seed if seed is None else seed)
    model = train_mogp(
        data,
        tr.gating,
        tr.kernel_init,
        tr.seed if seed is None else seed,
        tr.sweeps,
        support=sys_model.support,
        refit_every=tr.refit_every,
    )
    save_model(model, os.path.join(out, MODEL_FILE))
    return model


def _model_for(cfg: ExperimentConfig, out: str) -> MoGPModel:
    path = os.path.join(out, MODEL_FILE)
    if os.path.exists(path):
        logger.info("reusing trained model %s", path)
        return load_model(path)
    logger.info("no model at %s, training one", path)
    return _train(cfg, out)


def _finish(cfg: ExperimentConfig, result: CampaignResult, out: str) -> int:
    sys_model = cfg.system_model()
    write_campaign(result, out, sys_model.n, sys_model.m)
    for s in result.summaries.values():
        print(
            f"{s.controller:12s} mean cost {s.mean_cost:10.3f}  violation rate {s.violation_rate:.3f}  "
            f"infeasible {s.infeasible_steps}  aborted {s.aborted_runs}"
        )
    if any(s.aborted_runs for s in result.summaries.values()):
        return 4
    if any(s.infeasible_steps for s in result.summaries.values()):
        return 4
    return 0


# ---- Commands ----


def cmd_train(args: argparse.Namespace) -> int:
    cfg = load_experiment(args.config)
    out = _output_dir(cfg, args.out)
    save_experiment(cfg, os.path.join(out, "experiment.json"))
    model = _train(cfg, out, args.seed)
    for d, m in enumerate(model.n_experts):
        print(f"dim {d}: M = {m}")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    try:
        kind = ControllerKind(args.controller)
    except ValueError:
        valid = ", ".join(k.value for k in ControllerKind)
        raise ConfigError(f"unknown controller '{args.controller}' (valid: {valid})") from None
    cfg = _with_overrides(load_experiment(args.config), args)
    out = _output_dir(cfg, args.out)
    sys_model = cfg.system_model()

    ctrl: ControllerState
    if kind is ControllerKind.ROBUST_TUBE:
        ctrl = setup_controller(sys_model, cfg.mpc, kind=kind)
    else:
        model = _model_for(cfg, out)
        if kind is ControllerKind.MOGP_DR:
            ctrl = setup_controller(sys_model, cfg.mpc, model, kind)
        else:
            data = Dataset(model.inputs, model.outputs)
            gating = cfg.training.gating
            ctrl = build_baselines(sys_model, cfg.mpc, data, cfg.training.kernel_init, gating)[kind]

    c = cfg.campaign
    result = run_campaign(
        {kind: ctrl},
        sys_model,
        cfg.disturbance,
        np.asarray(c.x0),
        c.steps,
        c.runs,
        c.base_seed,
        audit_runs=c.audit_runs,
    )
    return _finish(cfg, result, out)


def cmd_compare(args: argparse.Namespace) -> int:
    cfg = _with_overrides(load_experiment(args.config), args)
    out = _output_dir(cfg, args.out)
    sys_model = cfg.system_model()
    model = _model_for(cfg, out)
    data = Dataset(model.inputs, model.outputs)
    controllers = build_controllers(sys_model, cfg.mpc, model, data, cfg.training.kernel_init, cfg.training.gating)

    c = cfg.campaign
    result = run_campaign(
        controllers,
        sys_model,
        cfg.disturbance,
        np.asarray(c.x0),
        c.steps,
        c.runs,
        c.base_seed,
        audit_runs=c.audit_runs,
    )
    code = _finish(cfg, result, out)
    write_report(
        result, os.path.join(out, "report.md"), name=cfg.name, steps=c.steps, base_seed=c.base_seed, risk=cfg.mpc.risk
    )
    plot_costs(result, os.path.join(out, "cost.svg"))
    plot_trajectories(result, sys_model.state_box, cfg.disturbance.plane, os.path.join(out, "trajectories.svg"))
    for name in result.controllers:
        if name != ControllerKind.ROBUST_TUBE.value and ControllerKind.ROBUST_TUBE.value in result.summaries:
            print(f"{name}: {result.reduction(name, ControllerKind.ROBUST_TUBE.value):.1f} % below robust-tube")
    return code


def cmd_oracle_check(args: argparse.Namespace) -> int:
    if args.instances < 1:
        raise ConfigError("--instances must be at least 1")
    rng = np.random.default_rng(args.seed if args.seed is not None else 0)
    worst = 0.0
    for i in range(args.instances):
        eps = float(rng.choice(ORACLE_RISK_LEVELS))
        aset = random_ambiguity_set(rng)
        cmp = compare_instance(aset, eps, settings.oracle_grid_points, settings.solver_tol)
        worst = max(worst, cmp.gap)
        if cmp.gap > settings.oracle_rel_tol:
            print(f"instance {i} (eps={eps}): socp {cmp.socp!r} vs oracle {cmp.oracle!r}, gap {cmp.gap:.3e}")
            for c in aset.components:
                print(f"  weight={c.weight!r} mean={c.mean!r} variance={c.variance!r} [{c.lower!r}, {c.upper!r}]")
            raise OracleGapError(f"relative gap {cmp.gap:.3e} exceeds {settings.oracle_rel_tol:g}")
    print(f"{args.instances} instances, max relative gap {worst:.3e}")
    return 0


# ---- Argument parsing ----


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mogpdr", description="MoGP distributionally robust MPC experiments")
    ap.add_argument("--log-level", default=None, help="overrides MOGPDR_LOG_LEVEL")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def experiment_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", default="numerical", help="preset name (numerical, quadrotor, zero) or JSON file")
        p.add_argument("--out", default=None, help="output directory (default: <output_dir>/<experiment name>)")
        p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("train", help="collect data and train the MoGP disturbance model")
    experiment_args(p)
    p.set_defaults(func=cmd_train)

    for name, func, text in (
        ("simulate", cmd_simulate, "closed-loop campaign for one controller"),
        ("compare", cmd_compare, "paired campaign of all controllers, report and figures"),
    ):
        p = sub.add_parser(name, help=text)
        experiment_args(p)
        p.add_argument("--runs", type=int, default=None)
        p.add_argument("--steps", type=int, default=None)
        if name == "simulate":
            p.add_argument("--controller", default=ControllerKind.MOGP_DR.value)
        p.set_defaults(func=func)

    p = sub.add_parser("oracle-check", help="cone program vs discretised moment problem on random instances")
    p.add_argument("--instances", type=int, default=100)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_oracle_check)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)
    try:
        return int(args.func(args))
    except MoGPDRError as e:
        logger.error("%s", e)
        print(f"error: {e}", file=sys.stderr)
        return exit_code_for(e)


if __name__ == "__main__":
    sys.exit(main())
