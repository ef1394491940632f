"""Command-line front end: JSON config in, machine-readable artifacts out.

Subcommands map one-to-one onto the library surface: ``check`` writes the
wavelet and spectral condition reports, ``constants`` the full ledger,
``bound`` the tail certificate for a given plan, ``plan`` the smallest plan
meeting a (u, p) target, ``simulate`` sample-path CSVs, and ``verify`` the
Monte Carlo verification report plus per-replicate sup errors.  Every report
is deterministic for a fixed config and seed apart from the ``meta`` key,
which carries timestamps and the tool version and is excluded from
determinism comparisons.

Exit codes: 0 success, 2 config error, 3 condition failure, 4 infeasible
plan, 5 factorization failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import datetime
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .bounds import ExpansionPlan, epsilon_plan, select_plan, tail_bound_for
from .constants import BoundConstants, assemble, default_delta_q
from .errors import (ConditionFailure, ConfigError, FactorizationError,
                     InfeasiblePlanError, WavecertError)
from .simulate import build_joint, empirical_tail, sample_joint
from .spectral import (SpectralModel, check_spectral_conditions, gaussian_mixture_model,
                       gaussian_model, tabulated_model)
from .wavelet import WaveletPair, check_conditions, make_meyer

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONDITION = 3
EXIT_INFEASIBLE = 4
EXIT_FACTORIZATION = 5


@dataclass
class RunConfig:
    """Validated run configuration (flat JSON document, no includes)."""

    wavelet: dict = field(default_factory=lambda: {"family": "meyer"})
    model: dict = field(default_factory=lambda: {"kind": "gaussian",
                                                 "parameters": {"theta": 1.0}})
    T: float = 1.0
    alpha: float = 1.0
    beta: float = 0.75
    delta_q: Optional[float] = None
    plan: Optional[ExpansionPlan] = None
    target: Optional[dict] = None
    grid_points: int = 257
    replicates: int = 2000
    seed: int = 1
    u_values: Optional[list] = None
    constants_override: Optional[dict] = None
    output_dir: str = "."

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        d = dict(raw)
        if "plan" in d and d["plan"] is not None:
            try:
                d["plan"] = ExpansionPlan.from_dict(d["plan"])
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigError(f"invalid plan block: {exc}") from exc
        cfg = cls(**d)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if not self.alpha > 0.5:
            raise ConfigError(
                f"alpha must exceed 1/2 (log-modulus exponent), got {self.alpha}")
        if not 0.5 < self.beta < 1.0:
            raise ConfigError(
                f"beta must lie in (1/2, 1), got {self.beta}")
        if self.delta_q is not None:
            hi = 2.0 - 1.0 / self.beta
            if not 0.0 < self.delta_q < hi:
                raise ConfigError(
                    f"delta_q must lie in (0, 2 - 1/beta) = (0, {hi:g}), "
                    f"got {self.delta_q}")
        if not self.T > 0.0:
            raise ConfigError(f"T must be positive, got {self.T}")
        if not 2 <= self.grid_points <= 1024:
            raise ConfigError(
                f"grid_points must lie in [2, 1024], got {self.grid_points}")
        if self.replicates < 1:
            raise ConfigError(f"replicates must be positive, got {self.replicates}")
        if self.wavelet.get("family", "meyer") != "meyer":
            raise ConfigError(
                f"unsupported wavelet family {self.wavelet.get('family')!r}; "
                "only 'meyer' is built in")
        if self.target is not None:
            if not {"u", "p"} <= set(self.target):
                raise ConfigError("target must carry both 'u' and 'p'")
            if not self.target["u"] > 0:
                raise ConfigError("target u must be positive")
            if not 0.0 < self.target["p"] < 1.0:
                raise ConfigError("target p must lie in (0, 1)")

    def build_pair(self) -> WaveletPair:
        return make_meyer()

    def build_model(self) -> SpectralModel:
        kind = self.model.get("kind", "gaussian")
        params = self.model.get("parameters", {})
        try:
            if kind == "gaussian":
                return gaussian_model(float(params.get("theta", 1.0)))
            if kind == "gaussian_mixture":
                return gaussian_mixture_model(params["weights"], params["thetas"])
            if kind == "tabulated":
                return tabulated_model(np.asarray(params["z"], dtype=float),
                                       np.asarray(params["values"], dtype=float))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid model parameters for kind {kind!r}: {exc}")
        raise ConfigError(f"unknown model kind {kind!r}")

    def build_constants(self, pair: WaveletPair, model: SpectralModel) -> BoundConstants:
        consts = assemble(pair, model, T=self.T, alpha=self.alpha, beta=self.beta,
                          delta_q=self.delta_q)
        if self.constants_override:
            unknown = set(self.constants_override) - set(consts.to_dict())
            if unknown:
                raise ConfigError(f"unknown ledger keys in constants_override: "
                                  f"{sorted(unknown)}")
            consts = dataclasses.replace(
                consts, **{k: float(v) for k, v in self.constants_override.items()})
            if "sigma_c" not in self.constants_override:
                consts = dataclasses.replace(
                    consts, sigma_c=consts.B0 + consts.B1 + consts.B2)
        return consts

    def grid(self) -> np.ndarray:
        return np.linspace(0.0, self.T, self.grid_points)

    def require_plan(self) -> ExpansionPlan:
        if self.plan is None or self.target is not None:
            raise ConfigError(
                "this subcommand requires exactly one of plan/target: a 'plan' block")
        return self.plan

    def require_target(self) -> dict:
        if self.target is None or self.plan is not None:
            raise ConfigError(
                "this subcommand requires exactly one of plan/target: a 'target' block")
        return self.target


def _meta() -> dict:
    return {
        "generated_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "tool": "wavecert",
        "version": __version__,
    }


def _json_default(obj):
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _write_json(path: Path, payload: dict) -> None:
    payload = dict(payload)
    payload["meta"] = _meta()
    path.write_text(json.dumps(payload, indent=2, default=_json_default) + "\n",
                    encoding="utf-8")


def _write_paths_csv(path: Path, grid: np.ndarray, paths: np.ndarray) -> None:
    header = "replicate," + ",".join(repr(float(t)) for t in grid)
    lines = [header]
    for r, row in enumerate(paths):
        lines.append(str(r) + "," + ",".join(repr(float(v)) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_sup_csv(path: Path, sup_errors: np.ndarray) -> None:
    lines = ["seed_offset,sup_error"]
    for r, v in enumerate(sup_errors):
        lines.append(f"{r},{float(v)!r}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def run(subcommand: str, config: RunConfig) -> int:
    """Execute one subcommand; writes artifacts into config.output_dir."""
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    pair = config.build_pair()
    model = config.build_model()

    if subcommand == "check":
        wrep = check_conditions(pair, config.alpha, 1.0 - config.beta)
        srep = check_spectral_conditions(model)
        _write_json(out / "check.json",
                    {"wavelet": wrep.to_dict(), "spectral": srep.to_dict()})
        if not (wrep.all_satisfied and srep.all_satisfied):
            print("condition failure: see check.json", file=sys.stderr)
            return EXIT_CONDITION
        print(f"all conditions satisfied -> {out / 'check.json'}")
        return EXIT_OK

    consts = config.build_constants(pair, model)

    if subcommand == "constants":
        _write_json(out / "constants.json", consts.to_dict())
        print(f"ledger with A={consts.A:.6g} B={consts.B:.6g} C={consts.C:.6g} "
              f"-> {out / 'constants.json'}")
        return EXIT_OK

    if subcommand == "bound":
        plan = config.require_plan()
        eps = epsilon_plan(plan, consts)
        tb = tail_bound_for(eps, consts)
        payload = {"plan": plan.to_dict(), "epsilon": eps}
        payload.update(tb.to_dict(config.u_values or ()))
        _write_json(out / "bound.json", payload)
        print(f"epsilon={eps:.9g}, u_min={tb.u_min:.9g} -> {out / 'bound.json'}")
        return EXIT_OK

    if subcommand == "plan":
        target = config.require_target()
        plan = select_plan(float(target["u"]), float(target["p"]), consts, config.T)
        eps = epsilon_plan(plan, consts)
        tb = tail_bound_for(eps, consts)
        _write_json(out / "plan.json", {
            "target": {"u": float(target["u"]), "p": float(target["p"])},
            "plan": plan.to_dict(),
            "total_terms": plan.total_terms,
            "epsilon": eps,
            "bound_at_u": tb.probability(float(target["u"])).value,
        })
        print(f"plan n={plan.n} k0p={plan.k0p} kj={list(plan.kj)} "
              f"({plan.total_terms} terms) -> {out / 'plan.json'}")
        return EXIT_OK

    if subcommand == "simulate":
        plan = config.require_plan()
        grid = config.grid()
        spec = build_joint(pair, model, plan, grid)
        draws = sample_joint(spec, config.replicates, config.seed)
        _write_paths_csv(out / "paths.csv", grid, draws[:, :grid.size])
        print(f"{config.replicates} sample paths on {grid.size} points "
              f"-> {out / 'paths.csv'}")
        return EXIT_OK

    if subcommand == "verify":
        plan = config.require_plan()
        grid = config.grid()
        eps = epsilon_plan(plan, consts)
        tb = tail_bound_for(eps, consts)
        if config.u_values:
            u_values = [float(u) for u in config.u_values]
        else:
            u_values = [tb.u_min * f for f in (1.01, 1.5, 2.0, 3.0, 5.0)]
        report = empirical_tail(pair, model, consts, plan, grid, u_values,
                                config.replicates, config.seed)
        _write_json(out / "verify.json", report.to_dict())
        _write_sup_csv(out / "replicates.csv", report.sup_errors)
        status = "OK" if (report.deterministic_ok and report.stochastic_ok) else "VIOLATED"
        print(f"verification {status}: ms_sup={report.ms_sup_observed:.6g} "
              f"<= eps={report.eps_certified:.6g} -> {out / 'verify.json'}")
        return EXIT_OK

    raise ConfigError(f"unknown subcommand {subcommand!r}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="wavecert",
        description="Certified uniform error bounds for truncated wavelet "
                    "expansions of stationary Gaussian processes.")
    parser.add_argument("subcommand",
                        choices=["check", "constants", "bound", "plan",
                                 "simulate", "verify"])
    parser.add_argument("--config", type=str, default=None,
                        help="path to a JSON run configuration")
    parser.add_argument("--output", type=str, default=None,
                        help="output directory (overrides config)")
    parser.add_argument("--seed", type=int, default=None,
                        help="PRNG seed (overrides config)")
    args = parser.parse_args(argv)

    try:
        if args.config is not None:
            try:
                raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
            except OSError as exc:
                raise ConfigError(f"cannot read config: {exc}")
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config is not valid JSON: {exc}")
            config = RunConfig.from_dict(raw)
        else:
            config = RunConfig()
        if args.output is not None:
            config.output_dir = args.output
        if args.seed is not None:
            config.seed = args.seed
        return run(args.subcommand, config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConditionFailure as exc:
        print(f"condition failure: {exc}", file=sys.stderr)
        return EXIT_CONDITION
    except InfeasiblePlanError as exc:
        print(f"infeasible plan: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except FactorizationError as exc:
        print(f"factorization failure: {exc}", file=sys.stderr)
        return EXIT_FACTORIZATION
    except WavecertError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
