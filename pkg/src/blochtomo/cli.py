"""Reproducible experiment runner.

Subcommands:
    moments    moment summary + correlation matrix + rank report
    discord    discord report for the prior's two-copy state
    tomo       sequential Bayesian tomography with a discord trajectory
    definetti  dump the N-copy de Finetti state (N <= 6)
    zerotest   zero-discord dephasing residual of the two-copy state

All randomness comes from seeds named in the JSON config (PCG64
streams), so identical configs produce bitwise-identical output files.
Exit codes: 0 success, 2 config error, 3 zero evidence, 4 numerical
invariant violation.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import bayes, definetti, discord, priors
from .errors import ConfigError, InvariantViolation, ZeroEvidence

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ZERO_EVIDENCE = 3
EXIT_INVARIANT = 4


def _require(cfg: dict, field: str, where: str = "config"):
    if field not in cfg:
        raise ConfigError(f"{where}: missing required field '{field}'")
    return cfg[field]


def load_config(path: str, seed_override=None) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}: invalid JSON ({exc.msg})") from exc
    if cfg.get("schema") != SCHEMA_VERSION:
        raise ConfigError(f"{path}: field 'schema' must be {SCHEMA_VERSION}")
    if seed_override is not None:
        prior = cfg.get("prior", {})
        prior["seed"] = int(seed_override)
        cfg["prior"] = prior
        if "seed" in cfg:
            cfg["seed"] = int(seed_override)
    return cfg


def config_hash(cfg: dict) -> str:
    canonical = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def build_prior(cfg: dict) -> priors.ParticleEnsemble:
    spec = _require(cfg, "prior")
    family = _require(spec, "family", "prior")
    try:
        if family == "uniform_ball":
            return priors.uniform_ball(
                int(_require(spec, "count", "prior")),
                int(_require(spec, "seed", "prior")),
            )
        if family == "uniform_sphere":
            return priors.uniform_sphere(
                int(_require(spec, "count", "prior")),
                int(_require(spec, "seed", "prior")),
            )
        if family == "point_mass":
            return priors.point_mass(
                _require(spec, "points", "prior"),
                _require(spec, "weights", "prior"),
            )
        if family == "line":
            return priors.line_prior(
                _require(spec, "direction", "prior"),
                _require(spec, "offsets", "prior"),
                _require(spec, "weights", "prior"),
            )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"prior: {exc}") from exc
    raise ConfigError(f"prior: unknown family '{family}'")


def _discord_options(cfg: dict) -> dict:
    opts = cfg.get("discord", {})
    return {
        "grid_size": int(opts.get("grid_size", discord.DEFAULT_GRID)),
        "entropic": bool(opts.get("entropic", False)),
    }


def _write(out_dir: Path, name: str, payload: dict, cfg: dict):
    out_dir.mkdir(parents=True, exist_ok=True)
    body = {
        "schema": SCHEMA_VERSION,
        "config_sha256": config_hash(cfg),
        "rng": priors.RNG_ALGORITHM,
    }
    body.update(payload)
    path = out_dir / name
    path.write_text(json.dumps(body, indent=2) + "\n")
    return path


def _write_csv(out_dir: Path, name: str, text: str, cfg: dict):
    out_dir.mkdir(parents=True, exist_ok=True)
    stamp = f"# schema={SCHEMA_VERSION} config_sha256={config_hash(cfg)}\n"
    path = out_dir / name
    path.write_text(stamp + text)
    return path


def cmd_moments(cfg: dict, out_dir: Path):
    ensemble = build_prior(cfg)
    m = definetti.moments(ensemble)
    r = definetti.correlation_matrix(m)
    rank = definetti.rank_test(m, tol=float(cfg.get("rank_tol", 1e-8)))
    _write(out_dir, "moments.json", json.loads(m.to_json()), cfg)
    _write(out_dir, "correlation.json", json.loads(r.to_json()), cfg)
    _write(out_dir, "rank.json", rank, cfg)


def cmd_discord(cfg: dict, out_dir: Path):
    ensemble = build_prior(cfg)
    m = definetti.moments(ensemble)
    opts = _discord_options(cfg)
    report = discord.discord_report(
        m, with_entropic=opts["entropic"], grid_size=opts["grid_size"]
    )
    _write(out_dir, "discord.json", json.loads(report.to_json()), cfg)


def cmd_tomo(cfg: dict, out_dir: Path):
    ensemble = build_prior(cfg)
    true_n = _require(cfg, "true_state")
    schedule = _require(cfg, "schedule")
    if not schedule:
        raise ConfigError("schedule: must list at least one axis")
    axes = [_require(s, "axis", "schedule") for s in schedule]
    shots = {int(s.get("shots", 0)) for s in schedule}
    if len(shots) != 1:
        raise ConfigError("schedule: per-step shots must be uniform")
    steps = int(_require(cfg, "steps"))
    seed = int(_require(cfg, "seed"))
    run = bayes.run_tomography(ensemble, true_n, axes, shots.pop(), steps, seed)
    final = run.posterior
    _write_csv(out_dir, "trajectory.csv", bayes.trajectory_csv(run.trajectory), cfg)
    _write(out_dir, "posterior.json", json.loads(final.to_json()), cfg)
    opts = _discord_options(cfg)
    m = definetti.moments(final)
    report = discord.discord_report(
        m, with_entropic=opts["entropic"], grid_size=opts["grid_size"]
    )
    _write(out_dir, "discord.json", json.loads(report.to_json()), cfg)


def cmd_definetti(cfg: dict, out_dir: Path):
    ensemble = build_prior(cfg)
    copies = int(cfg.get("copies", 2))
    state = definetti.rhoN(ensemble, copies)
    _write(out_dir, f"rho{copies}.json", json.loads(state.to_json()), cfg)


def cmd_zerotest(cfg: dict, out_dir: Path):
    ensemble = build_prior(cfg)
    m = definetti.moments(ensemble)
    state = definetti.rho2(m)
    opts = _discord_options(cfg)
    result = discord.zero_discord_residual(state, grid_size=opts["grid_size"])
    _write(
        out_dir,
        "zerotest.json",
        {
            "residual": result["residual"],
            "best_axis": result["best_axis"].tolist(),
        },
        cfg,
    )


COMMANDS = {
    "moments": cmd_moments,
    "discord": cmd_discord,
    "tomo": cmd_tomo,
    "definetti": cmd_definetti,
    "zerotest": cmd_zerotest,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blochtomo", description="Bloch-ball tomography and discord experiments"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="experiment config JSON")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument(
            "--seed-override", type=int, default=None, help="replace all config seeds"
        )
        p.add_argument(
            "--threads",
            type=int,
            default=1,
            help="worker hint; never changes output bytes",
        )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, seed_override=args.seed_override)
        COMMANDS[args.command](cfg, Path(args.out))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ZeroEvidence as exc:
        print(f"zero evidence: {exc}", file=sys.stderr)
        return EXIT_ZERO_EVIDENCE
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
