"""Command-line front end.

Every command writes into an output directory together with a
``manifest.json`` recording the command, inputs, resolved settings, seed and
tool version. Settings resolve as built-in defaults, then the ``--config``
JSON file, then flags given on the command line.

Exit codes: 0 success, 2 validation error, 3 infeasible configuration,
4 I/O error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__, _fmt
from .action_model import ActionSet, ActionSetError, boxing_action_set, load_action_set
from .combo_enum import EnumerationConfig, NoCombinationsError, enumerate_combinations
from .feint_gen import DEFAULT_EPS, enumerate_feints, export_feints, timed_feint
from .reward import ALIGNMENTS, combination_matrix
from .sim import (
    NPCS,
    Scenario,
    ScenarioConfig,
    prepare_matchup,
    run_batch,
    sweep_csv,
    sweep_feint_length,
)
from .strategy import SELECTIONS, policy_entropy, solve_maximin, solve_opponent

EXIT_OK, EXIT_INVALID, EXIT_INFEASIBLE, EXIT_IO = 0, 2, 3, 4
BUILTIN = "builtin:boxing"

DEFAULTS = {
    "gen-feints": {"actions": BUILTIN, "sources": None, "min_duration": 0.0, "max_duration": None, "eps": DEFAULT_EPS},
    "solve": {
        "actions": BUILTIN,
        "lookahead": 5.5,
        "feint_duration": 0.0,
        "feint_source": None,
        "max_feints": 1,
        "alignment": "unit",
        "opponent": "same",
        "select": "vertex",
    },
    "simulate": {
        "actions": BUILTIN,
        "scenario": "basic_vs_basic",
        "episodes": 20,
        "seed": 0,
        "episode_length": 25.0,
        "lookahead": 5.5,
        "feint_duration": 0.5,
        "feint_source": None,
        "max_feints": 1,
        "recovery": 1.0,
        "alignment": "dual",
        "select": "balanced",
    },
    "sweep": {
        "actions": BUILTIN,
        "start": 0.0,
        "stop": 3.0,
        "step": 0.1,
        "episodes": 200,
        "seed": 0,
        "episode_length": 25.0,
        "lookahead": 5.5,
        "recovery": 1.0,
        "alignment": "dual",
        "select": "balanced",
        "attack": None,
        "opp_first": None,
        "opp_second": None,
    },
}


class Output:
    """Collects files written into one output directory plus its manifest."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.written: list[str] = []

    def write(self, name: str, text: str) -> None:
        path = self.root / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        self.written.append(name)

    def manifest(self, command: str, inputs: dict, settings: dict) -> None:
        doc = {
            "command": command,
            "inputs": inputs,
            "config": settings,
            "seed": settings.get("seed"),
            "version": __version__,
            "outputs": sorted(self.written),
        }
        (self.root / "manifest.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _digest(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _resolve(command: str, args: argparse.Namespace) -> dict:
    settings = dict(DEFAULTS[command])
    if args.config is not None:
        doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
        if not isinstance(doc, dict):
            raise ValueError(f"{args.config}: config must be a JSON object")
        unknown = sorted(set(doc) - set(settings))
        if unknown:
            raise ValueError(f"{args.config}: unknown config keys {unknown}")
        settings.update(doc)
    for key in settings:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    return settings


def _inputs(settings: dict, args: argparse.Namespace) -> dict:
    inputs = {}
    if settings["actions"] != BUILTIN:
        inputs["actions"] = {"path": settings["actions"], "sha256": _digest(settings["actions"])}
    if args.config is not None:
        inputs["config"] = {"path": args.config, "sha256": _digest(args.config)}
    return inputs


def _load(path: str) -> ActionSet:
    return boxing_action_set() if path == BUILTIN else load_action_set(path)


def cmd_gen_feints(args: argparse.Namespace) -> int:
    s = _resolve("gen-feints", args)
    aset = _load(s["actions"])
    sources = s["sources"] or [a.id for a in aset.attacks()]
    dmax = math.inf if s["max_duration"] is None else float(s["max_duration"])
    feints = []
    for sid in sources:
        if sid not in aset:
            raise ValueError(f"unknown action {sid!r}")
        feints += enumerate_feints(aset[sid], float(s["min_duration"]), dmax, float(s["eps"]))
    out = Output(args.out)
    export_feints(feints, out.root / "feints.json", aset.joint_dimension)
    out.written.append("feints.json")
    out.manifest("gen-feints", _inputs(s, args), s)
    print(f"{len(feints)} feints written to {out.root / 'feints.json'}")
    return EXIT_OK


def _with_feint(aset: ActionSet, duration: float, source: Optional[str]) -> ActionSet:
    if duration <= 0 or aset.feints():
        return aset
    src = aset[source] if source else aset.attacks()[0]
    return aset.with_actions([timed_feint(src, duration, "F1")])


def cmd_solve(args: argparse.Namespace) -> int:
    s = _resolve("solve", args)
    if s["alignment"] not in ALIGNMENTS:
        raise ValueError(f"alignment must be one of {ALIGNMENTS}")
    if s["opponent"] not in ("same", "basic"):
        raise ValueError("opponent must be 'same' or 'basic'")
    if s["max_feints"] < 0:
        raise ValueError("max_feints must be >= 0")
    aset = _with_feint(_load(s["actions"]), float(s["feint_duration"]), s["feint_source"])
    ecfg = EnumerationConfig(float(s["lookahead"]), allow_feints=s["max_feints"] > 0, max_feints_per_combo=s["max_feints"])
    combos = enumerate_combinations(aset, ecfg)
    if not combos:
        raise NoCombinationsError(f"no admissible combinations for lookahead {s['lookahead']}")
    if s["opponent"] == "basic":
        opp = enumerate_combinations(aset, EnumerationConfig(float(s["lookahead"])))
        if not opp:
            raise NoCombinationsError("no admissible combinations for the basic opponent")
    else:
        opp = combos
    R = combination_matrix(combos, opp, s["alignment"])
    sol = solve_maximin(R, s["select"])
    opp_sol = solve_opponent(R, s["select"])

    out = Output(args.out)
    rows = [["index", "combination", "total_time", "units", "n_feints"]]
    for i, c in enumerate(combos):
        rows.append([str(i), c.label, _fmt.num(c.total_time), str(len(c.units)), str(c.n_feints)])
    out.write("combinations.csv", _fmt.csv_text(rows))
    out.write("reward_matrix.csv", R.to_csv())
    for name, pol in (("policy.csv", sol.agent_policy), ("opponent_policy.csv", opp_sol.agent_policy)):
        rows = [["combination", "probability"]]
        rows += [[label, _fmt.num(p)] for label, p in zip(pol.labels, pol.probabilities)]
        out.write(name, _fmt.csv_text(rows))
    game = {
        "value": sol.value,
        "entropy": policy_entropy(sol.agent_policy),
        "max_probability": sol.agent_policy.max_probability(),
        "n_combinations": len(combos),
    }
    out.write("value.json", json.dumps(game, indent=2, sort_keys=True) + "\n")
    out.manifest("solve", _inputs(s, args), s)
    print(f"{len(combos)} combinations, game value {_fmt.num(sol.value)}")
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    s = _resolve("simulate", args)
    if int(s["episodes"]) < 1:
        raise ValueError("episodes must be >= 1")
    cfg = ScenarioConfig(
        scenario=s["scenario"],
        episode_length=float(s["episode_length"]),
        lookahead=float(s["lookahead"]),
        feint_duration=float(s["feint_duration"]),
        knockdown_recovery=float(s["recovery"]),
        seed=int(s["seed"]),
        alignment=s["alignment"],
        max_feints_per_combo=int(s["max_feints"]),
        feint_source=s["feint_source"],
        policy_select=s["select"],
    )
    aset = _load(s["actions"])
    matchup = prepare_matchup(cfg, aset)
    logs: list = []
    stats = run_batch(cfg, int(s["episodes"]), aset, matchup=matchup, logs=logs)

    out = Output(args.out)
    for old in sorted((out.root / "episodes").glob("episode_*.jsonl")):
        old.unlink()
    for i, log in enumerate(logs):
        out.write(f"episodes/episode_{i:05d}.jsonl", log.to_jsonl())
    out.write("summary.csv", stats.to_csv())
    out.write("choices.csv", stats.choices_csv())
    rows = [["npc", "combination", "probability"]]
    for npc in NPCS:
        pol = matchup.policies[npc]
        rows += [[npc, label, _fmt.num(p)] for label, p in zip(pol.labels, pol.probabilities)]
    out.write("policies.csv", _fmt.csv_text(rows))
    out.manifest("simulate", _inputs(s, args), s)
    print(
        f"{cfg.scenario.value}: {stats.n} episodes, mean A {_fmt.num(stats.mean_a)}, "
        f"mean B {_fmt.num(stats.mean_b)}"
    )
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    s = _resolve("sweep", args)
    start, stop, step = float(s["start"]), float(s["stop"]), float(s["step"])
    if step <= 0 or stop < start:
        raise ValueError("need step > 0 and stop >= start")
    durations = [round(start + k * step, 10) for k in range(int(math.floor((stop - start) / step + 1e-9)) + 1)]
    base = ScenarioConfig(
        episode_length=float(s["episode_length"]),
        lookahead=float(s["lookahead"]),
        knockdown_recovery=float(s["recovery"]),
        seed=int(s["seed"]),
        alignment=s["alignment"],
        policy_select=s["select"],
    )
    rows = sweep_feint_length(
        base,
        durations,
        _load(s["actions"]),
        episodes=int(s["episodes"]),
        attack=s["attack"],
        opp_first=s["opp_first"],
        opp_second=s["opp_second"],
    )
    out = Output(args.out)
    out.write("sweep.csv", sweep_csv(rows))
    out.manifest("sweep", _inputs(s, args), s)
    print(f"{len(rows)} durations swept")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="feintlab", description="Feint generation, combination games and combat simulation.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--actions", help="action-set JSON file (default: built-in five-attack set)")
        p.add_argument("--config", help="JSON file of settings; explicit flags override it")
        p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("gen-feints", help="cut feints out of attacks with frame data")
    common(p)
    p.add_argument("--source", dest="sources", action="append", help="attack id to cut from (repeatable; default: all)")
    p.add_argument("--min-duration", type=float)
    p.add_argument("--max-duration", type=float)
    p.add_argument("--eps", type=float, help="pose tolerance for identical-frame pairs")
    p.set_defaults(func=cmd_gen_feints)

    p = sub.add_parser("solve", help="enumerate combinations and solve the maximin policy")
    common(p)
    p.add_argument("--lookahead", type=float)
    p.add_argument("--feint-duration", type=float, help="add a timed feint of this length (0: none)")
    p.add_argument("--feint-source", help="attack the timed feint is cut from")
    p.add_argument("--max-feints", type=int, help="feints allowed per combination (0 disables feints)")
    p.add_argument("--alignment", choices=ALIGNMENTS)
    p.add_argument("--opponent", choices=("same", "basic"), help="opponent shares the combination list or plays attacks only")
    p.add_argument("--select", choices=SELECTIONS, help="which optimal policy to report when several tie")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("simulate", help="run seeded two-NPC combat episodes")
    common(p)
    p.add_argument("--scenario", choices=[x.value for x in Scenario])
    p.add_argument("--episodes", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--episode-length", type=float)
    p.add_argument("--lookahead", type=float)
    p.add_argument("--feint-duration", type=float)
    p.add_argument("--feint-source")
    p.add_argument("--max-feints", type=int)
    p.add_argument("--recovery", type=float, help="knockdown recovery time")
    p.add_argument("--alignment", choices=ALIGNMENTS)
    p.add_argument("--select", choices=SELECTIONS)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="score feint lengths in the canonical dual-action matchup")
    common(p)
    p.add_argument("--start", type=float)
    p.add_argument("--stop", type=float)
    p.add_argument("--step", type=float)
    p.add_argument("--episodes", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--episode-length", type=float)
    p.add_argument("--lookahead", type=float)
    p.add_argument("--recovery", type=float)
    p.add_argument("--alignment", choices=ALIGNMENTS)
    p.add_argument("--select", choices=SELECTIONS)
    p.add_argument("--attack", help="attack the feints are cut from (default: first attack)")
    p.add_argument("--opp-first")
    p.add_argument("--opp-second")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NoCombinationsError as exc:
        code, msg = EXIT_INFEASIBLE, str(exc)
    except (ActionSetError, ValueError, KeyError, TypeError) as exc:
        code, msg = EXIT_INVALID, str(exc).strip("'\"")
    except OSError as exc:
        code, msg = EXIT_IO, str(exc)
    print(f"feintlab: error: {msg}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
