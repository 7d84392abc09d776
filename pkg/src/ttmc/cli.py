"""ttmc command line: parse, flatten, explore, check, simulate, serve.

Exit codes: 0 success / property holds, 1 property violation (the lasso is
printed), 2 usage or model error, 3 resource limit exceeded.  JSON output
mode is byte-deterministic (no timing fields).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from ttmc import __version__
from ttmc.diagnostics import LimitExceeded, TtmError
from ttmc.elaborate.dump import dump_json, model_digest
from ttmc.elaborate.flatten import flatten
from ttmc.syntax.parser import parse
from ttmc.syntax.ltl import parse_ltl, parse_property_file


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def load_config(path: str | None) -> dict:
    """Minimal ttmc.toml reader: [section] headers and key = value pairs
    (int, true/false, or quoted string)."""
    candidates = [path] if path else ["ttmc.toml"]
    for cand in candidates:
        if cand and os.path.isfile(cand):
            out: dict[str, object] = {}
            for raw in _read(cand).splitlines():
                line = raw.split("#", 1)[0].strip()
                if not line or line.startswith("["):
                    continue
                if "=" not in line:
                    continue
                key, val = (s.strip() for s in line.split("=", 1))
                if val in ("true", "false"):
                    out[key] = val == "true"
                elif val.startswith('"') and val.endswith('"'):
                    out[key] = val[1:-1]
                else:
                    try:
                        out[key] = int(val)
                    except ValueError:
                        out[key] = val
            return out
    return {}


def state_limit(args, config: dict) -> int:
    if getattr(args, "limit", None):
        return args.limit
    env = os.environ.get("TTMC_LIMIT_STATES")
    if env:
        return int(env)
    if "limit_states" in config:
        return int(config["limit_states"])
    from ttmc.lts.explore import DEFAULT_STATE_LIMIT

    return DEFAULT_STATE_LIMIT


def load_model(path: str, strict_action_edges: bool = False):
    source, diagnostics = parse(_read(path))
    if source is None:
        raise TtmError(diagnostics)
    return source, flatten(source, strict_action_edges=strict_action_edges)


def gather_properties(flat, args):
    """Named formulas from the model's properties block plus any sidecar
    .ltl file given with --props."""
    entries = list(flat.properties)
    if getattr(args, "props", None):
        entries += parse_property_file(_read(args.props))
    return entries


def print_lasso(model, lasso, out=sys.stdout):
    from ttmc.lts.semantics import config_digest

    def line(k, name, cfg, tag):
        print(f"  {tag}{k:3d}  {name.render(model):<32} {config_digest(model, cfg)}",
              file=out)

    print(f"  init {'':36} {config_digest(model, lasso.init)}", file=out)
    for k, (name, cfg) in enumerate(lasso.prefix, start=1):
        line(k, name, cfg, " ")
    if lasso.cycle:
        print("  -- cycle --", file=out)
        for k, (name, cfg) in enumerate(lasso.cycle, start=1):
            line(k, name, cfg, "*")


# ── subcommands ──────────────────────────────────────────────────


def cmd_parse(args, config) -> int:
    source, diagnostics = parse(_read(args.model))
    if diagnostics:
        for d in diagnostics:
            print(f"{args.model}:{d.render()}", file=sys.stderr)
        return 2
    if args.format == "json":
        print(json.dumps({"ok": True, "modules": [m.name for m in source.modules]},
                         sort_keys=True))
    else:
        print(f"ok: {len(source.modules)} module(s), "
              f"{len(source.instances)} instance(s), "
              f"{len(source.properties)} propertie(s)")
    return 0


def cmd_flatten(args, config) -> int:
    _, flat = load_model(args.model, strict_action_edges=args.strict_action_edges)
    if args.dump:
        sys.stdout.write(dump_json(flat))
    else:
        print(f"flattened: {len(flat.variables)} variables, "
              f"{len(flat.timers)} timers, {len(flat.events)} events "
              f"(digest {model_digest(flat)})")
    return 0


def cmd_explore(args, config) -> int:
    from ttmc.lts.explore import explore

    _, flat = load_model(args.model)
    workers = args.workers if args.workers is not None else int(config.get("workers", 1))
    if workers < 1:
        print("worker count must be >= 1", file=sys.stderr)
        return 2
    graph = explore(
        flat,
        limit_states=state_limit(args, config),
        workers=workers,
        store_edges=args.json,
    )
    if args.json:
        print(json.dumps(graph.to_json(), sort_keys=True, indent=2))
    elif args.format == "json":
        payload = {"states": graph.stats["states"],
                   "transitions": graph.stats["transitions"]}
        print(json.dumps(payload, sort_keys=True))
    else:
        s = graph.stats
        print(f"states {s['states']}  transitions {s['transitions']}  "
              f"peak-frontier {s['peak_frontier']}")
    return 0


def cmd_check(args, config) -> int:
    from ttmc.checker import verify

    _, flat = load_model(args.model)
    entries = gather_properties(flat, args)
    if not entries:
        print("model declares no properties", file=sys.stderr)
        return 2
    selected = entries
    if args.prop:
        selected = [e for e in entries if e[0] == args.prop]
        if not selected:
            names = ", ".join(n for n, _, _ in entries)
            print(f"no property {args.prop!r} (have: {names})", file=sys.stderr)
            return 2
    elif not getattr(args, "all", False) and len(entries) > 1:
        names = ", ".join(n for n, _, _ in entries)
        print(f"pick a property with --prop (have: {names}) or pass --all",
              file=sys.stderr)
        return 2

    limit = state_limit(args, config)
    worst = 0
    results = []
    for name, text, pos in selected:
        formula = parse_ltl(text, flat, pos)
        verdict = verify(flat, formula, limit_states=limit)
        results.append((name, verdict))
        if not verdict.holds:
            worst = max(worst, 1)
    if args.format == "json":
        payload = [
            {
                "property": name,
                "holds": v.holds,
                "states": v.statistics.get("states"),
                "product_states": v.statistics.get("product_states"),
            }
            for name, v in results
        ]
        print(json.dumps(payload, sort_keys=True))
    else:
        for name, v in results:
            mark = "holds" if v.holds else "FAILS"
            extra = f"  [{v.statistics.get('states', '?')} states, " \
                    f"{v.statistics.get('time', 0):.2f}s]"
            print(f"{name}: {mark}{extra}")
            if not v.holds and v.counterexample is not None:
                print_lasso(flat, v.counterexample)
    if args.trace_json:
        failing = [(n, v) for n, v in results
                   if not v.holds and v.counterexample is not None]
        if failing:
            from ttmc.sim.trace import lasso_to_trace

            with open(args.trace_json, "w") as fh:
                fh.write(lasso_to_trace(flat, failing[0][1].counterexample))
    return worst


def cmd_simulate(args, config) -> int:
    from ttmc.sim.repl import Repl

    _, flat = load_model(args.model)
    repl = Repl(flat, seed=args.seed)
    if args.script:
        repl.run_script(_read(args.script).splitlines())
    else:
        repl.run_interactive()
    return 0


def cmd_serve(args, config) -> int:
    from ttmc.sim.server import serve

    _, flat = load_model(args.model)
    name = os.path.splitext(os.path.basename(args.model))[0]

    def announce(text):
        print(text, flush=True)

    server = serve(flat, args.port, name=name, ui_dir=args.ui,
                   announce=announce)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def cmd_examples(args, config) -> int:
    from ttmc import models as bundled

    table = bundled.catalog()
    if args.path:
        if args.path not in table:
            print(f"no bundled model {args.path!r}", file=sys.stderr)
            return 2
        print(table[args.path])
        return 0
    if args.copy:
        os.makedirs(args.copy, exist_ok=True)
        import shutil

        for name, path in sorted(table.items()):
            shutil.copy(path, os.path.join(args.copy, os.path.basename(path)))
        print(f"copied {len(table)} models to {args.copy}")
        return 0
    for name, path in sorted(table.items()):
        print(f"{name}\t{path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ttmc",
        description="Model checker and simulator for timed transition models",
    )
    ap.add_argument("--version", action="version", version=f"ttmc {__version__}")
    ap.add_argument("--config", help="path to a ttmc.toml configuration file")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, props=False):
        p.add_argument("model", help=".ttm model file")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--limit", type=int, help="state limit override")
        if props:
            p.add_argument("--props", help="sidecar .ltl property file")

    p = sub.add_parser("parse", help="syntax-check a model")
    common(p)
    p.set_defaults(fn=cmd_parse)

    p = sub.add_parser("flatten", help="flatten module composition")
    common(p)
    p.add_argument("--dump", action="store_true",
                   help="emit the flat model and graphs as JSON")
    p.add_argument("--strict-action-edges", action="store_true",
                   help="action-graph edges also for unprimed references "
                        "(anti-dependencies)")
    p.set_defaults(fn=cmd_flatten)

    p = sub.add_parser("explore", help="explicit-state reachability")
    common(p)
    p.add_argument("--stats", action="store_true", default=True)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--json", action="store_true",
                   help="export the full graph as JSON (small models)")
    p.set_defaults(fn=cmd_explore)

    p = sub.add_parser("check", help="verify LTL properties")
    common(p, props=True)
    p.add_argument("--prop", help="property name to check")
    p.add_argument("--all", action="store_true", help="check every property")
    p.add_argument("--trace-json", dest="trace_json",
                   help="write the first failing lasso as a trace file")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("simulate", help="interactive or scripted simulation")
    common(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--script", help="command file to run instead of a REPL")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("serve", help="HTTP session service for the browser UI")
    common(p)
    p.add_argument("--port", type=int, default=8732)
    p.add_argument("--ui", help="directory of static frontend files to serve")
    p.set_defaults(fn=cmd_serve)

    p = sub.add_parser("examples", help="bundled example models")
    p.add_argument("--path", help="print the path of one bundled model")
    p.add_argument("--copy", help="copy all bundled models into a directory")
    p.set_defaults(fn=cmd_examples)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    config = load_config(args.config)
    try:
        return args.fn(args, config)
    except LimitExceeded as err:
        print(f"limit exceeded: {err.diagnostics[0].message}", file=sys.stderr)
        return 3
    except TtmError as err:
        model_path = getattr(args, "model", "")
        for d in err.diagnostics:
            prefix = f"{model_path}:" if model_path else ""
            print(f"{prefix}{d.render()}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"io error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
