"""The `simulate` REPL: list, fire, undo, state, export, load, next, random.

Also runs non-interactively with --script (one command per line); the same
command set drives the acceptance comparison against the browser UI.
"""

from __future__ import annotations

import sys

from ttmc.diagnostics import TtmError
from ttmc.elaborate import model as fm
from ttmc.lts import semantics as sem
from ttmc.sim import session as ss
from ttmc.sim import trace as tr

HELP = """commands:
  list                 show enabled transitions (fire by number or label)
  fire <n|label> [d..] fire a transition, optionally with demonic draws
  undo [k]             rewind k steps (default 1)
  state                print the current configuration
  history              print fired steps
  random <n>           fire n uniformly random transitions
  export <file>        write the trace file
  load <file>          import a trace (prefix replayed, cycle pending)
  next                 fire the next pending trace step
  quit                 leave the simulator
"""


class Repl:
    def __init__(self, model: fm.FlatModel, seed: int = 0, out=None):
        self.model = model
        self.session = ss.session_new(model, seed)
        self.out = out or sys.stdout

    def emit(self, text: str = ""):
        print(text, file=self.out)

    def show_enabled(self):
        entries = ss.session_enabled(self.session)
        if not entries:
            self.emit("no transitions enabled")
        for k, (_, rendering) in enumerate(entries):
            self.emit(f"  {k}: {rendering}")
        if self.session.pending:
            self.emit(f"  ({len(self.session.pending)} pending trace steps; use `next`)")

    def show_state(self):
        data = sem.config_to_json(self.model, self.session.current)
        self.emit(f"step {len(self.session.steps)}  digest {self.session.digest()}")
        for name, value in data["variables"].items():
            self.emit(f"  {name} = {value}")
        for name, t in data["timers"].items():
            mono = "" if t["mono"] else "  [stopped]"
            self.emit(f"  timer {name} = {t['value']}{mono}")
        for cl in data["clocks"]:
            urgent = "  [urgent]" if cl["urgent"] else ""
            args = ",".join(str(a) for a in cl["fair"])
            label = f"{cl['event']}({args})" if args else cl["event"]
            self.emit(f"  clock {label} = {cl['value']}{urgent}")
        if data["pending"]:
            self.emit(f"  pending: {data['pending']['event']}")

    def find_transition(self, token: str):
        entries = ss.session_enabled(self.session)
        if token.isdigit():
            k = int(token)
            if 0 <= k < len(entries):
                return entries[k][0]
            return None
        compact = token.replace(" ", "")
        for name, rendering in entries:
            if rendering.split("  [")[0].replace(" ", "") == compact:
                return name
        return None

    def command(self, line: str) -> bool:
        """Execute one command; returns False on quit."""
        parts = line.strip().split()
        if not parts:
            return True
        cmd, *args = parts
        try:
            if cmd in ("quit", "exit", "q"):
                return False
            elif cmd == "help":
                self.emit(HELP)
            elif cmd == "list":
                self.show_enabled()
            elif cmd == "state":
                self.show_state()
            elif cmd == "history":
                for k, (name, draws) in enumerate(self.session.steps):
                    extra = f"  draws={list(draws)}" if draws else ""
                    self.emit(f"  {k + 1}: {name.render(self.model)}{extra}")
            elif cmd == "fire":
                if not args:
                    self.emit("usage: fire <n|label> [draws...]")
                    return True
                # Labels may contain spaces after ';' or ','; everything up
                # to the closing parenthesis belongs to the label.
                rest = line.strip()[len("fire"):].strip()
                if ")" in rest:
                    cut = rest.index(")") + 1
                    if rest[cut:cut + 1] == "#":
                        cut += 1
                    token, trailing = rest[:cut], rest[cut:].split()
                else:
                    parts2 = rest.split()
                    token, trailing = parts2[0], parts2[1:]
                name = self.find_transition(token)
                if name is None:
                    self.emit(f"not enabled: {token}")
                    return True
                choice = tuple(_parse_draw(a) for a in trailing) or None
                self.session = ss.session_fire(self.session, name, choice)
                self.emit(f"fired {name.render(self.model)}  ->  {self.session.digest()}")
            elif cmd == "undo":
                k = int(args[0]) if args else 1
                self.session = ss.session_undo(self.session, k)
                self.emit(f"undid {k}  ->  step {len(self.session.steps)}")
            elif cmd == "random":
                n = int(args[0]) if args else 1
                self.session = ss.session_random_walk(self.session, n)
                self.emit(f"walked {n}  ->  {self.session.digest()}")
            elif cmd == "export":
                path = args[0]
                with open(path, "w") as fh:
                    fh.write(tr.trace_export(self.session))
                self.emit(f"wrote {path}")
            elif cmd == "load":
                path = args[0]
                with open(path) as fh:
                    text = fh.read()
                self.session = tr.trace_import(self.model, text, seed=self.session.seed)
                self.emit(
                    f"loaded: at step {len(self.session.steps)}, "
                    f"{len(self.session.pending)} pending"
                )
            elif cmd == "next":
                self.session = tr.fire_pending(self.session)
                self.emit(f"fired pending  ->  {self.session.digest()}")
            else:
                self.emit(f"unknown command {cmd!r} (try `help`)")
        except TtmError as err:
            self.emit(f"error: {err.diagnostics[0].render()}")
        except (OSError, ValueError) as err:
            self.emit(f"error: {err}")
        return True

    def run_script(self, lines) -> None:
        for line in lines:
            line = line.split("--", 1)[0].strip()
            if not line:
                continue
            self.emit(f"> {line}")
            if not self.command(line):
                return

    def run_interactive(self) -> None:
        self.emit("ttmc simulator; `help` lists commands")
        self.show_enabled()
        while True:
            try:
                line = input("ttmc> ")
            except EOFError:
                return
            if not self.command(line):
                return


def _parse_draw(token: str):
    if token == "true":
        return True
    if token == "false":
        return False
    try:
        return int(token)
    except ValueError:
        return token
