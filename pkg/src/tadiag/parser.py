"""Line-oriented model format and flattening of process networks.

See ``docs/model-grammar.ebnf`` for the grammar. A model declares global clocks
and bounded integer variables, then one or more processes. Networks are
flattened eagerly into a single :class:`~tadiag.model.Automaton`: each product
state is a tuple of locations plus the integer-variable valuation, and
``a!``/``a?`` transitions synchronise pairwise (one sender, one receiver).
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field

from ._bounds import BoundOverflowError
from .model import Automaton, Constraint, ModelError, Transition, UpdateMap

KEYWORDS = {"system", "clock", "int", "process", "state", "trans", "target",
            "when", "do", "sync", "label", "true"}
FLAGS = ("initial", "accepting", "committed")

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_STATE_NAME = re.compile(r"[^\s{}]+\Z")
_INT = r"[+-]?\d+"
_OPS = r"<=|>=|==|!=|<|>"
_DIAG = re.compile(rf"^(\w+)\s*-\s*(\w+)\s*({_OPS})\s*({_INT})$")
_LEFT = re.compile(rf"^(\w+)\s*({_OPS})\s*({_INT}|\w+)$")
_RIGHT = re.compile(rf"^({_INT})\s*({_OPS})\s*(\w+)$")
_ASSIGN = re.compile(rf"^(\w+)\s*=\s*(?:({_INT})|(\w+)(?:\s*([+-])\s*(\d+))?)$")
_CLAUSE = re.compile(r"\s+(when|do|sync|label)\s+")
_FLIP = {"<": ">", "<=": ">=", ">": "<", ">=": "<=", "==": "==", "!=": "!="}


class ParseError(ModelError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


@dataclass(frozen=True)
class IntAtom:
    var: str
    op: str
    rhs: int | str

    def holds(self, env: dict[str, int]) -> bool:
        a = env[self.var]
        b = env[self.rhs] if isinstance(self.rhs, str) else self.rhs
        return {"==": a == b, "!=": a != b, "<": a < b, "<=": a <= b,
                ">": a > b, ">=": a >= b}[self.op]


@dataclass(frozen=True)
class IntAssign:
    var: str
    value: int | str
    offset: int = 0

    def evaluate(self, env: dict[str, int]) -> int:
        base = env[self.value] if isinstance(self.value, str) else self.value
        return base + self.offset


@dataclass
class LocalTransition:
    source: int
    target: int
    guard: tuple[Constraint, ...]
    int_guard: tuple[IntAtom, ...]
    update: UpdateMap
    int_assign: tuple[IntAssign, ...]
    sync: str | None  # "a!" / "a?"
    label: str | None
    line: int


@dataclass
class Process:
    name: str
    locations: list[str] = field(default_factory=list)
    initial: list[int] = field(default_factory=list)
    accepting: set[int] = field(default_factory=set)
    committed: set[int] = field(default_factory=set)
    transitions: list[LocalTransition] = field(default_factory=list)


@dataclass
class Network:
    clocks: list[str] = field(default_factory=list)
    ints: dict[str, tuple[int, int, int]] = field(default_factory=dict)  # name -> (lo, hi, init)
    processes: list[Process] = field(default_factory=list)
    targets: list[list[tuple[str, str]]] = field(default_factory=list)
    name: str | None = None

    def clock_index(self, name: str) -> int | None:
        if name == "0":
            return 0
        try:
            return self.clocks.index(name) + 1
        except ValueError:
            return None


_COMMENT = re.compile(r"(^|\s)#.*$")


def strip_comment(line: str) -> str:
    # '#' inside a token (state names such as q#1) is not a comment
    return _COMMENT.sub("", line).strip()


def _check_ident(name: str, lineno: int, what: str) -> str:
    if not _IDENT.match(name) or name in KEYWORDS:
        raise ParseError(lineno, f"invalid {what} name {name!r}")
    return name


def _clock_constraints(x: int, y: int, op: str, c: int, lineno: int) -> list[Constraint]:
    """Constraints for ``x_x - x_y op c`` (either index may be the zero clock)."""
    try:
        if op == "<=":
            return [Constraint(x, y, False, c)]
        if op == "<":
            return [Constraint(x, y, True, c)]
        if op == ">=":
            return [Constraint(y, x, False, -c)]
        if op == ">":
            return [Constraint(y, x, True, -c)]
        if op == "==":
            return [Constraint(x, y, False, c), Constraint(y, x, False, -c)]
    except BoundOverflowError as exc:
        raise ParseError(lineno, f"constant out of range: {exc}") from None
    except ModelError as exc:
        raise ParseError(lineno, f"constant out of range: {exc}") from None
    raise ParseError(lineno, f"operator {op} not allowed on clocks")


def parse_constraints(text: str, clocks: list[str], lineno: int = 0, ints: dict | None = None):
    """Parse a ``&&``-separated guard; returns (clock constraints, integer atoms)."""
    ints = ints or {}
    net = Network(clocks=list(clocks))
    cons: list[Constraint] = []
    atoms: list[IntAtom] = []
    text = text.strip()
    if not text or text == "true":
        return [], []
    for raw in text.split("&&"):
        atom = raw.strip()
        if atom == "true":
            continue
        m = _DIAG.match(atom)
        if m:
            a, b, op, c = m.groups()
            xa, xb = net.clock_index(a), net.clock_index(b)
            if xa is None or xb is None:
                bad = a if xa is None else b
                raise ParseError(lineno, f"unknown clock {bad!r}")
            if xa == xb:
                raise ParseError(lineno, "diagonal over a single clock")
            cons.extend(_clock_constraints(xa, xb, op, int(c), lineno))
            continue
        m = _RIGHT.match(atom)
        if m:
            c, op, name = m.groups()
            if name in ints:
                atoms.append(IntAtom(name, _FLIP[op], int(c)))
                continue
            x = net.clock_index(name)
            if x is None or x == 0:
                raise ParseError(lineno, f"unknown clock {name!r}")
            # c op x  ==  x flip(op) c
            cons.extend(_clock_constraints(x, 0, _FLIP[op], int(c), lineno))
            continue
        m = _LEFT.match(atom)
        if m:
            name, op, rhs = m.groups()
            if name in ints:
                val: int | str = int(rhs) if re.fullmatch(_INT, rhs) else rhs
                if isinstance(val, str) and val not in ints:
                    raise ParseError(lineno, f"unknown variable {val!r}")
                atoms.append(IntAtom(name, op, val))
                continue
            x = net.clock_index(name)
            if x is None or x == 0:
                raise ParseError(lineno, f"unknown clock {name!r}")
            if not re.fullmatch(_INT, rhs):
                raise ParseError(lineno, f"clock compared with non-constant {rhs!r}")
            cons.extend(_clock_constraints(x, 0, op, int(rhs), lineno))
            continue
        raise ParseError(lineno, f"cannot parse constraint {atom!r}")
    return cons, atoms


def _parse_updates(text: str, net: Network, lineno: int):
    clock_items: list[tuple[int, int, int]] = []
    assigns: list[IntAssign] = []
    seen: set[str] = set()
    for raw in text.split(";"):
        part = raw.strip()
        if not part:
            continue
        m = _ASSIGN.match(part)
        if not m:
            raise ParseError(lineno, f"cannot parse update {part!r}")
        lhs, const, src, sign, off = m.groups()
        if lhs in seen:
            raise ParseError(lineno, f"{lhs!r} assigned twice")
        seen.add(lhs)
        if lhs in net.ints:
            if const is not None:
                assigns.append(IntAssign(lhs, int(const)))
            else:
                if src not in net.ints:
                    raise ParseError(lineno, f"unknown variable {src!r}")
                d = int(off or 0) * (-1 if sign == "-" else 1)
                assigns.append(IntAssign(lhs, src, d))
            continue
        x = net.clock_index(lhs)
        if not x:
            raise ParseError(lineno, f"unknown clock {lhs!r}")
        if const is not None:
            c = int(const)
            if c < 0:
                raise ParseError(lineno, f"constant out of range: clock set to {c}")
            clock_items.append((x, 0, c))
        else:
            y = net.clock_index(src)
            if not y:
                raise ParseError(lineno, f"unknown clock {src!r}")
            d = int(off or 0) * (-1 if sign == "-" else 1)
            clock_items.append((x, y, d))
    try:
        up = UpdateMap.of(clock_items)
    except (ModelError, BoundOverflowError) as exc:
        raise ParseError(lineno, str(exc)) from None
    return up, tuple(assigns)


def parse_network(text: str) -> Network:
    net = Network()
    proc: Process | None = None
    pending: list[tuple[int, str]] = []  # trans lines resolved once locations are known

    def current(lineno: int) -> Process:
        nonlocal proc
        if proc is None:
            proc = Process("main")
            net.processes.append(proc)
        return proc

    for lineno, line in enumerate(text.splitlines(), start=1):
        line = strip_comment(line)
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "system":
            net.name = rest or None
        elif head == "clock":
            for name in re.split(r"[,\s]+", rest):
                if not name:
                    continue
                _check_ident(name, lineno, "clock")
                if name in net.clocks or name in net.ints:
                    raise ParseError(lineno, f"duplicate declaration of {name!r}")
                net.clocks.append(name)
        elif head == "int":
            m = re.fullmatch(rf"(\w+)\s+({_INT})\s*\.\.\s*({_INT})(?:\s*=\s*({_INT}))?", rest)
            if not m:
                raise ParseError(lineno, "expected 'int NAME LO..HI [= INIT]'")
            name, lo, hi, init = m.groups()
            _check_ident(name, lineno, "variable")
            if name in net.clocks or name in net.ints:
                raise ParseError(lineno, f"duplicate declaration of {name!r}")
            lo_i, hi_i = int(lo), int(hi)
            init_i = int(init) if init is not None else lo_i
            if lo_i > hi_i or not lo_i <= init_i <= hi_i:
                raise ParseError(lineno, f"constant out of range for {name!r}")
            net.ints[name] = (lo_i, hi_i, init_i)
        elif head == "process":
            name = _check_ident(rest, lineno, "process")
            if any(p.name == name for p in net.processes):
                raise ParseError(lineno, f"duplicate process {name!r}")
            _flush(pending, proc, net)
            proc = Process(name)
            net.processes.append(proc)
        elif head == "state":
            p = current(lineno)
            m = re.fullmatch(r"([^\s{}]+)\s*(?:\{([^}]*)\})?", rest)
            if not m:
                raise ParseError(lineno, "expected 'state NAME [{flags}]'")
            name, flags = m.groups()
            if name in p.locations:
                raise ParseError(lineno, f"duplicate state {name!r}")
            idx = len(p.locations)
            p.locations.append(name)
            for flag in (f.strip() for f in (flags or "").split(",")):
                if not flag:
                    continue
                if flag not in FLAGS:
                    raise ParseError(lineno, f"unknown state flag {flag!r}")
                if flag == "initial":
                    if p.initial:
                        raise ParseError(lineno, "duplicate initial state")
                    p.initial.append(idx)
                elif flag == "accepting":
                    p.accepting.add(idx)
                else:
                    p.committed.add(idx)
        elif head == "trans":
            current(lineno)
            pending.append((lineno, rest))
        elif head == "target":
            entries = []
            for tok in rest.split():
                pname, dot, loc = tok.rpartition(".")
                entries.append((pname if dot else "", loc))
            if not entries:
                raise ParseError(lineno, "empty target")
            net.targets.append(entries)
        else:
            raise ParseError(lineno, f"unknown declaration {head!r}")
    _flush(pending, proc, net)
    if not net.processes:
        raise ParseError(0, "model declares no states")
    for p in net.processes:
        if not p.initial:
            raise ParseError(0, f"process {p.name!r} has no initial state")
    _check_targets(net)
    _check_syncs(net)
    return net


def _flush(pending: list[tuple[int, str]], proc: Process | None, net: Network) -> None:
    if proc is None:
        pending.clear()
        return
    for lineno, rest in pending:
        proc.transitions.append(_parse_trans(lineno, rest, proc, net))
    pending.clear()


def _parse_trans(lineno: int, rest: str, proc: Process, net: Network) -> LocalTransition:
    parts = _CLAUSE.split(" " + rest + " ")
    head = parts[0].strip()
    m = re.fullmatch(r"([^\s{}]+)\s+->\s+([^\s{}]+)", head)
    if not m:
        raise ParseError(lineno, "expected 'trans SRC -> DST ...'")
    src, dst = m.groups()
    for loc in (src, dst):
        if loc not in proc.locations:
            raise ParseError(lineno, f"unknown state {loc!r}")
    clauses: dict[str, str] = {}
    for key, body in zip(parts[1::2], parts[2::2]):
        if key in clauses:
            raise ParseError(lineno, f"repeated clause {key!r}")
        clauses[key] = body.strip()
    guard, atoms = parse_constraints(clauses.get("when", ""), net.clocks, lineno, net.ints)
    up, assigns = _parse_updates(clauses.get("do", ""), net, lineno)
    sync = clauses.get("sync")
    if sync is not None and not re.fullmatch(r"\w+[!?]", sync):
        raise ParseError(lineno, f"sync label must end with ! or ?, got {sync!r}")
    label = clauses.get("label")
    return LocalTransition(proc.locations.index(src), proc.locations.index(dst), tuple(guard),
                           tuple(atoms), up, assigns, sync, label, lineno)


def _check_targets(net: Network) -> None:
    for entries in net.targets:
        for pname, loc in entries:
            procs = [p for p in net.processes if p.name == pname] if pname else net.processes[:1]
            if len(net.processes) > 1 and not pname:
                raise ParseError(0, f"target {loc!r} must name its process")
            if not procs or loc not in procs[0].locations:
                raise ParseError(0, f"unknown target {pname + '.' if pname else ''}{loc}")


def _check_syncs(net: Network) -> None:
    senders: dict[str, set[str]] = {}
    receivers: dict[str, set[str]] = {}
    lines: dict[str, int] = {}
    for p in net.processes:
        for t in p.transitions:
            if t.sync is None:
                continue
            name, kind = t.sync[:-1], t.sync[-1]
            (senders if kind == "!" else receivers).setdefault(name, set()).add(p.name)
            lines.setdefault(name, t.line)
    for name in set(senders) | set(receivers):
        s, r = senders.get(name, set()), receivers.get(name, set())
        if not s or not r or (len(s | r) < 2):
            raise ParseError(lines[name], f"unsynchronized label {name!r}")


# -- flattening ---------------------------------------------------------------

def _merge_updates(a: UpdateMap, b: UpdateMap) -> UpdateMap:
    if a.written & b.written:
        raise ModelError("synchronised transitions update the same clock")
    return UpdateMap.of(list(a.items) + list(b.items))


def flatten(net: Network) -> Automaton:
    """Product automaton of the network, restricted to discretely reachable states."""
    procs = net.processes
    var_names = list(net.ints)
    if len(procs) == 1 and not var_names:
        return _single_process(net)

    def name_of(locs, vals) -> str:
        loc_names = [procs[i].locations[l] for i, l in enumerate(locs)]
        inner = ",".join(loc_names)
        if var_names:
            inner += "|" + ",".join(f"{n}={v}" for n, v in zip(var_names, vals))
        return f"({inner})"

    def accepting(locs) -> bool:
        if net.targets:
            for entries in net.targets:
                ok = True
                for pname, loc in entries:
                    i = next(k for k, p in enumerate(procs) if p.name == pname) if pname else 0
                    if procs[i].locations[locs[i]] != loc:
                        ok = False
                        break
                if ok:
                    return True
            return False
        flagged = [i for i, p in enumerate(procs) if p.accepting]
        return bool(flagged) and all(locs[i] in procs[i].accepting for i in flagged)

    def step(env: dict[str, int], assigns, line: int) -> None:
        for a in assigns:
            val = a.evaluate(env)
            lo, hi, _ = net.ints[a.var]
            if not lo <= val <= hi:
                raise ModelError(f"line {line}: constant out of range: {a.var} := {val}")
            env[a.var] = val

    init = (tuple(p.initial[0] for p in procs), tuple(net.ints[n][2] for n in var_names))
    index: dict = {init: 0}
    order = [init]
    transitions: list[Transition] = []
    queue = deque([init])
    while queue:
        st = queue.popleft()
        locs, vals = st
        env = dict(zip(var_names, vals))
        committed_here = [i for i, p in enumerate(procs) if locs[i] in p.committed]
        moves = []
        for i, p in enumerate(procs):
            for t in p.transitions:
                if t.source != locs[i] or not all(a.holds(env) for a in t.int_guard):
                    continue
                if t.sync is None:
                    moves.append(((i, t),))
                elif t.sync.endswith("!"):
                    for j, p2 in enumerate(procs):
                        if j == i:
                            continue
                        for t2 in p2.transitions:
                            if (t2.source == locs[j] and t2.sync == t.sync[:-1] + "?"
                                    and all(a.holds(env) for a in t2.int_guard)):
                                moves.append(((i, t), (j, t2)))
        for move in moves:
            if committed_here and not any(i in committed_here for i, _ in move):
                continue
            new_locs = list(locs)
            new_env = dict(env)
            guard: list[Constraint] = []
            up = UpdateMap()
            labels = []
            for i, t in move:
                new_locs[i] = t.target
                guard.extend(t.guard)
                up = _merge_updates(up, t.update)
                step(new_env, t.int_assign, t.line)
                if t.sync is not None:
                    labels.append(t.sync[:-1])
                elif t.label is not None:
                    labels.append(t.label)
            nxt = (tuple(new_locs), tuple(new_env[n] for n in var_names))
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
                queue.append(nxt)
            label = labels[0] if labels else None
            if len(procs) > 1 and label is None:
                label = procs[move[0][0]].name
            transitions.append(Transition(index[st], index[nxt], tuple(guard), up, label))
    names = tuple(name_of(l, v) for l, v in order)
    acc = frozenset(k for k, (l, _) in enumerate(order) if accepting(l))
    com = frozenset(k for k, (l, _) in enumerate(order)
                    if any(l[i] in p.committed for i, p in enumerate(procs)))
    return Automaton(tuple(net.clocks), names, 0, tuple(transitions), acc, com)


def _single_process(net: Network) -> Automaton:
    """A lone process without variables maps directly, keeping declaration order."""
    (p,) = net.processes
    trans = tuple(Transition(t.source, t.target, t.guard, t.update, t.label) for t in p.transitions)
    if net.targets:
        acc = frozenset(p.locations.index(loc) for entries in net.targets for _, loc in entries)
    else:
        acc = frozenset(p.accepting)
    return Automaton(tuple(net.clocks), tuple(p.locations), p.initial[0], trans, acc, frozenset(p.committed))


def parse_model(text: str) -> Automaton:
    """Parse and flatten a model; raises :class:`ParseError` on malformed input."""
    return flatten(parse_network(text))


# -- printing -----------------------------------------------------------------

def format_constraint(c: Constraint, clocks) -> str:
    names = ["0", *clocks]
    op = "<" if c.strict else "<="
    if c.rhs == 0:
        return f"{names[c.lhs]} {op} {c.bound}"
    if c.lhs == 0:
        return f"{-c.bound} {op} {names[c.rhs]}"
    return f"{names[c.lhs]} - {names[c.rhs]} {op} {c.bound}"


def format_guard(guard, clocks) -> str:
    return " && ".join(format_constraint(c, clocks) for c in guard) or "true"


def format_update(up: UpdateMap, clocks) -> str:
    names = ["0", *clocks]
    parts = []
    for x, src, off in up.items:
        if src == 0:
            parts.append(f"{names[x]} = {off}")
        elif off == 0:
            parts.append(f"{names[x]} = {names[src]}")
        else:
            parts.append(f"{names[x]} = {names[src]} {'+' if off > 0 else '-'} {abs(off)}")
    return "; ".join(parts)


def pretty_print(a: Automaton) -> str:
    """Flat single-process text; ``parse_model(pretty_print(a)) == a``."""
    lines = [f"clock {c}" for c in a.clocks]
    for q, name in enumerate(a.states):
        if not _STATE_NAME.match(name):
            raise ModelError(f"state name {name!r} cannot be printed")
        flags = [f for f, on in (("initial", q == a.initial), ("accepting", q in a.accepting),
                                 ("committed", q in a.committed)) if on]
        lines.append(f"state {name}" + (f" {{{', '.join(flags)}}}" if flags else ""))
    for t in a.transitions:
        s = f"trans {a.states[t.source]} -> {a.states[t.target]}"
        if t.guard:
            s += " when " + format_guard(t.guard, a.clocks)
        if t.update:
            s += " do " + format_update(t.update, a.clocks)
        if t.label is not None:
            s += f" label {t.label}"
        lines.append(s)
    return "\n".join(lines) + "\n"
