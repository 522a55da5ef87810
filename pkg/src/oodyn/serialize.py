"""Versioned text round-trips for trees and rule tables.

The formats are line-oriented and integer-exact so save -> load -> save is
byte-identical.  Loaded trees carry branch hypotheses and leaf output
counts, which is everything inference needs; candidate tracking is not
persisted, so a loaded model is frozen.
"""

from .state import AE, RD, Predicate
from .tree import BRANCH, LEAF, Foldt, FoldtNode, Hypothesis, TrackingData

FORMAT_VERSION = 1


def _fmt_vec(v: tuple) -> str:
    return ",".join(str(x) for x in v)


def _parse_vec(s: str) -> tuple:
    return tuple(int(x) for x in s.split(","))


def _leaf_line(node) -> str:
    counts = {}
    for (x, y), c in node.tracking.baseline.counts.items():
        counts[y] = counts.get(y, 0) + c
    body = ";".join(f"{_fmt_vec(y)}:{counts[y]}" for y in sorted(counts))
    return f"leaf {body}" if body else "leaf -"


def _branch_line(node) -> str:
    h = node.hypothesis
    p = h.predicate
    kind = "ae" if p.kind == AE else "rd"
    types = ",".join(str(t) for t in p.arg_types)
    return (f"branch {kind} attr={p.attr_id} value={_fmt_vec(p.value)} "
            f"types={types} vars={_fmt_vec(h.var_ids)} new={h.n_new_vars}")


def tree_to_text(tree: Foldt) -> str:
    lines = [f"foldt {FORMAT_VERSION}",
             f"alpha {tree.alpha!r}",
             "args " + ",".join(str(t) for t in tree.arg_types)]

    def emit(node):
        if node.kind == LEAF:
            lines.append(_leaf_line(node))
        else:
            lines.append(_branch_line(node))
            emit(node.left)
            emit(node.right)

    emit(tree.root)
    return "\n".join(lines) + "\n"


def tree_from_text(text: str) -> Foldt:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    head = lines[0].split()
    if head[0] != "foldt" or int(head[1]) != FORMAT_VERSION:
        raise ValueError(f"unsupported tree header: {lines[0]!r}")
    alpha = float(lines[1].split()[1])
    arg_types = _parse_vec(lines[2].split()[1])
    tree = Foldt(alpha, arg_types)
    pos = 3

    def parse() -> FoldtNode:
        nonlocal pos
        line = lines[pos]
        pos += 1
        parts = line.split()
        if parts[0] == "leaf":
            tracking = TrackingData(0, ())
            if parts[1] != "-":
                for item in parts[1].split(";"):
                    y, c = item.split(":")
                    yk = _parse_vec(y)
                    n = int(c)
                    tracking.baseline.counts[(0, yk)] = n
                    tracking.baseline.total += n
                    tracking.baseline._row_totals[0] = \
                        tracking.baseline._row_totals.get(0, 0) + n
                    tracking.baseline._row_sq[0] = \
                        tracking.baseline._row_sq.get(0, 0) + n * n
            return FoldtNode(LEAF, tracking)
        fields = dict(f.split("=", 1) for f in parts[2:])
        kind = AE if parts[1] == "ae" else RD
        types = _parse_vec(fields["types"])
        pred = Predicate(kind, int(fields["attr"]), _parse_vec(fields["value"]), types)
        hyp = Hypothesis(pred, _parse_vec(fields["vars"]), int(fields["new"]), ())
        left = parse()
        right = parse()
        return FoldtNode(BRANCH, TrackingData(0, ()), hyp, left, right)

    tree.root = parse()
    if pos != len(lines):
        raise ValueError("trailing content in tree serialization")
    return tree


def model_to_text(model) -> str:
    parts = [f"ruletable {FORMAT_VERSION} alpha={model.alpha!r}"]
    for key in sorted(model.rules):
        c, m, a = key
        parts.append(f"rule class={c} attr={m} action={a}")
        parts.append(tree_to_text(model.rules[key]).rstrip("\n"))
    return "\n".join(parts) + "\n"


def model_from_text(text: str):
    from .model import TransitionModel
    lines = text.splitlines()
    if not lines or not lines[0].startswith("ruletable"):
        raise ValueError("not a rule-table serialization")
    head = lines[0].split()
    if int(head[1]) != FORMAT_VERSION:
        raise ValueError(f"unsupported model version {head[1]}")
    model = TransitionModel(alpha=float(head[2].split("=", 1)[1]))
    i = 1
    while i < len(lines):
        line = lines[i].strip()
        if not line:
            i += 1
            continue
        if not line.startswith("rule "):
            raise ValueError(f"expected rule header, got {line!r}")
        fields = dict(f.split("=", 1) for f in line.split()[1:])
        key = (int(fields["class"]), int(fields["attr"]), int(fields["action"]))
        j = i + 1
        block = []
        while j < len(lines):
            ln = lines[j].strip()
            if ln.startswith("rule "):
                break
            if ln:
                block.append(ln)
            j += 1
        model.rules[key] = tree_from_text("\n".join(block))
        i = j
    return model
