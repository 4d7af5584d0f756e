"""Reading and writing structures, systems, pointed pairs and formula files.

Format (``#`` starts a comment, whitespace is free)::

    signature { R/2; c }
    structure A { universe: 0 1 2; R: (0 1) (1 2); c: 0 }
    system S { structures: A B; arrows: A -> B [0->0, 1->1]; close: true }

Elements are decimal naturals. The signature block is optional when every
relation is nonempty somewhere; an empty relation can also be declared inline
as ``R/2:``. Without a system block a file denotes the identity-only system on
its structures. ``structures:`` entries may also name another file, whose
structures are loaded relative to the current one.
"""

from __future__ import annotations

import os
import re

from .formulas import Formula, parse_many, to_sexpr
from .structures import ElementMap, Signature, Structure, StructureError, parse_signature
from .systems import Arrow, PotentialistSystem, SystemsError, validate_or_close


class TextError(ValueError):
    pass


_BLOCK = re.compile(r"(signature|structure|system)\s*([^\s{]*)\s*\{([^}]*)\}", re.S)
_TUPLE = re.compile(r"\(([^)]*)\)")
_ARROW = re.compile(r"([^\s,\[\]]+)\s*->\s*([^\s,\[\]]+)\s*\[([^\]]*)\]")


def _strip_comments(text: str) -> str:
    return "\n".join(line.split("#", 1)[0] for line in text.splitlines())


def _elem(tok: str) -> int:
    if not tok.isdigit():
        raise TextError(f"element ids are decimal naturals, got {tok!r}")
    return int(tok)


def _entries(body: str):
    for part in body.split(";"):
        part = part.strip()
        if not part:
            continue
        if ":" not in part:
            raise TextError(f"expected 'key: value', got {part!r}")
        key, val = part.split(":", 1)
        yield key.strip(), val.strip()


def _parse_sig_block(body: str) -> Signature:
    items = [x.strip().replace("/", ":") for x in re.split(r"[;,\s]+", body) if x.strip()]
    return parse_signature(",".join(items))


def _parse_structure_raw(name: str, body: str):
    universe, rels, consts, arities = None, {}, {}, {}
    for key, val in _entries(body):
        if key == "universe":
            universe = [_elem(t) for t in val.split()]
            continue
        if "/" in key:
            key, ar = key.split("/", 1)
            arities[key] = int(ar)
        if _TUPLE.search(val):
            ts = [tuple(_elem(t) for t in m.split()) for m in _TUPLE.findall(val)]
            if len({len(t) for t in ts}) > 1:
                raise TextError(f"{name}: tuples of {key} have different lengths")
            if key in arities and arities[key] != len(ts[0]):
                raise TextError(f"{name}: arity mismatch for {key}")
            arities[key] = len(ts[0])
            rels[key] = ts
        elif val and key not in arities:
            consts[key] = _elem(val)
        elif not val:
            rels[key] = []
        else:
            raise TextError(f"{name}: cannot read entry {key}: {val}")
    if universe is None:
        raise TextError(f"structure {name}: missing universe")
    return universe, rels, consts, arities


def read_structures(text: str, base_dir: str = ".") -> tuple[dict, list]:
    """Parse all structure blocks; returns (structures by name, system blocks)."""
    text = _strip_comments(text)
    rest = _BLOCK.sub("", text).strip()
    if rest:
        raise TextError(f"unrecognized text: {rest[:40]!r}")
    sig = None
    raws, systems = {}, []
    for kind, name, body in _BLOCK.findall(text):
        if kind == "signature":
            sig = _parse_sig_block(body)
        elif kind == "structure":
            if not name:
                raise TextError("structure block without a name")
            if name in raws:
                raise TextError(f"duplicate structure {name}")
            raws[name] = _parse_structure_raw(name, body)
        else:
            systems.append((name, body))
    if sig is None:
        arity, consts = {}, []
        for name, (_, rels, cs, ar) in raws.items():
            for r, k in ar.items():
                if arity.setdefault(r, k) != k:
                    raise TextError(f"relation {r} used with arities {arity[r]} and {k}")
            for r in rels:
                if r not in arity:
                    raise TextError(f"cannot infer the arity of empty relation {r}; declare it as {r}/k")
            for c in cs:
                if c not in consts:
                    consts.append(c)
        sig = Signature(tuple(sorted(arity.items())), tuple(sorted(consts)))
    out = {}
    for name, (universe, rels, cs, _) in raws.items():
        for r in rels:
            if r not in sig.arity:
                raise TextError(f"{name}: relation {r} not in signature {sig}")
        try:
            out[name] = Structure(sig, universe, {r: rels.get(r, []) for r, _ in sig.relations}, cs)
        except StructureError as e:
            raise TextError(f"structure {name}: {e}") from e
    return out, systems


def _parse_system_block(name, body, structs, base_dir) -> PotentialistSystem:
    worlds, arrows, close = {}, [], False
    for key, val in _entries(body):
        if key == "structures":
            for tok in val.split():
                if tok in structs:
                    worlds[tok] = structs[tok]
                elif os.path.exists(os.path.join(base_dir, tok)):
                    more = read_system_file(os.path.join(base_dir, tok))
                    worlds.update(more.worlds)
                    structs = {**structs, **more.worlds}
                else:
                    raise TextError(f"system {name}: unknown structure {tok!r}")
        elif key == "arrows":
            leftover = _ARROW.sub("", val).replace(",", "").strip()
            if leftover:
                raise TextError(f"system {name}: cannot read arrows near {leftover[:30]!r}")
            for src, dst, pairs in _ARROW.findall(val):
                m = {}
                for p in filter(None, (x.strip() for x in pairs.split(","))):
                    if "->" not in p:
                        raise TextError(f"system {name}: bad map entry {p!r}")
                    a, b = p.split("->")
                    m[_elem(a.strip())] = _elem(b.strip())
                arrows.append(Arrow(src, dst, ElementMap(m)))
        elif key == "close":
            if val not in ("true", "false"):
                raise TextError(f"close must be true or false, got {val!r}")
            close = val == "true"
        else:
            raise TextError(f"system {name}: unknown key {key!r}")
    for a in arrows:
        if a.src not in worlds or a.dst not in worlds:
            raise TextError(f"system {name}: arrow {a} mentions an unlisted world")
    try:
        return validate_or_close(worlds, arrows, "close" if close else "validate", name)
    except (SystemsError, StructureError) as e:
        raise TextError(str(e)) from e


def read_system(text: str, base_dir: str = ".") -> PotentialistSystem:
    structs, systems = read_structures(text, base_dir)
    if len(systems) > 1:
        raise TextError("more than one system block")
    if systems:
        name, body = systems[0]
        return _parse_system_block(name, body, structs, base_dir)
    if not structs:
        raise TextError("no structures found")
    return PotentialistSystem(structs, [Arrow(w, w, ElementMap.identity(s.universe))
                                        for w, s in structs.items()])


def read_system_file(path: str) -> PotentialistSystem:
    with open(path) as fh:
        return read_system(fh.read(), os.path.dirname(os.path.abspath(path)))


# writing ------------------------------------------------------------------

def _check_nat(x):
    if not (isinstance(x, int) and x >= 0):
        raise TextError(f"only natural-number elements can be written, got {x!r}")
    return str(x)


def write_signature(sig: Signature) -> str:
    items = [f"{r}/{k}" for r, k in sig.relations] + list(sig.constants)
    return "signature { " + "; ".join(items) + " }"


def write_structure(name, s: Structure) -> str:
    parts = ["universe: " + " ".join(_check_nat(x) for x in s.elements)]
    for r, _ in s.signature.relations:
        ts = sorted(s.interp[r])
        parts.append(f"{r}: " + " ".join("(" + " ".join(_check_nat(x) for x in t) + ")" for t in ts))
    for c in s.signature.constants:
        parts.append(f"{c}: {_check_nat(s.constant_vals[c])}")
    return f"structure {name} {{ " + "; ".join(p.rstrip() for p in parts) + " }"


def _write_map(m: ElementMap) -> str:
    return ", ".join(f"{_check_nat(a)}->{_check_nat(b)}" for a, b in m.pairs)


def write_system(sys: PotentialistSystem, name: str | None = None) -> str:
    """Every world and every arrow (identities included), with ``close: false``."""
    lines = [write_signature(sys.signature)]
    for w, s in sys.worlds.items():
        lines.append(write_structure(w, s))
    arrows = ",\n    ".join(f"{a.src} -> {a.dst} [{_write_map(a.map)}]" for a in sys.arrows)
    lines.append(f"system {name or sys.name or 'S'} {{\n  structures: {' '.join(map(str, sys.worlds))};\n"
                 f"  arrows:\n    {arrows};\n  close: false\n}}")
    return "\n".join(lines) + "\n"


def write_adjacency(sys: PotentialistSystem) -> str:
    """One arrow per line: source, target, map; in the system's arrow order."""
    return "".join(f"{a.src}\t{a.dst}\t" + ",".join(f"{x}->{y}" for x, y in a.map.pairs) + "\n"
                   for a in sys.arrows)


# pointed pairs, tuples, formulas -------------------------------------------

def parse_tuple(text: str) -> tuple:
    text = text.strip()
    return tuple(_elem(t.strip()) for t in text.split(",")) if text else ()


def parse_pointed(text: str):
    """``W:0,1=V:1,0`` -> ((W, (0, 1)), (V, (1, 0)))."""
    if text.count("=") != 1:
        raise TextError(f"pointed pair must look like W:a,b=V:c,d, got {text!r}")
    out = []
    for side in text.split("="):
        if ":" not in side:
            raise TextError(f"missing ':' in {side!r}")
        w, t = side.rsplit(":", 1)
        out.append((w.strip(), parse_tuple(t)))
    return tuple(out)


def parse_assignment(text: str) -> dict:
    """``x=0,y=2`` -> {"x": 0, "y": 2}."""
    out = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        if "=" not in item:
            raise TextError(f"bad assignment {item!r}")
        v, e = item.split("=", 1)
        out[v.strip()] = _elem(e.strip())
    return out


def read_formulas(path: str, signature=None) -> list[Formula]:
    with open(path) as fh:
        return parse_many(fh.read(), signature)


def write_formulas(fs) -> str:
    return "".join(to_sexpr(f) + "\n" for f in fs)
