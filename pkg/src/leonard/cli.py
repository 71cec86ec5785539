"""JSON-in, JSON-out command line front end.

Every command reads one JSON document (``--in`` or stdin) and writes one
JSON document (``--out`` or stdout); ``oracle-companions`` writes one JSON
object per line. Exit status is 0 on success, 1 when the input cannot be
parsed into the command's schema and 2 when the computation raises a named
domain error. Error documents have the form ``{"error": ..., "message": ...}``.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections.abc import Callable
from dataclasses import dataclass
from typing import Any

from . import compat, oracle
from .errors import InvalidInput, LeonardError
from .field import FieldDescriptor
from .matrix import Matrix, bond_mate
from .parray import ParameterArray, affine, invariants, realize, relatives, validate
from .typesys import BasicSequence, array_from_basic, basic_from_array, classify_type


class MalformedInput(Exception):
    """The payload does not match the command's schema."""


def _need(obj: Any, key: str) -> Any:
    if not isinstance(obj, dict):
        raise MalformedInput("payload must be a JSON object")
    if key not in obj:
        raise MalformedInput(f"payload is missing {key!r}")
    return obj[key]


def _field(obj: dict) -> FieldDescriptor:
    return FieldDescriptor.from_json(_need(obj, "field"))


def _array(obj: Any) -> ParameterArray:
    return ParameterArray.from_json(obj)


def _nested_array(obj: dict, key: str) -> ParameterArray:
    inner = _need(obj, key)
    if isinstance(inner, dict) and "field" not in inner and "field" in obj:
        inner = dict(inner, field=obj["field"])
    return ParameterArray.from_json(inner)


def _basic(obj: dict) -> tuple[BasicSequence, int]:
    f = _field(obj)
    d = _need(obj, "d")
    if not isinstance(d, int) or isinstance(d, bool):
        raise MalformedInput("'d' must be an integer")
    return BasicSequence.from_json(_need(obj, "basic"), f), d


def _matrix(obj: dict, key: str, f: FieldDescriptor) -> Matrix:
    return Matrix.from_json(f, _need(obj, key))


# -- command bodies ------------------------------------------------------------
# Each command is split into a parse step (failures exit 1) and a run step
# (domain errors exit 2).


@dataclass(frozen=True)
class Command:
    parse: Callable[[Any], Any]
    run: Callable[..., Any]


def _run_classify(p: ParameterArray) -> dict:
    t = classify_type(p)
    out: dict = {"type": t.value}
    if p.d >= 3:
        inv = invariants(p)
        out["beta"] = str(inv.beta)
        out["kappa"] = str(inv.kappa)
    return out


def _parse_basic_request(obj: Any) -> tuple[ParameterArray, Any]:
    p = _array(obj)
    return p, (p.field.parse(obj["q"]) if isinstance(obj.get("q"), str) else obj.get("q"))


def _run_basic(p: ParameterArray, q: Any) -> dict:
    b = basic_from_array(p, None if q is None else p.field(q))
    return {"field": p.field.to_json(), "d": p.d, "basic": b.to_json()}


def _parse_relatives(obj: Any) -> tuple[ParameterArray, str]:
    which = _need(obj, "which")
    if not isinstance(which, str):
        raise MalformedInput("'which' must be a string")
    return _nested_array(obj, "array"), which


def _parse_affine(obj: Any) -> tuple:
    p = _nested_array(obj, "array")
    coeffs = []
    for k in ("xi", "zeta", "xi_star", "zeta_star"):
        v = _need(obj, k)
        coeffs.append(p.field.parse(v) if isinstance(v, str) else p.field(v))
    return (p, *coeffs)


def _run_compatible(c: compat.CompatInput) -> dict:
    ok = compat.compatible(c)
    out: dict = {"compatible": ok}
    if ok:
        out["K"] = [str(x) for x in compat.companion_of(c).k.diagonal()]
    return out


def _run_companion(c: compat.CompatInput) -> dict:
    out = compat.companion_of(c).to_json()
    shift = compat.detect_shift(c)
    bond = compat.detect_bond_shift(c)
    if shift is not None:
        out["shift"] = str(shift)
    if bond is not None:
        out["bond_shift"] = str(bond)
    return out


def _run_families(b: BasicSequence, d: int) -> dict:
    return {"families": [fam.to_json() for fam in compat.companion_families(b, d)]}


def _parse_materialize(obj: Any) -> tuple:
    b, d = _basic(obj)
    family = _need(obj, "family")
    bindings = obj.get("bindings", {})
    if not isinstance(family, str) or not isinstance(bindings, dict):
        raise MalformedInput("'family' must be a string and 'bindings' an object")
    parsed = {k: b.field.parse(v) if isinstance(v, str) else b.field(v) for k, v in bindings.items()}
    return b, family, parsed, d


def _run_materialize(b: BasicSequence, family: str, bindings: dict, d: int) -> dict:
    results = compat.materialize_family(b, family, bindings, d)
    return {"companions": [r.to_json() for r in results]}


def _parse_matrix(obj: Any) -> Matrix:
    return _matrix(obj, "A", _field(obj))


def _parse_pair(obj: Any) -> tuple[Matrix, Matrix]:
    f = _field(obj)
    return _matrix(obj, "A", f), _matrix(obj, "A_star", f)


COMMANDS: dict[str, Command] = {
    "validate": Command(_array, lambda p: validate(p).to_json()),
    "classify": Command(_array, _run_classify),
    "invariants": Command(_array, lambda p: invariants(p).to_json()),
    "realize": Command(_array, lambda p: realize(p).to_json()),
    "basic": Command(_parse_basic_request, _run_basic),
    "from-basic": Command(_basic, lambda b, d: array_from_basic(b, d).to_json()),
    "relatives": Command(_parse_relatives, lambda p, w: relatives(p, w).to_json()),
    "affine": Command(_parse_affine, lambda *a: affine(*a).to_json()),
    "compatible": Command(compat.CompatInput.from_json, _run_compatible),
    "companion": Command(compat.CompatInput.from_json, _run_companion),
    "families": Command(_basic, _run_families),
    "materialize": Command(_parse_materialize, _run_materialize),
    "bond": Command(_parse_matrix, lambda a: bond_mate(a).to_json()),
    "oracle-pair": Command(_parse_pair, lambda a, s: oracle.is_leonard_pair(a, s).to_json()),
}


def _as_args(parsed: Any) -> tuple:
    return parsed if isinstance(parsed, tuple) else (parsed,)


def _oracle_companions(parsed: tuple[Matrix, Matrix], workers: int, cap: int) -> list[dict]:
    a, a_star = parsed
    ks = oracle.all_companions_bruteforce(a, a_star, cap=cap, workers=workers)
    return [{"K": [str(x) for x in k.diagonal()]} for k in ks]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="leonard", description="Leonard pair and companion computations over exact fields.")
    ap.add_argument("command", choices=sorted([*COMMANDS, "oracle-companions"]))
    ap.add_argument("--in", dest="infile", default=None, help="input JSON file (default: stdin)")
    ap.add_argument("--out", dest="outfile", default=None, help="output file (default: stdout)")
    ap.add_argument("--workers", type=int, default=1, help="worker processes for oracle-companions")
    ap.add_argument("--enum-cap", type=int, default=oracle.DEFAULT_ENUM_CAP,
                    help="largest number of diagonals oracle-companions may enumerate")
    return ap


def run(command: str, payload_text: str, workers: int = 1, enum_cap: int = oracle.DEFAULT_ENUM_CAP) -> tuple[int, str]:
    """Execute one command; return the exit code and the text to emit."""
    try:
        payload = json.loads(payload_text)
        if command == "oracle-companions":
            parsed: Any = _parse_pair(payload)
        else:
            parsed = COMMANDS[command].parse(payload)
    except InvalidInput as exc:
        return 1, _dump({"error": exc.code, "message": str(exc)}) + "\n"
    except LeonardError as exc:
        return 2, _dump({"error": exc.code, "message": str(exc)}) + "\n"
    except (json.JSONDecodeError, MalformedInput, KeyError, TypeError, ValueError) as exc:
        return 1, _dump({"error": "MalformedInput", "message": f"{type(exc).__name__}: {exc}"}) + "\n"
    try:
        if command == "oracle-companions":
            lines = _oracle_companions(parsed, workers, enum_cap)
            return 0, "".join(_dump(x) + "\n" for x in lines)
        result = COMMANDS[command].run(*_as_args(parsed))
    except LeonardError as exc:
        return 2, _dump({"error": exc.code, "message": str(exc)}) + "\n"
    return 0, _dump(result) + "\n"


def _dump(obj: Any) -> str:
    return json.dumps(obj, ensure_ascii=False)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.infile:
        with open(args.infile, encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = sys.stdin.read()
    code, out = run(args.command, text, args.workers, args.enum_cap)
    if args.outfile:
        with open(args.outfile, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
