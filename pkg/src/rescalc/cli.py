"""Command-line front end: ``rescalc <command> [options]``.

Exit status is 0 on success, 1 when a verification fails and 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from itertools import combinations
from pathlib import Path
from typing import Optional

from . import quantum
from .entropy import (JointPMF, classical_mutual_information, feedback_coefficients,
                      mutual_information, shannon_entropy, von_neumann_entropy)

OK, FAILED, BAD_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _data_path(kind: str, name: str) -> Path:
    p = Path(name)
    if p.exists():
        return p
    shipped = resources.files("rescalc.data").joinpath(kind, name)
    if shipped.is_file():
        return Path(str(shipped))
    raise InputError(f"{name}: no such file")


def _read_json(path: Path):
    try:
        with open(path, encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise InputError(f"{path}:{e.lineno}:{e.colno}: malformed JSON: {e.msg}") from None
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}") from None


def _load_quantum(kind: str, name: Optional[str]):
    if not name:
        raise InputError(f"missing --{'channel' if kind == 'channels' else 'state'} file")
    path = _data_path(kind, name)
    d = _read_json(path)
    try:
        return quantum.from_json(d)
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"{path}: {e}") from None


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as f:
            f.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _num(x: float) -> str:
    return f"{x:.10g}"


# --- commands -----------------------------------------------------------------

def cmd_entropy(a) -> int:
    path = _data_path("states", a.state or a.input or a.file or "")
    d = _read_json(path)
    rows = []
    if "variables" in d:
        try:
            p = JointPMF.from_json(d)
        except (KeyError, ValueError) as e:
            raise InputError(f"{path}: {e}") from None
        names = p.names
        for k in range(1, len(names) + 1):
            for s in combinations(names, k):
                rows.append((f"H({','.join(s)})", shannon_entropy(p, s)))
        for x, y in combinations(names, 2):
            rows.append((f"I({x};{y})", classical_mutual_information(p, [x], [y])))
    else:
        try:
            s = quantum.from_json(d)
        except (KeyError, TypeError, ValueError) as e:
            raise InputError(f"{path}: {e}") from None
        if isinstance(s, quantum.Isometry):
            raise InputError(f"{path}: expected a state, found an isometry")
        names = s.names
        for k in range(1, len(names) + 1):
            for sub in combinations(names, k):
                rows.append((f"H({','.join(sub)})", von_neumann_entropy(s, sub)))
        for x, y in combinations(names, 2):
            rows.append((f"I({x};{y})", mutual_information(s, [x], [y])))
    if a.format == "json":
        _emit(json.dumps({k: v for k, v in rows}, indent=2), a.out)
    elif a.format == "csv":
        _emit("quantity,value\n" + "\n".join(f"{k},{v!r}" for k, v in rows), a.out)
    else:
        _emit("\n".join(f"{k} = {_num(v)}" for k, v in rows), a.out)
    return OK


def cmd_coeffs(a) -> int:
    u = _load_quantum("channels", a.channel or (a.files[0] if len(a.files) > 0 else None))
    rho = _load_quantum("states", a.state or (a.files[1] if len(a.files) > 1 else None))
    if not isinstance(u, quantum.Isometry) or not isinstance(rho, quantum.MultiState):
        raise InputError("coeffs needs an isometry file and a density-matrix file")
    try:
        r = feedback_coefficients(u, rho)
    except ValueError as e:
        raise InputError(str(e)) from None
    if a.format == "json":
        _emit(json.dumps({"Q": r.q, "E": r.e}), a.out)
    elif a.format == "csv":
        _emit(f"q,e\n{r.q!r},{r.e!r}", a.out)
    else:
        _emit(f"Q={_num(r.q)} E={_num(r.e)}", a.out)
    return OK


def cmd_region(a) -> int:
    from .region import optimize_region, sample_region
    if a.seed is None:
        raise InputError("region needs --seed")
    u = _load_quantum("channels", a.channel or a.input)
    if not isinstance(u, quantum.Isometry):
        raise InputError("region needs an isometry file")
    if a.lam is not None:
        try:
            lams = [float(x) for x in a.lam.split(",")]
        except ValueError:
            raise InputError(f"bad --lambda {a.lam!r}") from None
        if any(not 0 <= x <= 1 for x in lams):
            raise InputError("--lambda values must lie in [0, 1]")
        res = optimize_region(u, lams, a.restarts, a.seed)
    else:
        res = sample_region(u, a.samples, a.seed)
    text = res.dumps() if a.format == "json" else res.to_csv()
    _emit(text, a.out)
    if a.out:
        print(f"{len(res.points)} points, {len(res.frontier)} on the frontier -> {a.out}")
    return OK


def _facts():
    from .protocols import circuit_facts
    return circuit_facts()


def cmd_prove(a) -> int:
    from .calculus import ParseError, load_script, verify_derivation
    name = a.script or a.input
    if not name:
        raise InputError("prove needs a script")
    path = _data_path("scripts", name)
    try:
        d = load_script(path)
    except ParseError as e:
        raise InputError(f"{path}:{e.line}:{e.col}: {e.msg}") from None
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}") from None
    report = verify_derivation(d, facts=_facts())
    if a.format == "json":
        _emit(report.dumps(), a.out)
    else:
        _emit(report.to_text(), a.out)
    return OK if report.passed else FAILED


def cmd_simulate(a) -> int:
    from .protocols import concentration_yield, schumacher_fidelity, yield_csv
    from .entropy import binary_entropy
    try:
        ns = [int(x) for x in str(a.n).split(",")]
    except ValueError:
        raise InputError(f"bad --n {a.n!r}") from None
    try:
        if a.kind == "concentration":
            rows = [concentration_yield(a.p, n).row() for n in ns]
        else:
            rate = a.rate if a.rate is not None else binary_entropy(a.p) + 0.1
            rows = []
            for n in ns:
                f = schumacher_fidelity(a.p, n, rate)
                rows.append({"n": n, "value": f, "target": 1.0, "gap": 1.0 - f})
    except ValueError as e:
        raise InputError(str(e)) from None
    if a.format == "json":
        _emit(json.dumps(rows, indent=2), a.out)
    else:
        _emit(yield_csv(rows).rstrip("\n"), a.out)
    return OK


def cmd_verify_cobit(a) -> int:
    from .calculus import load_script, verify_derivation
    from .protocols import verify_circuits
    checks = verify_circuits()
    facts = _facts()
    report = verify_derivation(load_script(_data_path("scripts", "cobit.deriv")), facts=facts)
    ok = all(c.passed for c in checks) and report.passed
    if a.format == "json":
        _emit(json.dumps({"circuits": [c.to_json() for c in checks], "proof": report.to_json(),
                          "passed": ok}, indent=2), a.out)
    else:
        lines = [f"{c.name}: max deviation {c.deviation:.3e}, isometry defect "
                 f"{c.isometry_defect:.3e} -> {'ok' if c.passed else 'FAILED'}" for c in checks]
        lines.append(report.to_text())
        _emit("\n".join(lines), a.out)
    return OK if ok else FAILED


def cmd_ghz_demo(a) -> int:
    from .protocols import ghz_entropy_demo
    demo = ghz_entropy_demo()
    _emit(json.dumps(demo.to_json(), indent=2) if a.format == "json" else demo.to_text(), a.out)
    return OK


def cmd_axioms(a) -> int:
    from .calculus import AxiomDB, axioms
    db = AxiomDB.load(a.input) if a.input else axioms()
    if a.format == "json":
        _emit(json.dumps([x.to_json() for x in db], indent=2, ensure_ascii=False), a.out)
    else:
        lines = []
        for x in db:
            lines += [f"{x.name}  ({x.title}; {x.kind})", f"  {x.notation}", f"  {x.statement}"]
            if x.note:
                lines.append(f"  note: {x.note}")
        _emit("\n".join(lines), a.out)
    return OK


COMMANDS = {
    "entropy": cmd_entropy, "coeffs": cmd_coeffs, "region": cmd_region, "prove": cmd_prove,
    "simulate": cmd_simulate, "verify-cobit": cmd_verify_cobit, "ghz-demo": cmd_ghz_demo,
    "axioms": cmd_axioms,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rescalc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, formats=("text", "json", "csv"), default="text"):
        sp.add_argument("--in", dest="input", help="input file")
        sp.add_argument("--out", help="write output here instead of stdout")
        sp.add_argument("--format", choices=formats, default=default)

    sp = sub.add_parser("entropy", help="entropies of a state or joint pmf file")
    sp.add_argument("file", nargs="?")
    sp.add_argument("--state")
    common(sp)

    sp = sub.add_parser("coeffs", help="qubit/ebit coefficients of a feedback channel on an input state")
    sp.add_argument("files", nargs="*", metavar="CHANNEL STATE")
    sp.add_argument("--channel")
    sp.add_argument("--state")
    common(sp)

    sp = sub.add_parser("region", help="sample or optimize the single-letter rate region")
    sp.add_argument("--channel")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--lambda", dest="lam", help="weight(s) in [0,1], comma separated; optimizes instead of sampling")
    sp.add_argument("--restarts", type=int, default=20)
    common(sp, ("csv", "json"), "csv")

    sp = sub.add_parser("prove", help="replay a derivation script")
    sp.add_argument("script", nargs="?")
    common(sp, ("text", "json"))

    sp = sub.add_parser("simulate", help="concentration yield or compression fidelity sweeps")
    sp.add_argument("kind", choices=("concentration", "schumacher"))
    sp.add_argument("--p", type=float, default=0.1)
    sp.add_argument("--n", default="10,100,1000,10000")
    sp.add_argument("--rate", type=float)
    common(sp, ("csv", "json"), "csv")

    sp = sub.add_parser("verify-cobit", help="exact coherent circuit checks and the cobit derivation")
    common(sp, ("text", "json"))

    sp = sub.add_parser("ghz-demo", help="entropies of two GHZ states versus three EPR pairs")
    common(sp, ("text", "json"))

    sp = sub.add_parser("axioms", help="list the axiom database")
    common(sp, ("text", "json"))
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as e:
        return BAD_INPUT if e.code else OK
    for attr in ("file", "state", "channel", "script", "files", "input"):
        if not hasattr(a, attr):
            setattr(a, attr, None if attr != "files" else [])
    try:
        return COMMANDS[a.command](a)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return BAD_INPUT
    except quantum.DimensionError as e:
        print(f"error: {e}", file=sys.stderr)
        return BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
