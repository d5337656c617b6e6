"""Command-line entry point.

Exit status: 0 when every check passes, 1 when a mathematical check fails,
2 on configuration or usage errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from .rootdata import DiagramError, SatakeDiagram, resolve_diagram

COMMANDS = ("verify-relations", "root-vectors", "poisson-table", "braid-check", "integrality", "pbw-expand")
EXPENSIVE = ("FII", "DII4")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    diagram: str
    command: str
    height: int = 12
    expensive: bool = False
    format: str = "text"
    golden: bool = False
    out: str | None = None
    corrupt: bool = False

    def __post_init__(self):
        if self.height < 1:
            raise UsageError("--height must be at least 1")
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.format not in ("text", "json"):
            raise UsageError(f"unknown format {self.format!r}")


class Report:
    def __init__(self, title: str):
        self.title = title
        self.checks: list = []
        self.lines: list = []
        self.data: dict = {}

    def check(self, name: str, ok: bool, detail: str = ""):
        self.checks.append({"check": name, "pass": bool(ok), "detail": detail})

    def line(self, text: str = ""):
        self.lines.append(text)

    @property
    def ok(self) -> bool:
        return all(c["pass"] for c in self.checks)

    def render(self, fmt: str) -> str:
        if fmt == "json":
            doc = {"title": self.title, "pass": self.ok, "checks": self.checks}
            doc.update(self.data)
            return json.dumps(doc, indent=2, sort_keys=True) + "\n"
        out = [f"# {self.title}"] + self.lines
        for c in self.checks:
            tag = "PASS" if c["pass"] else "FAIL"
            out.append(f"{tag}  {c['check']}" + (f"  ({c['detail']})" if c["detail"] else ""))
        out.append(f"result: {'PASS' if self.ok else 'FAIL'}")
        return "\n".join(out) + "\n"


def _nodes(xs) -> str:
    return ",".join(str(x + 1) for x in xs)


def _gate(cfg: RunConfig, sd: SatakeDiagram):
    if sd.name in EXPENSIVE and not cfg.expensive:
        raise UsageError(f"{sd.name} is gated: rerun with --expensive (and optionally a larger --height)")


# ------------------------------------------------------------------ commands

def cmd_verify_relations(cfg: RunConfig, sd: SatakeDiagram) -> Report:
    from .braidlusztig import corrupted_T, lusztig_T, relation_images
    from .iqg import check_inverse, check_sigma_twist, iserre_keys, verify_iserre
    from .uqcore import algebra
    alg = algebra(sd.cartan)
    rep = Report(f"verify-relations {sd.label}")
    for idx, (_, rel) in enumerate(alg.serre):
        for side in ("E", "F"):
            from .uqcore import E, F
            gen = E if side == "E" else F
            s = None
            for word, c in rel.items():
                p = None
                for x in word:
                    p = gen(alg, x) if p is None else p * gen(alg, x)
                s = p.scale(c) if s is None else s + p.scale(c)
            rep.check(f"quantum Serre relation {idx + 1} ({side})", s.is_zero())
    for i in range(sd.n):
        op = corrupted_T(alg, i) if cfg.corrupt else lusztig_T(alg, i)
        bad = [k for k, r in enumerate(relation_images(op)) if not r.is_zero()]
        detail = ""
        if bad:
            r = relation_images(op)[bad[0]]
            detail = f"{len(bad)} relations violated; first image {str(r)[:160]}"
        rep.check(f"{op.name} preserves the defining relations", not bad, detail)
    for key in iserre_keys(sd):
        rep.check(f"iSerre {key}", verify_iserre(sd, key))
    if sd.black:
        rep.check("sigma_tau twist rule", check_sigma_twist(sd))
    for i in sd.reps:
        rep.check(f"relative T{i + 1} inverse", check_inverse(sd, i))
    return rep


def cmd_root_vectors(cfg: RunConfig, sd: SatakeDiagram) -> Report:
    from .iqg import eval_U, integrality_certificate, root_vectors_iqg
    from .rootdata import DiagramError as DE
    from .uqcore import HeightCeilingError
    _gate(cfg, sd)
    rep = Report(f"root-vectors {sd.label}")
    rows = []
    try:
        vectors = root_vectors_iqg(sd)
    except DE as exc:
        rep.check("root vector factorisation", False, str(exc))
        return rep
    truncated = False
    for v in vectors:
        row = {"beta": list(v.beta), "expr": str(v.expr)}
        if sum(v.beta) > cfg.height:
            truncated = True
            row["status"] = "skipped: above height ceiling"
            rows.append(row)
            continue
        try:
            cert = integrality_certificate(eval_U(v.expr, sd), sd)
        except HeightCeilingError as exc:
            truncated = True
            row["status"] = f"truncated: {exc}"
            rows.append(row)
            continue
        row["integral"] = cert.integral
        row["denominators_in_A"] = cert.a_only
        rows.append(row)
        rep.check(f"B_{tuple(v.beta)} integral", cert.integral)
    for r in rows:
        verdict = r.get("status") or ("integral" if r["integral"] else "NOT integral")
        rep.line(f"beta={tuple(r['beta'])}  {r['expr']}  [{verdict}]")
    if truncated:
        rep.line(f"output truncated at height ceiling {cfg.height}")
    rep.data["vectors"] = rows
    rep.data["truncated"] = truncated
    return rep


def cmd_poisson_table(cfg: RunConfig, sd: SatakeDiagram) -> Report:
    from .poisson import (bracket_table, compare_golden, has_golden, jacobi_failures, load_golden,
                          poisson_context)
    _gate(cfg, sd)
    rep = Report(f"poisson-table {sd.label}")
    table = bracket_table(sd)
    for line in table.to_text().rstrip("\n").split("\n"):
        rep.line(line)
    bad = jacobi_failures(poisson_context(sd))
    rep.check("Jacobi identity on all generator triples", not bad,
              "" if not bad else "failing triples: " + "; ".join(",".join(t) for t in bad[:5]))
    rep.data["table"] = table.to_doc()
    if cfg.golden:
        if not has_golden(sd.name or ""):
            raise UsageError(f"no golden table ships for {sd.label}")
        entries = compare_golden(table, load_golden(sd.name))
        rep.data["golden"] = []
        for e in entries:
            x, y = e.pair
            detail = "" if e.ok else f"expected {e.expected}, computed {e.computed}"
            rep.check(f"golden {{{x}, {y}}}", e.ok, detail)
            rep.data["golden"].append({"pair": [x, y], "pass": e.ok, "expected": str(e.expected),
                                       "computed": str(e.computed)})
    return rep


def cmd_braid_check(cfg: RunConfig, sd: SatakeDiagram) -> Report:
    from .braidlusztig import verify_braid_relation
    from .iqg import check_relative_braid
    from .poisson import poisson_braid_check
    from .uqcore import algebra
    _gate(cfg, sd)
    rep = Report(f"braid-check {sd.label}")
    cm = sd.cartan
    from .rootdata import braid_order
    for i in range(sd.n):
        for j in range(i + 1, sd.n):
            m = braid_order(cm, (i,), (j,))
            if m == 6 and not cfg.expensive:
                rep.line(f"Lusztig T{i + 1},T{j + 1} (m=6) skipped: needs --expensive")
                continue
            rep.check(f"Lusztig T{i + 1},T{j + 1} braid relation (m={m})", verify_braid_relation(i, j, algebra(cm)))
    reps = sd.reps
    if len(reps) < 2:
        rep.line("real rank 1: relative braid relations skipped")
        return rep
    for a in range(len(reps)):
        for b in range(a + 1, len(reps)):
            i, j = reps[a], reps[b]
            m = sd.braid_order_relative(i, j)
            rep.check(f"relative T{i + 1},T{j + 1} braid relation (m={m}), q-level", check_relative_braid(sd, i, j))
            rep.check(f"relative T{i + 1},T{j + 1} braid relation (m={m}), Poisson level",
                      poisson_braid_check(sd, i, j))
    return rep


def cmd_integrality(cfg: RunConfig, sd: SatakeDiagram) -> Report:
    from .iqg import eval_U, i_generators, integrality_certificate, relative_T, root_vectors_iqg
    _gate(cfg, sd)
    rep = Report(f"integrality {sd.label}")
    for v in root_vectors_iqg(sd):
        if sum(v.beta) > cfg.height:
            rep.line(f"B_{tuple(v.beta)} skipped: above height ceiling {cfg.height}")
            continue
        cert = integrality_certificate(eval_U(v.expr, sd), sd)
        rep.check(f"B_{tuple(v.beta)} integral", cert.integral)
    for i in sd.reps:
        for g in i_generators(sd):
            for inv in (False, True):
                x = relative_T(sd, i, g, inverse=inv)
                cert = integrality_certificate(eval_U(x, sd), sd)
                rep.check(f"T{i + 1}{'^-1' if inv else ''}({g}) integral", cert.integral)
    return rep


def cmd_pbw_expand(cfg: RunConfig, sd: SatakeDiagram) -> Report:
    from .iqg import eval_U, ipbw_basis, ipbw_coordinates, from_ipbw
    from .scalarfield import format_scalar
    _gate(cfg, sd)
    rep = Report(f"pbw-expand {sd.label}")
    basis = ipbw_basis(sd)
    vec = basis.vectors
    rep.data["expansions"] = []
    for a in range(len(vec)):
        for b in range(a + 1, len(vec)):
            if sum(vec[a].beta) + sum(vec[b].beta) > cfg.height:
                continue
            x = eval_U(vec[b].expr, sd) * eval_U(vec[a].expr, sd)
            coords = ipbw_coordinates(x, basis)
            parts = []
            for m in sorted(coords, key=repr):
                parts.append(f"({format_scalar(coords[m])})*{_mono(m, basis)}")
            text = " + ".join(parts) if parts else "0"
            rep.line(f"B_{tuple(vec[b].beta)} B_{tuple(vec[a].beta)} = {text}")
            rep.data["expansions"].append({"left": list(vec[b].beta), "right": list(vec[a].beta), "value": text})
            rep.check(f"round trip B_{tuple(vec[b].beta)} B_{tuple(vec[a].beta)}", from_ipbw(coords, basis) == x)
    return rep


def _mono(m, basis) -> str:
    parts = []
    for k, e in enumerate(m.b_exponents):
        if e:
            parts.append(f"B{tuple(basis.b_roots[k])}" + (f"^{e}" if e > 1 else ""))
    for k, e in enumerate(m.f_bullet):
        if e:
            parts.append(f"F{tuple(basis.black_roots[k])}" + (f"^{e}" if e > 1 else ""))
    for k, e in enumerate(m.e_bullet):
        if e:
            parts.append(f"E{tuple(basis.black_roots[k])}" + (f"^{e}" if e > 1 else ""))
    if any(m.k_weight):
        parts.append(f"K{tuple(m.k_weight)}")
    return "*".join(parts) or "1"


HANDLERS = {
    "verify-relations": cmd_verify_relations,
    "root-vectors": cmd_root_vectors,
    "poisson-table": cmd_poisson_table,
    "braid-check": cmd_braid_check,
    "integrality": cmd_integrality,
    "pbw-expand": cmd_pbw_expand,
}


# ------------------------------------------------------------------ entry point

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="iqpoisson", description=__doc__.splitlines()[0])
    p.add_argument("--diagram", required=True, help="preset name or path to a YAML diagram file")
    p.add_argument("--command", required=True, choices=COMMANDS)
    p.add_argument("--height", type=int, default=12, help="root height ceiling (default 12)")
    p.add_argument("--expensive", action="store_true", help="allow the FII and DII4 computations and m=6 braid checks")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--golden", action="store_true", help="compare poisson-table output with the shipped tables")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--corrupt-formula", dest="corrupt", action="store_true", help=argparse.SUPPRESS)
    return p


def run(cfg: RunConfig) -> tuple[int, str]:
    from .uqcore import algebra
    try:
        sd = resolve_diagram(cfg.diagram)
    except (DiagramError, OSError) as exc:
        raise UsageError(f"bad diagram {cfg.diagram!r}: {exc}") from None
    algebra(sd.cartan).max_height = max(algebra(sd.cartan).max_height, 2 * cfg.height)
    rep = HANDLERS[cfg.command](cfg, sd)
    return (0 if rep.ok else 1), rep.render(cfg.format)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = RunConfig(args.diagram, args.command, args.height, args.expensive, args.format,
                        args.golden, args.out, args.corrupt)
        code, text = run(cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
