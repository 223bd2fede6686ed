"""Command-line entry point.

    qcoh fano {Q,V5,V22} {correlators,mult-table,charpoly,idempotents,special} [options]
    qcoh delpezzo {3..8,all} {orbits,cardinalities,spectral,subtorus,boundary,certify,mult-table} [options]

Exit codes: 0 success, 1 usage error, 2 verification failure, 3 inconclusive certificate.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path

from . import fano, lattice, surface
from .report import FORMATS, Report, frac, new_report, render

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_INCONCLUSIVE = 0, 1, 2, 3
OUTPUT_DIR_ENV = "QCOH_OUTPUT_DIR"

FANO_ACTIONS = ("correlators", "mult-table", "charpoly", "idempotents", "special")
DELPEZZO_ACTIONS = ("orbits", "cardinalities", "spectral", "subtorus", "boundary", "certify", "mult-table")
FANO_TARGETS = ("Q", "V5", "V22")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qcoh", description="Quantum cohomology tables, spectra and certificates.")
    p.add_argument("subject", choices=("fano", "delpezzo"))
    p.add_argument("target", help="Q, V5, V22 for fano; a rank 3..8 (or 'all') for delpezzo")
    p.add_argument("action")
    p.add_argument("--format", default="json", choices=FORMATS)
    p.add_argument("--seed-file", help="correlator seed file (fano)")
    p.add_argument("--max-points", type=int, default=None,
                   help="largest number of insertions shown in correlator tables")
    p.add_argument("--probe-seed", default=None, help="probe seed for certify (int, 0x.. allowed)")
    p.add_argument("--point", default=None,
                   help="torus point: 'q=1', 'q0=1,q1=2/3,...' or a comma list of r+1 rationals")
    p.add_argument("--root", default=None, help="root for subtorus, e.g. '(0;1,-1,0,0)'")
    p.add_argument("--dump-dir", default=None, help="also write one plain orbit dump per orbit (orbits)")
    p.add_argument("--output", "-o", default=None, help="output file (default: stdout or $%s)" % OUTPUT_DIR_ENV)
    return p


def _data_blob(name: str) -> bytes:
    return resources.files("qcoh.data").joinpath(name).read_bytes()


def parse_point(text: str, r: int) -> tuple[Fraction, ...]:
    text = text.strip()
    if text.startswith("q=") and "," not in text:
        return (Fraction(text[2:]),) * (r + 1)
    if "=" in text:
        vals = {}
        for part in text.split(","):
            k, v = part.split("=")
            k = k.strip()
            if not k.startswith("q") or not k[1:].isdigit():
                raise UsageError(f"bad coordinate name {k!r}")
            vals[int(k[1:])] = Fraction(v.strip())
        if sorted(vals) != list(range(r + 1)):
            raise UsageError(f"point needs q0..q{r}")
        return tuple(vals[i] for i in range(r + 1))
    parts = [Fraction(x) for x in text.split(",")]
    if len(parts) != r + 1:
        raise UsageError(f"point needs {r + 1} coordinates")
    return tuple(parts)


def _point_str(pt) -> str:
    return "(" + ", ".join(frac(x) for x in pt) + ")"


# -- fano -------------------------------------------------------------------------------


def _fano_report(args, command) -> Report:
    name = args.target
    if name not in FANO_TARGETS:
        raise UsageError(f"unknown manifold {name!r}; expected one of {', '.join(FANO_TARGETS)}")
    if args.action not in FANO_ACTIONS:
        raise UsageError(f"action {args.action!r} is not available for fano")
    try:
        blob = Path(args.seed_file).read_bytes() if args.seed_file else _data_blob("fano_seeds.json")
        seeds = fano.default_seeds(name, args.seed_file)
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot read seeds: {exc}") from None
    rep = new_report(command, [blob])
    m = fano.get_manifold(name)
    try:
        table = fano.reconstruct_correlators(m, seeds)
    except fano.CorrelatorError as exc:
        rep.status = "verification-failure"
        rep.diagnostics.append(f"reconstruction failed: {exc}")
        return rep
    action = args.action
    if action == "correlators":
        t = rep.table("correlators", ["symbol", "value", "source"])
        shown = args.max_points or 4
        for key, val in table.primitive_entries(shown):
            t.add(str(key), val, table.provenance.get(key, "reconstructed"))
        st = rep.table("stages", ["degree", "unknowns", "seeded", "equations", "rank"])
        for s in table.stages:
            st.add(s.d, len(s.unknowns), len(s.seeded), s.equations, s.rank)
        bad = fano.associativity_residuals(table)
        if bad:
            rep.status = "verification-failure"
            rep.diagnostics.append(f"{len(bad)} associativity residuals are nonzero")
    elif action == "mult-table":
        alg = fano.FanoAlgebra(table)
        t = rep.table("products", ["left", "right", "component", "coefficient"])
        for a in range(m.r + 1):
            for b in range(a, m.r + 1):
                for c, coef in enumerate(alg.product_basis(a, b)):
                    if not coef.is_zero():
                        t.add(f"Delta{a}", f"Delta{b}", f"Delta{c}", coef)
    else:
        sd = fano.SpectralData(table)
        if action == "charpoly":
            t = rep.table("characteristic_polynomial", ["polynomial"])
            t.add(sd.char_poly)
            b = rep.table("branches", ["branch", "factor", "degree"])
            for i, br in enumerate(sd.branches):
                b.add(i, br.factor, br.degree)
        elif action == "idempotents":
            t = rep.table("idempotents", ["branch", "modulus", "component", "e0", "e"])
            for i, br in enumerate(sd.branches):
                e0, e = sd.idempotent(br)
                for c in range(m.r + 1):
                    t.add(i, br.factor, f"Delta{c}", e0[c], e[c])
        elif action == "special":
            try:
                sc = fano.special_coordinates(m, table)
            except fano.SymmetryError as exc:
                rep.status = "verification-failure"
                rep.diagnostics.append(str(exc))
                return rep
            t = rep.table("diagonal", ["branch", "modulus", "eta_i", "eta_ii"])
            for i, br in enumerate(sc.branches):
                t.add(i, br.factor, sc.eta_i[i], sc.eta_ii[i])
            o = rep.table("off_diagonal", ["branch_i", "branch_j", "eta_ij"])
            for (i, j), v in sorted(sc.eta_ij.items()):
                o.add(i, j, v)
            rep.diagnostics.append("eta_ij = eta_ji verified for every listed pair")
            rep.diagnostics.append("same-branch pairs use v as a second root of the branch factor")
            if m.name in ETA_NORMALIZATION:
                i, scale = ETA_NORMALIZATION[m.name]
                br = sc.branches[i]
                scaled = sc.eta_i[i] * br.ring.coerce(m.coefficient_ring.parse(scale))
                rep.diagnostics.append(
                    f"branch {i}: eta_i keeps the 1/({scale}) factor of the idempotent; "
                    f"{scale} * eta_i = {scaled}")
    return rep


# scale that clears the idempotent denominator, reported so eta_i can be compared
# against the numerator-only form
ETA_NORMALIZATION = {"V22": (1, "5324*q^4")}


# -- del Pezzo ----------------------------------------------------------------------------


def _rank(target: str, allow_all: bool = False) -> list[int]:
    if allow_all and target == "all":
        return list(range(3, 9))
    try:
        r = int(target)
    except ValueError:
        raise UsageError(f"target must be a rank 3..8{' or all' if allow_all else ''}") from None
    if not 3 <= r <= 8:
        raise UsageError("rank must be in [3, 8]")
    return [r]


def _mask_summary(r: int) -> str:
    names = surface.surface_algebra(r).names()
    parts = []
    for (i, j), m in sorted(surface.uncertified_mask(r).items()):
        for t, orders in sorted(m.items()):
            parts.append(f"{names[i]}*{names[j]}[{names[t]}] z^{','.join(map(str, orders))}")
    return "uncertified (needs degree-4 invariants): " + "; ".join(parts)


def _delpezzo_report(args, command) -> Report:
    action = args.action
    if action not in DELPEZZO_ACTIONS:
        raise UsageError(f"action {action!r} is not available for delpezzo")
    ranks = _rank(args.target, allow_all=(action == "cardinalities"))
    blob = _data_blob("delpezzo_gw.json")
    extra = {}
    seed = None
    if action == "certify":
        seed = int(args.probe_seed, 0) if args.probe_seed else surface.DEFAULT_PROBE_SEED
        extra["probe_seed"] = seed
    rep = new_report(command, [blob], **extra)
    if action == "cardinalities":
        t = rep.table("cardinalities", ["r", "W", "R", "I", "F", "G", "H"])
        rc = rep.table("recursions", ["r", "relation", "holds"])
        for r in ranks:
            c = lattice.cardinalities(r)
            t.add(r, c["W"], c["R"], c["I"], c["F"], c["G"], c["H"])
            if r >= 4:
                for rel, ok in sorted(lattice.recursion_checks(r).items()):
                    rc.add(r, rel, ok)
                    if not ok:
                        rep.status = "verification-failure"
        return rep
    r = ranks[0]
    if action == "orbits":
        t = rep.table("orbits", ["orbit", "size", "vector"])
        for label in ("I", "F", "G", "H", "R"):
            o = lattice.orbit(r, label)
            for v in o.sorted():
                t.add(f"{label}_{r}", len(o), v)
            if args.dump_dir:
                d = Path(args.dump_dir)
                d.mkdir(parents=True, exist_ok=True)
                (d / f"{label}_{r}.txt").write_text(o.dump(), encoding="utf-8")
            if not o.is_closed():
                rep.status = "verification-failure"
                rep.diagnostics.append(f"{label}_{r} is not closed under the generators")
    elif action == "spectral":
        sp = surface.symmetric_point_analysis(r)
        t = rep.table("k_action", ["image_of", "Delta0", "k", "Delta2"])
        for col, nm in enumerate(("Delta0", "k", "Delta2")):
            t.add(nm, *sp.matrix.column(col))
        rt = rep.table("R_lambda", ["power", "coefficient"])
        for i in range(len(sp.R) - 1, -1, -1):
            rt.add(i, sp.R[i])
        s = rep.table("scalars", ["name", "value"])
        s.add("B", sp.B)
        s.add("B_printed", sp.B_printed)
        s.add("C", sp.C)
        s.add("D", sp.D)
        s.add("mu_orbit_sum", sp.mu_orbit)
        s.add("mu_double_root", sp.mu_double_root)
        s.add("nu", sp.nu)
        s.add("double_root_certified", sp.checks.get("double_root"))
        if sp.gamma is not None:
            g = rep.table("Gamma", ["component", "coefficient"])
            for nm, v in zip(surface.surface_algebra(r).names(), sp.gamma):
                g.add(nm, v)
        c = rep.table("checks", ["check", "holds"])
        for k in sorted(sp.checks):
            c.add(k, sp.checks[k])
        rep.diagnostics.extend(sp.diagnostics)
        if r >= 5:
            rep.diagnostics.append("Gamma o Gamma: Delta0 component follows from Gamma o rho = 0 and "
                                   "rho o rho = -2 Gamma by associativity; other components computed")
        if not sp.ok:
            rep.status = "verification-failure"
    elif action == "subtorus":
        rho = lattice.LatticeVector.parse(args.root) if args.root else surface.simple_roots(r)[0]
        if rho.r != r or lattice.pairing(rho, rho) != -2 or lattice.degree(rho) != 0:
            raise UsageError(f"{rho} is not a root of rank {r}")
        sample = parse_point(args.point, r) if args.point else None
        try:
            sr = surface.root_subtorus_check(r, rho, sample)
        except surface.TorusPointError as exc:
            raise UsageError(str(exc)) from None
        s = rep.table("sample", ["root", "point"])
        s.add(sr.root, _point_str(sr.point))
        c = rep.table("checks", ["check", "holds"])
        for k in sorted(sr.checks):
            c.add(k, sr.checks[k])
        if not sr.ok:
            rep.status = "verification-failure"
    elif action == "boundary":
        if r < 4:
            raise UsageError("boundary needs rank 4..8")
        bm = surface.boundary_extension(r)
        c = rep.table("checks", ["check", "holds"])
        for k in sorted(bm.checks):
            c.add(k, bm.checks[k])
        c.add("no_negative_q_r_power", not bm.negative_powers)
        rep.diagnostics.append(_mask_summary(r))
        rep.diagnostics.append("uncertified coefficients are assumed free of negative q_r powers, not verified")
        if not bm.ok:
            rep.status = "verification-failure"
    elif action == "mult-table":
        alg = surface.surface_algebra(r)
        names = alg.names()
        t = rep.table("structure_constants", ["left", "right", "component", "z_order", "coefficient"])
        for i in range(1, alg.dim):
            for j in range(i, alg.dim):
                for comp, c in enumerate(alg.product(i, j)):
                    for n in range(surface.JET_ORDER):
                        p = c.order(n)
                        if p is None:
                            t.add(names[i], names[j], names[comp], n, None)
                        elif not p.is_zero():
                            t.add(names[i], names[j], names[comp], n, p)
        rep.diagnostics.append(_mask_summary(r))
    elif action == "certify":
        point = parse_point(args.point, r) if args.point else None
        try:
            cert = surface.semisimplicity_certificate(r, point, probe_seed=seed)
        except surface.TorusPointError as exc:
            raise UsageError(str(exc)) from None
        t = rep.table("certificate", ["field", "value"])
        t.add("rank", r)
        t.add("status", cert.status)
        t.add("given_point", _point_str(cert.given_point))
        t.add("given_point_k_squarefree", cert.given_point_tame)
        t.add("given_point_k_char_poly", _coeffs(cert.given_point_char_poly))
        t.add("point", _point_str(cert.point))
        t.add("operator", _point_str(cert.operator))
        t.add("char_poly", _coeffs(cert.char_poly))
        t.add("squarefree", cert.squarefree)
        t.add("probe_index", cert.probe_index if cert.probe_index is not None else "none")
        t.add("probe_seed", hex(seed))
        if cert.roots is not None:
            t.add("roots_separated", cert.separated)
            t.add("root_error_bound", f"{cert.root_radius:.3e}")
            rt = rep.table("roots", ["re", "im"])
            for z in cert.roots:
                rt.add(f"{z.real:.15e}", f"{z.imag:.15e}")
        if not cert.given_point_tame:
            rep.diagnostics.append("k o has a repeated eigenvalue at the given point, so the point is not tame")
        if cert.status == "semisimple-at-point":
            rep.status = "ok"
        elif cert.status == "witness-at-probe":
            rep.status = "inconclusive"
            rep.diagnostics.append(f"no witness at given point; witness found at probe #{cert.probe_index} "
                                   f"{_point_str(cert.point)}")
        else:
            rep.status = "inconclusive"
            rep.diagnostics.append(f"no witness within {cert.attempts} probes")
    return rep


def _coeffs(cs) -> str:
    """Coefficient list, highest degree first."""
    return "[" + ", ".join(frac(c) for c in reversed(cs)) + "]"


# -- driver ------------------------------------------------------------------------------


def _command_dict(args) -> dict:
    out = {"subject": args.subject, "target": args.target, "action": args.action, "format": args.format}
    for opt in ("seed_file", "max_points", "probe_seed", "point", "root"):
        v = getattr(args, opt)
        if v is not None:
            out[opt] = str(v)
    return out


def _write(text: str, args) -> None:
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        return
    out_dir = os.environ.get(OUTPUT_DIR_ENV)
    if out_dir:
        d = Path(out_dir)
        d.mkdir(parents=True, exist_ok=True)
        (d / f"{args.subject}-{args.target}-{args.action}.{args.format}").write_text(text, encoding="utf-8")
        return
    sys.stdout.write(text)


def run_command(argv) -> tuple[int, Report | None]:
    try:
        args = build_parser().parse_args(list(argv))
        command = _command_dict(args)
        rep = _fano_report(args, command) if args.subject == "fano" else _delpezzo_report(args, command)
    except UsageError as exc:
        sys.stderr.write(f"qcoh: {exc}\n")
        return EXIT_USAGE, None
    _write(render(rep, args.format), args)
    code = {"ok": EXIT_OK, "verification-failure": EXIT_VERIFY, "inconclusive": EXIT_INCONCLUSIVE}[rep.status]
    return code, rep


def main(argv=None) -> int:
    code, _ = run_command(sys.argv[1:] if argv is None else argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
