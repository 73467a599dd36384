"""Command-line front end.

Exit codes: 0 success, 1 negative decision (``iso``, ``conj-mat``), 2 input error.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from typing import Any, Sequence

from . import fnauto, outclass, parabolic, torus, zmat
from .fnauto import FreeMap, NotAutomorphismError
from .words import ParseError, parse_word

EXIT_OK, EXIT_NO, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


# ---------------------------------------------------------------------------
# input helpers


def _automorphism(text: str) -> FreeMap:
    phi = fnauto.parse_automorphism(text)
    if phi.inverse_images is None:
        raise InputError(f"rank-{phi.rank} automorphism needs an explicit 'inv:' block")
    return phi


def _matrix_inputs(args) -> list[zmat.IntMatrix]:
    """Matrices from ``-a`` (abelianized) and ``-m`` flags, in command-line order."""
    out = []
    for kind, text in args.inputs or []:
        if kind == "a":
            out.append(fnauto.abelianize(_automorphism(text)))
        else:
            out.append(zmat.parse_matrix(text))
    return out


def _one_matrix(args) -> zmat.IntMatrix:
    mats = _matrix_inputs(args)
    if len(mats) != 1:
        raise InputError(f"expected exactly one -a or -m input, got {len(mats)}")
    return mats[0]


def _torus(args) -> torus.Torus:
    specs = [text for kind, text in args.inputs or [] if kind == "a"]
    if len(specs) != 1:
        raise InputError("expected exactly one -a automorphism")
    return torus.Torus(_automorphism(specs[0]))


_THETA_TOKEN = re.compile(r"\s*(?:(Psi|Omega|Delta|Xi|Upsilon)(?:\^\s*([+-]?\d+))?|G\(([^)]*)\))")


def parse_theta(text: str, T: torus.Torus) -> torus.TorusMap:
    """A product (left to right) of ``Psi Omega Delta Xi Upsilon`` powers and ``G(t^K | w)``,
    or explicit images ``a -> ... ; b -> ... ; t -> ... ; inv: ...``."""
    if "->" in text:
        return torus.parse_map(text, T)
    builtins = torus.builtin_automorphisms(T)
    result = torus.identity_map(T)
    pos = 0
    text = text.rstrip()
    if not text.strip():
        raise ParseError("empty automorphism expression", text, 1)
    while pos < len(text):
        m = _THETA_TOKEN.match(text, pos)
        if not m:
            col = len(text) - len(text[pos:].lstrip()) + 1
            raise ParseError("expected Psi, Omega, Delta, Xi, Upsilon or G(...)", text, col)
        if m.group(3) is not None:
            f = torus.inner_map(T, torus.parse_element(m.group(3), T))
        else:
            name = m.group(1)
            if name not in builtins:
                raise ParseError(f"{name} is not defined for this monodromy", text, m.start(1) + 1)
            f = builtins[name] ** int(m.group(2) or 1)
        result = torus.compose_maps(result, f)
        pos = m.end()
    return result


# ---------------------------------------------------------------------------
# subcommands; each returns (exit code, record, text)


def cmd_classify(args):
    rep = outclass.classify_out(_one_matrix(args))
    return EXIT_OK, rep.to_dict(), rep.summary()


def cmd_iso(args):
    mats = _matrix_inputs(args)
    if len(mats) != 2:
        raise InputError(f"iso needs two inputs, got {len(mats)}")
    dec = outclass.iso_decide(*mats)
    if dec:
        text = f"isomorphic (eps = {dec.eps}, conjugator {zmat.format_matrix(dec.conjugator)})"
    else:
        text = "not isomorphic"
    return (EXIT_OK if dec else EXIT_NO), dec.to_dict(), text


def cmd_ab(args):
    inv = torus.abelianization_invariants(_one_matrix(args))
    return EXIT_OK, {"free_rank": inv.free_rank, "torsion": list(inv.torsion), "group": str(inv)}, str(inv)


def cmd_center(args):
    T = _torus(args)
    z = torus.center_is_nontrivial(T)
    if z is None:
        return EXIT_OK, {"central": None}, "trivial centre"
    s = torus.format_element(z)
    return EXIT_OK, {"central": s}, f"central element {s}"


def cmd_reduce(args):
    words = list(args.words) + list(args.word or [])
    if len(words) != 1:
        raise InputError("reduce needs exactly one word")
    w = parse_word(words[0], args.rank)
    return EXIT_OK, {"word": str(w), "length": len(w)}, str(w)


def cmd_mul(args):
    T = _torus(args)
    if not args.elements:
        raise InputError("mul needs at least one element")
    g = torus.normalize(T, [torus.parse_element(e, T) for e in args.elements])
    s = torus.format_element(g)
    return EXIT_OK, {"element": s, "t_exponent": g.t_exp}, s


def cmd_fix(args):
    words = list(args.words) + list(args.word or [])
    if len(words) != 1:
        raise InputError("fix needs exactly one word")
    w = parse_word(words[0], 2)
    split = parabolic.split_pieces(w)
    fixed = parabolic.fixed_by(w, args.k, args.r)
    found = parabolic.conjugate_into_fixed(w, args.k, args.r)
    rec: dict[str, Any] = {
        "word": str(w),
        "pieces": str(split),
        "fixed": fixed,
        "conjugate_into_fixed": found is not None,
        "x": None if found is None else str(found[0]),
        "v": None if found is None else str(found[1]),
    }
    lines = [f"pieces: {split}", f"fixed: {'yes' if fixed else 'no'}"]
    lines.append("not conjugate into Fix" if found is None else f"x = {found[0]}, v = {found[1]}")
    return EXIT_OK, rec, "\n".join(lines)


def cmd_normalize(args):
    T = torus.Torus(parabolic.parabolic_map(args.k))
    theta = parse_theta(args.theta, T)
    nf = parabolic.parabolic_outer_normal_form(theta)
    rec = {"m": nf.m, "g": torus.format_element(nf.g), "i": nf.i, "delta": nf.delta, "omega": nf.omega}
    text = f"Theta Psi^{nf.m} Gamma_g = Xi^{nf.i} Delta^{nf.delta} Omega^{nf.omega} with g = {rec['g']}"
    return EXIT_OK, rec, text


def cmd_conj_mat(args):
    mats = _matrix_inputs(args)
    if len(mats) != 2:
        raise InputError(f"conj-mat needs two matrices, got {len(mats)}")
    P = zmat.gl2_conjugate(*mats)
    if P is None:
        return EXIT_NO, {"conjugate": False, "conjugator": None}, "not conjugate"
    s = zmat.format_matrix(P)
    return EXIT_OK, {"conjugate": True, "conjugator": s}, f"conjugate: P = {s} (P A P^-1 = B)"


# ---------------------------------------------------------------------------


class _Append(argparse.Action):
    """Keep ``-a``/``-m`` inputs in one ordered list tagged by flag."""

    def __call__(self, parser, namespace, values, option_string=None):
        items = list(getattr(namespace, "inputs", None) or [])
        items.append((self.const, values))
        namespace.inputs = items


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="freebycyclic", description="Free-by-cyclic groups F_n x| Z.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-a", dest="inputs", action=_Append, const="a", metavar="SPEC", help="automorphism, e.g. 'a -> a b^2 ; b -> b'")
    common.add_argument("-m", dest="inputs", action=_Append, const="m", metavar="MATRIX", help="matrix, e.g. '[[1,2],[0,1]]'")
    common.add_argument("-w", dest="word", action="append", metavar="WORD")
    common.add_argument("--json", action="store_true", help="emit one flat JSON record")
    common.add_argument("--check", action="store_true", help="no output; report via exit status")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("classify", parents=[common], help="classify Out(M_phi)").set_defaults(func=cmd_classify)
    sub.add_parser("iso", parents=[common], help="decide isomorphism of two rank-2 tori").set_defaults(func=cmd_iso)
    sub.add_parser("ab", parents=[common], help="abelianization invariants").set_defaults(func=cmd_ab)
    sub.add_parser("center", parents=[common], help="find a central element (rank 2)").set_defaults(func=cmd_center)
    p = sub.add_parser("reduce", parents=[common], help="freely reduce a word")
    p.add_argument("words", nargs="*")
    p.add_argument("--rank", type=int, default=None)
    p.set_defaults(func=cmd_reduce)
    p = sub.add_parser("mul", parents=[common], help="multiply elements 't^K | w' of M_phi")
    p.add_argument("elements", nargs="*")
    p.set_defaults(func=cmd_mul)
    p = sub.add_parser("fix", parents=[common], help="fixed-subgroup queries for a -> a b^k, b -> b")
    p.add_argument("words", nargs="*")
    p.add_argument("-k", type=int, default=1)
    p.add_argument("-r", type=int, default=1)
    p.set_defaults(func=cmd_fix)
    p = sub.add_parser("normalize", parents=[common], help="outer normal form of an automorphism of M_phi")
    p.add_argument("theta", help="e.g. 'Xi^2 Delta Omega G(t^0 | a b) Psi^3'")
    p.add_argument("-k", type=int, required=True)
    p.set_defaults(func=cmd_normalize)
    sub.add_parser("conj-mat", parents=[common], help="GL2(Z) conjugacy").set_defaults(func=cmd_conj_mat)
    return parser


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        code, record, text = args.func(args)
    except (ParseError, InputError, NotAutomorphismError, torus.RelatorError, ValueError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INPUT
    if not args.check:
        if args.json:
            print(json.dumps(record, ensure_ascii=False, sort_keys=True), file=out)
        else:
            print(text, file=out)
    return code


def main(argv: Sequence[str] | None = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
