"""Command line interface.

Exit status: 0 success, 1 negative verdict (non-isomorphic, failed
verification), 2 structural failure or error (bad input, guard, failure
stage during reconstruction, non-generic unitaries).
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from . import io
from .lattice import BoundedLattice, NotALattice, factorize
from .matrix_oracle import (EXACT_GUARD, Ambient, NonGenericUnitaries, center, generic_unitaries,
                            diagonal_masa, intersect_spans, realize_witness, unitary_to_json)
from .partitions import (DEFAULT_GUARD, AlgebraSpec, GuardExceeded, csubalgebra_poset,
                         parse_witness_label, witness_poset)
from .poset import FinitePoset, PosetError, height, is_order_isomorphic, rank_function
from .reconstruct import reconstruct

EXIT_OK, EXIT_NEGATIVE, EXIT_FAILURE = 0, 1, 2

COMMANDS = ("gen", "reconstruct", "iso", "factor", "partition-lattice", "verify")


@dataclass
class CommandConfig:
    command: str
    spec: AlgebraSpec | None = None
    copies: int = 2
    seed: int = 0
    mode: str = "exact"
    nmax: int | None = None
    inputs: list[str] = field(default_factory=list)
    out: str | None = None
    format: str = "json"
    strict: bool = False
    figure: str | None = None
    shuffle: bool = False
    n: int | None = None

    def guard(self) -> int:
        if self.nmax is not None:
            return self.nmax
        if self.command == "verify" and self.mode == "exact":
            return EXACT_GUARD
        return DEFAULT_GUARD


class CliError(Exception):
    pass


def _emit(cfg: CommandConfig, text: str, stdout) -> None:
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def _render_poset(cfg: CommandConfig, p: FinitePoset) -> str:
    if cfg.format == "dot":
        return io.to_dot(p)
    return io.dumps_poset(p)


def _figure(cfg: CommandConfig, p: FinitePoset, title: str) -> None:
    if cfg.figure:
        from .plotting import save_hasse
        save_hasse(p, cfg.figure, title=title)


def _one_input(cfg: CommandConfig) -> FinitePoset:
    if len(cfg.inputs) != 1:
        raise CliError(f"{cfg.command} needs exactly one input poset")
    return io.read_poset(cfg.inputs[0])


def _need_spec(cfg: CommandConfig) -> AlgebraSpec:
    if cfg.spec is None:
        raise CliError(f"{cfg.command} needs --spec")
    return cfg.spec


def cmd_gen(cfg: CommandConfig, stdout) -> int:
    spec = _need_spec(cfg)
    p = witness_poset(spec, cfg.copies, cfg.guard()).poset
    if cfg.shuffle:
        perm = np.random.default_rng(cfg.seed).permutation(p.size)
        p = p.relabel(perm)
    _emit(cfg, _render_poset(cfg, p), stdout)
    _figure(cfg, p, f"witness poset, spec {spec}, {cfg.copies} copies")
    return EXIT_OK


def cmd_reconstruct(cfg: CommandConfig, stdout) -> int:
    p = _one_input(cfg)
    report = reconstruct(p, strict=cfg.strict, guard=cfg.guard())
    _emit(cfg, io.dumps(report.to_json()), stdout)
    _figure(cfg, p, f"input poset, spec {report.spec}" if report.ok else "input poset")
    return EXIT_OK if report.ok else EXIT_FAILURE


def cmd_iso(cfg: CommandConfig, stdout) -> int:
    if len(cfg.inputs) != 2:
        raise CliError("iso needs exactly two input posets")
    p, q = (io.read_poset(path) for path in cfg.inputs)
    phi = is_order_isomorphic(p, q)
    out: dict[str, Any] = {"isomorphic": phi is not None, "sizes": [p.size, q.size]}
    if phi is not None:
        out["bijection"] = list(phi)
    _emit(cfg, io.dumps(out), stdout)
    return EXIT_OK if phi is not None else EXIT_NEGATIVE


def cmd_factor(cfg: CommandConfig, stdout) -> int:
    p = _one_input(cfg)
    try:
        lat = BoundedLattice(p)
    except NotALattice as exc:
        _emit(cfg, io.dumps({"ok": False, "message": str(exc)}), stdout)
        return EXIT_FAILURE
    fac = factorize(lat)
    out: dict[str, Any] = {
        "ok": True,
        "heights": list(fac.heights),
        "factors": [io.poset_to_json(f.poset) for f in fac.factors],
        "coordinates": [list(c) for c in fac.iso],
        "strict_factor_iso": None,
    }
    if cfg.strict:
        verdicts = []
        for f in fac.factors:
            h = height(f.poset)
            verdicts.append(h <= cfg.guard()
                            and is_order_isomorphic(f.poset, csubalgebra_poset(h, cfg.guard())) is not None)
        out["strict_factor_iso"] = verdicts
    _emit(cfg, io.dumps(out), stdout)
    _figure(cfg, p, f"lattice with factor heights {list(fac.heights)}")
    return EXIT_OK


def cmd_partition_lattice(cfg: CommandConfig, stdout) -> int:
    if cfg.n is None:
        raise CliError("partition-lattice needs a point count")
    p = csubalgebra_poset(cfg.n, cfg.guard())
    _emit(cfg, _render_poset(cfg, p), stdout)
    _figure(cfg, p, f"partition lattice on {cfg.n} points")
    return EXIT_OK


def cmd_verify(cfg: CommandConfig, stdout) -> int:
    spec = _need_spec(cfg)
    guard = cfg.guard()
    if spec.N > guard:
        raise GuardExceeded(f"N={spec.N} exceeds guard {guard}")
    amb = Ambient(spec, cfg.mode)
    unitaries = [] if spec.commutative else generic_unitaries(spec, cfg.copies, cfg.seed, cfg.mode)
    z = center(amb)
    masas = [diagonal_masa(amb, None)] + [diagonal_masa(amb, u) for u in unitaries]
    pair_dims = [intersect_spans(a, b).dim for i, a in enumerate(masas) for b in masas[i + 1:]]
    realized = realize_witness(spec, unitaries, cfg.mode, guard=guard)
    model = witness_poset(spec, cfg.copies, guard).poset
    report = reconstruct(realized, strict=cfg.strict, guard=guard)
    ranks = rank_function(realized)
    checks = {
        "center_dimension": z.dim == spec.k,
        "generic_pairwise_meets": all(d == spec.k for d in pair_dims),
        "label_matched": realized == model,
        "order_isomorphic": is_order_isomorphic(realized, model) is not None,
        # a partition subalgebra has one dimension per block
        "rank_is_dimension": ranks is not None and all(
            ranks[i] == parse_witness_label(realized.label(i))[1].rank for i in range(realized.size)),
        "reconstructed_spec": report.ok and report.spec == spec,
    }
    out = {
        "spec": spec.to_json(),
        "mode": cfg.mode,
        "copies": 1 if spec.commutative else cfg.copies,
        "seed": cfg.seed,
        "center_dimension": z.dim,
        "pairwise_masa_meet_dimensions": pair_dims,
        "realized_size": realized.size,
        "reconstructed": None if report.spec is None else report.spec.to_json(),
        "checks": checks,
        "passed": all(checks.values()),
        "unitaries": [unitary_to_json(amb, u) for u in unitaries],
    }
    _emit(cfg, io.dumps(out), stdout)
    _figure(cfg, realized, f"realized witness poset, spec {spec}")
    return EXIT_OK if out["passed"] else EXIT_NEGATIVE


HANDLERS = {
    "gen": cmd_gen,
    "reconstruct": cmd_reconstruct,
    "iso": cmd_iso,
    "factor": cmd_factor,
    "partition-lattice": cmd_partition_lattice,
    "verify": cmd_verify,
}


def run(cfg: CommandConfig, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    try:
        return HANDLERS[cfg.command](cfg, stdout)
    except (CliError, io.FormatError, PosetError, GuardExceeded, NonGenericUnitaries,
            ValueError, OSError) as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_FAILURE


def _spec_arg(text: str) -> AlgebraSpec:
    try:
        return AlgebraSpec.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ccposet",
        description="Witness posets of commutative subalgebras and reconstruction of block sizes.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, inputs: bool = False, spec: bool = False, fmt: bool = False):
        sp.add_argument("--out", help="output file (default stdout)")
        sp.add_argument("--nmax", type=int, help=f"guard on N (default {DEFAULT_GUARD}; "
                                                 f"{EXACT_GUARD} for exact verify)")
        sp.add_argument("--figure", help="also render a Hasse diagram PNG to this path")
        if inputs:
            sp.add_argument("inputs", nargs="*", metavar="FILE", help="poset JSON file(s)")
            sp.add_argument("--in", dest="in_paths", action="append", default=[], metavar="FILE")
        if spec:
            sp.add_argument("--spec", type=_spec_arg, required=True, help="block sizes, e.g. 2,1")
            sp.add_argument("--copies", type=int, default=2, help="maximal copies m (default 2)")
            sp.add_argument("--seed", type=int, default=0, help="seed (default 0)")
        if fmt:
            sp.add_argument("--format", choices=("json", "dot"), default="json")

    sp = sub.add_parser("gen", help="write a witness poset")
    common(sp, spec=True, fmt=True)
    sp.add_argument("--shuffle", action="store_true", help="randomly relabel elements using --seed")

    sp = sub.add_parser("reconstruct", help="recover block sizes from a poset")
    common(sp, inputs=True)
    sp.add_argument("--strict", action="store_true")

    sp = sub.add_parser("iso", help="test two posets for order isomorphism")
    common(sp, inputs=True)

    sp = sub.add_parser("factor", help="direct-product factorization of a bounded lattice")
    common(sp, inputs=True)
    sp.add_argument("--strict", action="store_true")

    sp = sub.add_parser("partition-lattice", help="write the partition lattice on n points")
    common(sp, fmt=True)
    sp.add_argument("n", type=int)

    sp = sub.add_parser("verify", help="cross-check the model against explicit matrices")
    common(sp, spec=True)
    sp.add_argument("--mode", choices=("exact", "float"), default="exact")
    sp.add_argument("--strict", action="store_true")
    return parser


def parse_config(argv: Sequence[str] | None = None) -> CommandConfig:
    ns = build_parser().parse_args(argv)
    d = vars(ns)
    return CommandConfig(
        command=ns.command,
        spec=d.get("spec"),
        copies=d.get("copies", 2),
        seed=d.get("seed", 0),
        mode=d.get("mode", "exact"),
        nmax=d.get("nmax"),
        inputs=list(d.get("in_paths", [])) + list(d.get("inputs", [])),
        out=d.get("out"),
        format=d.get("format", "json"),
        strict=d.get("strict", False),
        figure=d.get("figure"),
        shuffle=d.get("shuffle", False),
        n=d.get("n"),
    )


def main(argv: Sequence[str] | None = None) -> int:
    return run(parse_config(argv))


if __name__ == "__main__":
    sys.exit(main())
