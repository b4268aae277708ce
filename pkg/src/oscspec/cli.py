"""Command-line interface: ``oscspec {build,verify,plot,sample,norm,spectrum,probe}``.

Exit codes: 0 all selected checks pass, 1 a check failed, 2 usage error.
Discrepancy findings are always printed and never change the exit code.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .arith import ConstructionError, DomainError, Interval, as_rational, fmt
from .generators import FULL_TREE_LIMIT, GeneratorSet
from .lattice import BlockTree, ScaleParams, base_interval, parse_word, verify_geometry
from .report import VerificationReport, jsonable

SUITES = ("geometry", "generators", "isometry", "ramps", "constancy", "cantor")
DEFAULT_RADII = (Fraction(1, 10), Fraction(1, 100), Fraction(1, 1000))


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class Config:
    c: Fraction = Fraction(1, 4)
    max_level: int = 12
    bump_thirds: bool = True
    base: Optional[Interval] = None
    seed: int = 0
    count: int = 200

    def validate(self) -> "Config":
        try:
            params = ScaleParams(self.c)
        except DomainError as exc:
            raise UsageError(f"c: {exc}") from None
        if not 1 <= self.max_level <= FULL_TREE_LIMIT:
            raise UsageError(f"max_level must lie in 1..{FULL_TREE_LIMIT}, got {self.max_level}")
        if not self.bump_thirds:
            raise UsageError("bump_thirds = false is not supported; bumps always use thirds")
        if self.base is not None:
            try:
                base_interval(params, self.base)
            except ConstructionError as exc:
                raise UsageError(f"base: {exc}") from None
        if self.count < 0:
            raise UsageError("count must be >= 0")
        return self

    @property
    def params(self) -> ScaleParams:
        return ScaleParams(self.c)

    def generators(self) -> GeneratorSet:
        return GeneratorSet.build(self.max_level, self.params, self.base)

    def to_json(self) -> dict:
        out = jsonable(asdict(self))
        out["base"] = None if self.base is None else self.base.to_json()
        return out


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _interval(text: str) -> Interval:
    lo, sep, hi = text.partition(",")
    if not sep:
        raise ValueError(f"expected 'lo,hi', got {text!r}")
    return Interval.closed(as_rational(lo), as_rational(hi))


_FIELDS = {
    "c": as_rational,
    "max_level": int,
    "bump_thirds": _bool,
    "base": _interval,
    "seed": int,
    "count": int,
}


def parse_config(text: str, origin: str = "config") -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep:
            raise UsageError(f"{origin}:{lineno}: expected key = value")
        if key not in _FIELDS:
            raise UsageError(f"{origin}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _FIELDS[key](value.strip())
        except (TypeError, ValueError) as exc:
            raise UsageError(f"{origin}:{lineno}: {key}: {exc}") from None
    return values


def load_config(args: argparse.Namespace) -> Config:
    values = {}
    if args.config:
        path = Path(args.config)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        values.update(parse_config(text, str(path)))
    for key in ("c", "max_level", "seed"):
        value = getattr(args, key, None)
        if value is not None:
            values[key] = value
    if getattr(args, "count", None) is not None:
        values["count"] = args.count
    return replace(Config(), **values).validate()


def _rational_arg(text: str) -> Fraction:
    try:
        return as_rational(text)
    except (TypeError, ValueError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _radii_arg(text: str) -> list[Fraction]:
    radii = [_rational_arg(part) for part in text.split(",") if part.strip()]
    if not radii or any(d <= 0 for d in radii):
        raise argparse.ArgumentTypeError("radii must be a nonempty list of positive rationals")
    return radii


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _read_rationals(path: str) -> list[Fraction]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            try:
                out.append(as_rational(line))
            except (TypeError, ValueError) as exc:
                raise UsageError(f"{path}:{lineno}: {exc}") from None
    return out


# -- build --------------------------------------------------------------------------


def construction_json(cfg: Config, gens: GeneratorSet) -> dict:
    return {"config": cfg.to_json(), "tree": gens.tree.to_json(), "generators": gens.to_json()}


def load_construction(data: dict) -> tuple[BlockTree, GeneratorSet]:
    tree = BlockTree.from_json(data["tree"])
    return tree, GeneratorSet.from_json(data["generators"], tree)


def cmd_build(cfg: Config, args: argparse.Namespace) -> int:
    gens = cfg.generators()
    blocks = ",".join(str(len(gens.tree.levels[m])) for m in range(1, cfg.max_level + 1))
    points = ",".join(str(len(f.xs)) for f in gens.functions)
    if args.out:
        _emit(json.dumps(construction_json(cfg, gens)), args.out)
    print(f"levels: {blocks} blocks")
    print(f"breakpoints: {points}")
    return 0


# -- verify -------------------------------------------------------------------------


def run_suite(name: str, cfg: Config) -> tuple[dict, Optional[dict]]:
    """One verification suite; top-level so worker processes can run it."""
    from . import spectrum, subspace

    gens = cfg.generators()
    extra = None
    if name == "geometry":
        report = verify_geometry(gens.tree)
    elif name == "generators":
        from .generators import verify_generators

        report = verify_generators(gens)
    elif name == "isometry":
        report = subspace.verify_isometry(gens, count=cfg.count, seed=cfg.seed)
    elif name == "ramps":
        report = spectrum.verify_ramps(gens)
    elif name == "constancy":
        report = spectrum.verify_constancy(gens)
    elif name == "cantor":
        report, scan = spectrum.verify_cantor(gens, depth=min(6, cfg.max_level - 1))
        extra = scan.to_json()
    else:
        raise UsageError(f"unknown check {name!r}")
    return report.to_json(), extra


def cmd_verify(cfg: Config, args: argparse.Namespace) -> int:
    which = args.checks or list(SUITES)
    unknown = [w for w in which if w not in SUITES]
    if unknown:
        raise UsageError(f"unknown check(s): {', '.join(unknown)}; choose from {', '.join(SUITES)}")
    if "cantor" in which and cfg.max_level < 2:
        raise UsageError("the cantor probe needs max_level >= 2")
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(run_suite, which, [cfg] * len(which)))
    else:
        results = [run_suite(w, cfg) for w in which]

    suites = {}
    failures = discrepancies = 0
    lines = []
    out = {"config": cfg.to_json(), "suites": suites}
    for name, (report, extra) in zip(which, results):
        suites[name] = report
        if extra is not None:
            out["spectrum"] = extra
        rep = VerificationReport(report["title"])
        for c in report["checks"]:
            rep.add(c["anchor"], c["name"], c["status"] == "pass", level=c.get("level"),
                    on_failure=c["status"])
        failures += len(rep.failures)
        discrepancies += len(rep.discrepancies)
        lines += list(rep.lines())
    out["passed"] = failures == 0
    out["discrepancies"] = [
        c for r in suites.values() for c in r["checks"] if c["status"] == "discrepancy"
    ]
    if "spectrum" in out:
        out["discrepancies"] += out["spectrum"]["discrepancies"]
    _emit(json.dumps(out, indent=2) + "\n", args.out)
    if args.out:
        print("\n".join(lines))
    print(f"{failures} failed, {discrepancies} discrepancies", file=sys.stderr)
    return 0 if failures == 0 else 1


# -- plot / sample ------------------------------------------------------------------

TICKS = (Fraction(0), Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(1))


def render_svg(xs: Sequence[Fraction], ys: Sequence[Fraction], title: str) -> str:
    w, h, pad = 800, 320, 40

    def px(x: Fraction) -> str:
        return f"{pad + float(x) * (w - 2 * pad):.3f}"

    def py(y: Fraction) -> str:
        return f"{pad + float((1 - y) / 2) * (h - 2 * pad):.3f}"

    pts = " ".join(f"{px(x)},{py(y)}" for x, y in zip(xs, ys))
    out = io.StringIO()
    out.write(f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">\n')
    out.write(f"<title>{title}</title>\n")
    axis = py(Fraction(-1))
    out.write(f'<line x1="{px(Fraction(0))}" y1="{axis}" x2="{px(Fraction(1))}" y2="{axis}" stroke="black"/>\n')
    for t in TICKS:
        x = px(t)
        out.write(f'<line class="tick" x1="{x}" y1="{axis}" x2="{x}" y2="{float(axis) + 6:.3f}" stroke="black"/>\n')
        label = "0" if t == 0 else "1" if t == 1 else f"{t.numerator}/{t.denominator}"
        out.write(f'<text x="{x}" y="{float(axis) + 20:.3f}" text-anchor="middle" font-size="12">{label}</text>\n')
    for y in (Fraction(-1), Fraction(0), Fraction(1)):
        out.write(f'<text x="{pad - 8}" y="{py(y)}" text-anchor="end" font-size="12">{y}</text>\n')
    out.write(f'<polyline fill="none" stroke="steelblue" stroke-width="1" points="{pts}"/>\n')
    out.write("</svg>\n")
    return out.getvalue()


def _level(cfg: Config, m: int) -> int:
    if not 1 <= m <= cfg.max_level:
        raise UsageError(f"m must lie in 1..{cfg.max_level}, got {m}")
    return m


def cmd_plot(cfg: Config, args: argparse.Namespace) -> int:
    f = cfg.generators().phi(_level(cfg, args.m))
    _emit(render_svg(f.xs, f.ys, f"phi_{args.m}"), args.out)
    return 0


def sample_points(xs: Sequence[Fraction], count: int) -> list[Fraction]:
    grid = {Fraction(j, count + 1) for j in range(1, count + 1)}
    return sorted(grid.union(xs))


def cmd_sample(cfg: Config, args: argparse.Namespace) -> int:
    if args.samples < 0:
        raise UsageError("count must be >= 0")
    f = cfg.generators().phi(_level(cfg, args.m))
    pts = sample_points(f.xs, args.samples)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["t", "f(t)"]
    if args.decimals is not None:
        header += ["t_decimal", "f_decimal"]
    writer.writerow(header)
    for t, v in zip(pts, f.values_at(pts)):
        row = [fmt(t), fmt(v)]
        if args.decimals is not None:
            row += [_decimal(t, args.decimals), _decimal(v, args.decimals)]
        writer.writerow(row)
    _emit(buf.getvalue(), args.out)
    return 0


def _decimal(q: Fraction, places: int) -> str:
    """``q`` rounded half away from zero to ``places`` digits, without floats."""
    scale = 10**places
    n = abs(q) * scale
    digits = int(n + Fraction(1, 2))
    sign = "-" if q < 0 and digits else ""
    whole, frac = divmod(digits, scale)
    return f"{sign}{whole}.{frac:0{places}d}" if places else f"{sign}{whole}"


# -- norm / spectrum / probe --------------------------------------------------------


def cmd_norm(cfg: Config, args: argparse.Namespace) -> int:
    from .subspace import CoeffVector, check_isometry

    try:
        text = Path(args.file).read_text(encoding="utf-8")
        a = CoeffVector.parse(text)
    except OSError as exc:
        raise UsageError(f"cannot read {args.file}: {exc}") from None
    except ValueError as exc:
        raise UsageError(f"{args.file}: {exc}") from None
    if a.support_bound > cfg.max_level:
        raise UsageError(f"{a.support_bound} coefficients but max_level is {cfg.max_level}")
    res = check_isometry(a, cfg.generators())
    _emit(json.dumps(res.to_json()) + "\n", args.out)
    return 0 if res.equal and res.witness_attains else 1


def cmd_spectrum(cfg: Config, args: argparse.Namespace) -> int:
    from .spectrum import scan

    points = _read_rationals(args.file)
    if not points:
        raise UsageError(f"{args.file}: no points")
    if any(not 0 <= t <= 1 for t in points):
        raise UsageError("points must lie in [0, 1]")
    gens = cfg.generators()
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            records = list(
                pool.map(_classify, points, [args.radii] * len(points), [args.eps] * len(points),
                         [cfg] * len(points))
            )
        report = scan([], args.radii, gens, args.eps, extra=records)
    else:
        report = scan(points, args.radii, gens, args.eps)
    _emit(json.dumps(report.to_json(), indent=2) + "\n", args.out)
    return 0


def _classify(t, radii, eps, cfg):
    from .spectrum import classify_point

    return classify_point(t, radii, cfg.generators(), eps)


def cmd_probe(cfg: Config, args: argparse.Namespace) -> int:
    from .spectrum import cantor_probe

    try:
        word = parse_word(args.word)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if len(word) > cfg.max_level:
        raise UsageError(f"prefix of length {len(word)} exceeds max_level {cfg.max_level}")
    pc = cantor_probe(word, args.radii, cfg.generators(), args.anchor)
    _emit(json.dumps(pc.to_json(), indent=2) + "\n", args.out)
    return 0


# -- entry point --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value file")
    common.add_argument("--max-level", dest="max_level", type=int)
    common.add_argument("--c", type=_rational_arg, help="scale constant in (0, 1/4], as p/q")
    common.add_argument("--seed", type=int)
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--out", help="output file (default: stdout)")

    parser = argparse.ArgumentParser(prog="oscspec", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("build", parents=[common], help="build the tree and generators")

    p = sub.add_parser("verify", parents=[common], help="run verification suites")
    p.add_argument("checks", nargs="*", metavar="CHECK", help=f"subset of {', '.join(SUITES)}")
    p.add_argument("--count", type=int, help="random coefficient vectors for the isometry check")

    for name, helptext in (("plot", "SVG plot of phi_m"), ("sample", "CSV samples of phi_m")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("m", type=int)
        if name == "sample":
            p.add_argument("--count", dest="samples", type=int, default=0, help="grid points added to the breakpoints")
            p.add_argument("--decimals", type=int, help="also print decimal columns with this precision")

    p = sub.add_parser("norm", parents=[common], help="isometry check for a coefficient file")
    p.add_argument("file")

    p = sub.add_parser("spectrum", parents=[common], help="classify the points in a file")
    p.add_argument("file")
    p.add_argument("--radii", type=_radii_arg, default=list(DEFAULT_RADII))
    p.add_argument("--eps", type=_rational_arg, default=Fraction(1, 100))

    p = sub.add_parser("probe", parents=[common], help="probe a block given by a sign word")
    p.add_argument("word", help="sign word such as '+-+' (empty string for B)")
    p.add_argument("--radii", type=_radii_arg, default=list(DEFAULT_RADII))
    p.add_argument("--anchor", choices=("midpoint", "branch"), default="midpoint")
    return parser


COMMANDS = {
    "build": cmd_build,
    "verify": cmd_verify,
    "plot": cmd_plot,
    "sample": cmd_sample,
    "norm": cmd_norm,
    "spectrum": cmd_spectrum,
    "probe": cmd_probe,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.jobs < 1:
            raise UsageError("--jobs must be >= 1")
        cfg = load_config(args)
        return COMMANDS[args.command](cfg, args)
    except UsageError as exc:
        print(f"oscspec: error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, ConstructionError) as exc:
        print(f"oscspec: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
