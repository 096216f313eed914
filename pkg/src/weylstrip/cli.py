"""Command-line front end: ``weylstrip <command> --config <path> ...``.

Configs and reports are JSON, grid data CSV, rasters binary PGM.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from contextlib import nullcontext
from pathlib import Path

import numpy as np

from .grid import GridFunction, GridSpec, interior_mask
from .moyal import identity_symbol, moyal
from .ousg import rasterize_region, symbol_a_t
from .potential import (
    PExponent,
    PolynomialPotential1D,
    Potential,
    QuadraticPotential,
    hermite,
    u_p_forward,
    u_p_inverse,
)
from .quantize import apply, build_kernel, kernel_phase_grid, norm_lower_estimate, young_upper_bound
from .symbol import (
    GrowthMap,
    GrowthPair,
    SymbolF2,
    growth_pair_scan,
    hs_norm,
    quadratic_growth_pair,
)

COMMANDS = (
    "growth-pair",
    "hs-norm",
    "apply",
    "semigroup-check",
    "moyal-check",
    "eig-check",
    "region",
    "norm-bound",
)


class ConfigError(ValueError):
    pass


# output formatting


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _encode(obj, indent: int = 0) -> str:
    pad = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + "  " * indent + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(_encode(v, indent + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + "  " * indent + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(obj) if math.isfinite(obj) else json.dumps(str(float(obj)))
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist(), indent)
    return json.dumps(str(obj))


def dumps(report: dict) -> str:
    """Deterministic JSON with 17 significant digits for every float."""
    return _encode(report) + "\n"


def grid_csv(points: np.ndarray, values: np.ndarray) -> str:
    d = points.shape[-1]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    names = ["x"] if d == 1 else [f"x{i + 1}" for i in range(d)]
    w.writerow(names + ["re", "im"])
    for pt, v in zip(points.reshape(-1, d), np.asarray(values, dtype=complex).reshape(-1)):
        w.writerow([_fmt(c) for c in pt] + [_fmt(v.real), _fmt(v.imag)])
    return buf.getvalue()


def read_grid_csv(path: Path, spec: GridSpec) -> GridFunction:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2 or len(rows[0]) != spec.d + 2:
        raise ConfigError(f"{path}: expected header and {spec.d + 2} columns")
    data = np.array([[float(c) for c in r] for r in rows[1:] if r])
    if data.shape[0] != spec.size:
        raise ConfigError(f"{path}: {data.shape[0]} rows, grid has {spec.size} points")
    if not np.allclose(data[:, :spec.d], spec.flat_points(), rtol=0, atol=1e-9):
        raise ConfigError(f"{path}: coordinates do not match the configured grid")
    vals = (data[:, spec.d] + 1j * data[:, spec.d + 1]).reshape(spec.shape)
    return GridFunction(spec, vals)


def pgm_bytes(bitmap: np.ndarray) -> bytes:
    rows, cols = bitmap.shape
    header = f"P5\n{cols} {rows}\n255\n".encode("ascii")
    return header + (np.asarray(bitmap, dtype=np.uint8) * 255).astype(np.uint8).tobytes()


# config parsing


def _require(cfg: dict, key: str, where: str = "config"):
    if not isinstance(cfg, dict) or key not in cfg:
        raise ConfigError(f"{where}: missing key {key!r}")
    return cfg[key]


def parse_potential(cfg: dict) -> Potential:
    kind = _require(cfg, "type", "potential")
    c = float(cfg.get("c", 1.0))
    if kind == "quadratic":
        N = np.array(_require(cfg, "N", "potential"), dtype=float)
        N = np.atleast_2d(N)
        l = cfg.get("l")
        if l is not None and len(l) != N.shape[0]:
            raise ConfigError("potential: l and N dimensions disagree")
        return QuadraticPotential(N, l, c)
    if kind == "custom-1d":
        return PolynomialPotential1D(_require(cfg, "coefficients", "potential"),
                                     cfg.get("sines", ()), c)
    raise ConfigError(f"potential: unknown type {kind!r}")


def parse_grid(cfg: dict, d: int) -> GridSpec:
    L = _require(cfg, "L", "grid")
    n = _require(cfg, "n", "grid")
    try:
        return GridSpec.uniform(d, L, n)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"grid: {exc}") from exc


_FUNCTIONS = {"cos": np.cos, "sin": np.sin}


def parse_symbol(cfg: dict, pot: Potential) -> SymbolF2:
    kind = _require(cfg, "type", "symbol")
    d = pot.d
    if kind == "ou":
        if not isinstance(pot, QuadraticPotential):
            raise ConfigError("symbol: 'ou' requires a quadratic potential")
        if "z" in cfg:
            re, im = cfg["z"]
            sym = symbol_a_t(pot, complex(re, im))
        else:
            sym = symbol_a_t(pot, float(_require(cfg, "t", "symbol")))
    elif kind == "gaussian":
        sym = SymbolF2.gaussian(float(_require(cfg, "s", "symbol")), d)
    elif kind == "identity":
        sym = SymbolF2.identity(d)
    elif kind == "zero":
        sym = SymbolF2.zero(d)
    elif kind == "multiplier":
        if "function" in cfg:
            fn = _FUNCTIONS.get(cfg["function"])
            if fn is None:
                raise ConfigError(f"symbol: unknown multiplier function {cfg['function']!r}")
            sym = SymbolF2.multiplier(lambda x: fn(np.sum(x, axis=-1)), d, cfg["function"])
        else:
            table = _require(cfg, "table", "symbol")
            if d != 1:
                raise ConfigError("symbol: tabulated multipliers are one-dimensional")
            xs = np.asarray(_require(table, "x", "symbol.table"), dtype=float)
            vs = np.asarray(_require(table, "values", "symbol.table"), dtype=float)
            if xs.shape != vs.shape or xs.size < 2 or np.any(np.diff(xs) <= 0):
                raise ConfigError("symbol.table: x must increase and match values")
            sym = SymbolF2.multiplier(lambda x: np.interp(x[..., 0], xs, vs), 1, "table")
    elif kind == "sum":
        terms = _require(cfg, "terms", "symbol")
        if not terms:
            raise ConfigError("symbol: empty sum")
        sym = SymbolF2.zero(d)
        for term in terms:
            sym = sym + parse_symbol(term, pot)
    else:
        raise ConfigError(f"symbol: unknown type {kind!r}")
    if "weight" in cfg:
        sym = float(cfg["weight"]) * sym
    return sym


def growth_pair_for(cfg: dict, pot: Potential, p: PExponent) -> GrowthPair:
    opts = cfg.get("options", {})
    gm = opts.get("growth_map")
    if gm is not None:
        M = GrowthMap(gm["Mtilde"], gm.get("ell"))
        if M.d != pot.d:
            raise ConfigError("options.growth_map: dimension mismatch")
        return GrowthPair(M, float(opts.get("epsilon", 0.0)))
    if isinstance(pot, QuadraticPotential):
        return quadratic_growth_pair(pot, p)
    if isinstance(pot, PolynomialPotential1D):
        coef = list(pot.coefficients) + [0.0, 0.0, 0.0]
        quad = QuadraticPotential([[coef[2]]], [coef[1]], pot.c)
        gp = quadratic_growth_pair(quad, p)
        return GrowthPair(gp.M, float(opts.get("epsilon", 0.0)))
    raise ConfigError("no growth map available for this potential")


class Context:
    def __init__(self, cfg: dict, seed: int, out: Path | None, threads: int):
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
        self.cfg = cfg
        self.seed = seed
        self.out = out
        self.threads = threads
        self.pot = parse_potential(_require(cfg, "potential"))
        self.p = PExponent.parse(_require(cfg, "p"))
        self.spec = parse_grid(_require(cfg, "grid"), self.pot.d)
        self.options = cfg.get("options", {})

    def symbol(self, key: str = "symbol") -> SymbolF2:
        return parse_symbol(_require(self.cfg, key), self.pot)

    def aux_path(self, suffix: str) -> Path | None:
        if self.out is None:
            return None
        return self.out.with_name(self.out.stem + suffix)

    def executor(self):
        return ThreadPoolExecutor(self.threads) if self.threads > 1 else nullcontext()


# commands


def cmd_growth_pair(ctx: Context) -> dict:
    gp = growth_pair_for(ctx.cfg, ctx.pot, ctx.p)
    eps_hat, x, y = growth_pair_scan(ctx.pot, ctx.p, gp, ctx.spec)
    tol = float(ctx.options.get("tolerance", 1e-10))
    return {
        "epsilon_hat": eps_hat,
        "argmax_x": x,
        "argmax_y": y,
        "epsilon": gp.epsilon,
        "Mtilde": gp.M.Mtilde,
        "ell": gp.M.ell,
        "pass": bool(eps_hat <= gp.epsilon + tol),
    }


def _hs_report(ctx: Context, sym: SymbolF2, gp: GrowthPair):
    xspec, kspec = kernel_phase_grid(ctx.spec, ctx.pot.c)
    return hs_norm(sym, gp.M, xspec, kspec)


def cmd_hs_norm(ctx: Context) -> dict:
    sym = ctx.symbol()
    if ctx.options.get("growth", "pair") == "zero":
        gp = GrowthPair(GrowthMap.zero(ctx.pot.d))
    else:
        gp = growth_pair_for(ctx.cfg, ctx.pot, ctx.p)
    rep = _hs_report(ctx, sym, gp)
    path = ctx.aux_path(".gmax.csv")
    if path is not None:
        path.write_text(grid_csv(rep.kspec.points(), rep.g_max))
    return {
        "hs0_norm": rep.hs0_norm,
        "b_norm": rep.b_norm,
        "total": rep.total,
        "g_max_csv": path.name if path else None,
    }


def cmd_apply(ctx: Context, input_path: Path | None) -> str:
    if input_path is None:
        raise ConfigError("apply needs --input <csv>")
    f = read_grid_csv(input_path, ctx.spec)
    sym = ctx.symbol()
    with ctx.executor() as ex:
        K = build_kernel(sym, ctx.pot, ctx.p, ctx.spec, executor=ex)
    if ctx.options.get("side", "lambda") == "mu":
        # conjugate back to the weighted side
        g = apply(K, u_p_forward(ctx.pot, ctx.p, f))
        f_out = u_p_inverse(ctx.pot, ctx.p, g)
    else:
        f_out = apply(K, f)
    return grid_csv(ctx.spec.points(), f_out.values)


def cmd_semigroup_check(ctx: Context) -> dict:
    if not isinstance(ctx.pot, QuadraticPotential):
        raise ConfigError("semigroup-check requires a quadratic potential")
    t = float(ctx.options.get("t", 0.5))
    s = float(ctx.options.get("s", 0.5))
    tol = float(ctx.options.get("tolerance", 1e-6))
    a_t, a_s, a_ts = (symbol_a_t(ctx.pot, v) for v in (t, s, t + s))
    kspec = ctx.spec.dual()
    prod = moyal(a_t, a_s, vspec=kspec)
    xs = ctx.spec.flat_points()[:, None, :]
    ks = kspec.flat_points()[None, :, :]
    err = float(np.max(np.abs(prod.eval_hs0(xs, ks) - a_ts.eval_hs0(xs, ks))))
    return {"t": t, "s": s, "sup_error_F2": err, "tolerance": tol, "pass": bool(err < tol)}


def _relfrob(A: np.ndarray, B: np.ndarray) -> float:
    return float(np.linalg.norm(A - B) / max(np.linalg.norm(B), np.finfo(float).tiny))


def cmd_moyal_check(ctx: Context) -> dict:
    specs = _require(ctx.cfg, "symbols")
    if not isinstance(specs, list) or len(specs) != 2:
        raise ConfigError("symbols: expected a list of two symbol specs")
    a, b = (parse_symbol(s, ctx.pot) for s in specs)
    xk, kk = kernel_phase_grid(ctx.spec, ctx.pot.c)
    ab = moyal(a, b, vspec=kk)
    with ctx.executor() as ex:
        Kab = build_kernel(ab, ctx.pot, ctx.p, ctx.spec, executor=ex).dense()
        Ka = build_kernel(a, ctx.pot, ctx.p, ctx.spec, executor=ex).dense()
        Kb = build_kernel(b, ctx.pot, ctx.p, ctx.spec, executor=ex).dense()
    relerr = _relfrob(Kab, Ka @ Kb)
    gp = growth_pair_for(ctx.cfg, ctx.pot, ctx.p)
    hs = lambda sym: hs_norm(sym, gp.M, ctx.spec, kk).total  # noqa: E731
    denom = hs(a) * hs(b)
    ratio = hs(ab) / denom if denom > 0 else 0.0
    one = identity_symbol(ctx.pot.d)
    xs = ctx.spec.flat_points()[:, None, :]
    ks = kk.flat_points()[None, :, :]
    id_err = 0.0
    for prod in (moyal(one, a, vspec=kk), moyal(a, one, vspec=kk)):
        id_err = max(
            id_err,
            float(np.max(np.abs(prod.eval_hs0(xs, ks) - a.eval_hs0(xs, ks)), initial=0.0)),
            float(np.max(np.abs(prod.eval_b(xs[:, 0]) - a.eval_b(xs[:, 0])), initial=0.0)),
        )
    comp_tol = float(ctx.options.get("composition_tolerance", 1e-4))
    sub_tol = float(ctx.options.get("submultiplicativity_slack", 5e-3))
    id_tol = float(ctx.options.get("identity_tolerance", 1e-12))
    return {
        "kernel_composition_relerr": relerr,
        "submultiplicativity_ratio": ratio,
        "identity_error": id_err,
        "pass": bool(relerr < comp_tol and ratio <= 1.0 + sub_tol and id_err < id_tol),
    }


def cmd_eig_check(ctx: Context) -> dict:
    pot = ctx.pot
    if not isinstance(pot, QuadraticPotential) or pot.d != 1:
        raise ConfigError("eig-check requires a one-dimensional quadratic potential")
    nu, l0 = float(pot.N[0, 0]), float(pot.l[0])
    if nu <= 0:
        raise ConfigError("eig-check requires N > 0")
    t = float(ctx.options.get("t", 0.7))
    n_max = int(ctx.options.get("n_max", 3))
    margin = float(ctx.options.get("margin", 0.1))
    tol = float(ctx.options.get("tolerance", 1e-4))
    spec = ctx.spec
    with ctx.executor() as ex:
        K = build_kernel(symbol_a_t(pot, t), pot, ctx.p, spec, executor=ex)
    x = spec.points()[..., 0]
    mask = interior_mask(spec, margin)
    rows = []
    for n in range(n_max + 1):
        # eigenfunctions of -f'' + (2 nu x + l) f' with eigenvalue 2 nu n
        eig = GridFunction(spec, hermite(n, np.sqrt(2 * nu) * (x + l0 / (2 * nu))))
        g = u_p_forward(pot, ctx.p, eig)
        Kg = apply(K, g).values
        expected = math.exp(-2 * nu * t * n)
        ref = expected * g.values
        relerr = float(np.max(np.abs(Kg - ref)[mask]) / np.max(np.abs(ref)[mask]))
        gv = g.values[mask]
        observed = float(np.real(np.vdot(gv, Kg[mask]) / np.vdot(gv, gv)))
        rows.append({"n": n, "expected": expected, "observed_ratio": observed,
                     "relerr": relerr, "pass": bool(relerr < tol)})
    return {"t": t, "tolerance": tol, "results": rows}


def cmd_region(ctx: Context) -> dict:
    if not isinstance(ctx.pot, QuadraticPotential):
        raise ConfigError("region requires a quadratic potential")
    o = ctx.options
    eps = float(o.get("eps", 0.05))
    delta = float(o.get("delta", 0.1))
    bbox = o.get("bbox", [-4.0, 4.0, -4.0, 4.0])
    res = o.get("resolution", 128)
    if len(bbox) != 4:
        raise ConfigError("options.bbox: expected [re_min, re_max, im_min, im_max]")
    uniform = o.get("predicate", "EN") == "EN_eps_delta"
    with ctx.executor() as ex:
        en = rasterize_region(ctx.pot.N, ctx.p, eps, delta, bbox, res, False, ex)
        ed = rasterize_region(ctx.pot.N, ctx.p, eps, delta, bbox, res, True, ex)
    shown = ed if uniform else en
    path = ctx.aux_path(".pgm")
    if path is not None:
        path.write_bytes(pgm_bytes(shown))
    report = {
        "predicate": "EN_eps_delta" if uniform else "EN",
        "rows": shown.shape[0],
        "cols": shown.shape[1],
        "inside_pixels": int(shown.sum()),
        "outside_pixels": int(shown.size - shown.sum()),
        "EN_inside_pixels": int(en.sum()),
        "EN_eps_delta_inside_pixels": int(ed.sum()),
        "nested": bool(np.all(ed <= en)),
        "pgm": path.name if path else None,
    }
    symmetric_box = float(bbox[2]) == -float(bbox[3])
    if symmetric_box:
        report["conjugation_symmetric"] = bool(
            np.array_equal(en, en[::-1]) and np.array_equal(ed, ed[::-1])
        )
    report["pass"] = bool(report["nested"] and report.get("conjugation_symmetric", True))
    return report


def cmd_norm_bound(ctx: Context) -> dict:
    if np.isinf(ctx.p.p) or ctx.p.p == 1.0:
        raise ConfigError("norm-bound estimates only 1 < p < inf")
    sym = ctx.symbol()
    gp = growth_pair_for(ctx.cfg, ctx.pot, ctx.p)
    eps_hat, _, _ = growth_pair_scan(ctx.pot, ctx.p, gp, ctx.spec)
    rep = _hs_report(ctx, sym, gp)
    upper = young_upper_bound(rep, eps_hat)
    with ctx.executor() as ex:
        K = build_kernel(sym, ctx.pot, ctx.p, ctx.spec, executor=ex)
    trials = int(ctx.options.get("trials", 32))
    lower = norm_lower_estimate(K, ctx.p.p, trials, ctx.seed)
    return {
        "epsilon_hat": eps_hat,
        "hs_total": rep.total,
        "young_upper": upper,
        "random_lower": lower,
        "bracket_ok": bool(lower <= upper * (1 + 1e-6)),
    }


def collect_flags(report) -> list[bool]:
    """Every ``pass`` / ``bracket_ok`` value in a (nested) report."""
    found = []
    if isinstance(report, dict):
        for k, v in report.items():
            if k in ("pass", "bracket_ok"):
                found.append(bool(v))
            else:
                found.extend(collect_flags(v))
    elif isinstance(report, list):
        for v in report:
            found.extend(collect_flags(v))
    return found


def _threads(arg: int | None) -> int:
    env = os.environ.get("WEYLSTRIP_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"WEYLSTRIP_THREADS must be an integer, got {env!r}") from None
    return max(1, arg or 1)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="weylstrip", description="Weyl-calculus checks for OU operators")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, type=Path)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path)
    ap.add_argument("--threads", type=int)
    ap.add_argument("--input", type=Path, help="input CSV for 'apply'")
    return ap


_HANDLERS = {
    "growth-pair": cmd_growth_pair,
    "hs-norm": cmd_hs_norm,
    "semigroup-check": cmd_semigroup_check,
    "moyal-check": cmd_moyal_check,
    "eig-check": cmd_eig_check,
    "region": cmd_region,
    "norm-bound": cmd_norm_bound,
}


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if not 0 <= args.seed < 2**64:
            raise ConfigError("--seed must fit in an unsigned 64-bit integer")
        try:
            cfg = json.loads(args.config.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        ctx = Context(cfg, args.seed, args.out, _threads(args.threads))
        if args.command == "apply":
            text = cmd_apply(ctx, args.input)
            flags = []
        else:
            report = {"command": args.command, **_HANDLERS[args.command](ctx)}
            text = dumps(report)
            flags = collect_flags(report)
    except (ValueError, KeyError, TypeError, ArithmeticError) as exc:
        print(f"weylstrip: error: {exc}", file=sys.stderr)
        return 2
    if args.out is not None:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if all(flags) else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
