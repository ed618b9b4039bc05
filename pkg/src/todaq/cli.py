"""Command-line front end: flows, spectra, star products, verification.

Exit codes: 0 success, 1 verification failure (or a failed spectrum
comparison), 2 configuration error, 3 integration or solver failure.
Output is deterministic byte-for-byte for a fixed configuration and
seed; wall-clock timings never reach stdout or the CSV files.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import click
import numpy as np

from . import flow, lax, liepoisson, spectral
from . import verify as verify_mod
from .exactnum import Poly

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_SOLVER = 3

SUITE_CHOICES = verify_mod.SUITES + ("all",)

# every key a config file may set; values are parsed exactly like the
# matching command-line flag
KNOWN_KEYS = frozenset({
    "system", "problem", "n", "m", "size", "state", "t", "h", "method",
    "stride", "seed", "domain", "N", "k", "map", "vectors", "compare",
    "rel_tol", "out", "plot", "left", "right", "table",
})


class ConfigError(click.UsageError):
    """Bad configuration; click maps UsageError to exit code 2."""


@dataclass(frozen=True)
class RunConfig:
    """One run of the flow or spectrum path, fully resolved."""

    system: str | None = None
    problem: str | None = None
    n: int | None = None
    m: int | None = None
    size: int | None = None
    state: str | None = None
    t_final: float = 10.0
    h: float = 1e-3
    method: str = "rk4"
    stride: int = 10
    seed: int = 0
    domain: tuple | None = None
    npoints: int = 4096
    k: int = 5
    mapping: str | None = None
    vectors: bool = False
    compare: str | None = None
    rel_tol: float | None = None
    out: str | None = None
    plot: bool = False


# ---------------------------------------------------------------------------
# parsing helpers


def parse_domain(text: str) -> tuple:
    """Parse 'lo:hi' into a float pair, e.g. '-8:3'."""
    parts = text.split(":")
    if len(parts) != 2:
        raise ConfigError(f"domain must be 'lo:hi', got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError:
        raise ConfigError(f"domain endpoints must be numbers, got {text!r}")
    if not lo < hi:
        raise ConfigError(f"domain needs lo < hi, got {text!r}")
    return lo, hi


def parse_state(text: str, dim: int, seed: int) -> np.ndarray:
    if text == "random":
        return np.random.default_rng(seed).uniform(-1.0, 1.0, dim)
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise ConfigError(f"state must be comma-separated numbers or "
                          f"'random', got {text!r}")
    if len(vals) != dim:
        raise ConfigError(f"state needs {dim} components, got {len(vals)}")
    return np.asarray(vals)


def _slug(*parts) -> str:
    return "_".join(str(p) for p in parts if p is not None and p != "")


def _out_paths(base: str, out: str | None, plot: bool):
    csv = Path(out) if out else Path(f"{base}.csv")
    png = csv.with_suffix(".png") if plot else None
    return csv, png


# config keys whose click parameter uses a different internal name
_KEY_ALIASES = {"t": "t_final", "N": "npoints", "map": "mapping"}


def read_config_file(path: str) -> dict:
    data = {}
    for ln, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{ln}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ConfigError(f"{path}:{ln}: unknown key {key!r}")
        data[_KEY_ALIASES.get(key, key)] = value
    return data


def read_spectrum_csv(path: str) -> np.ndarray:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != "k,E_k":
        raise ConfigError(f"{path} is not a spectrum CSV (want header k,E_k)")
    return np.asarray([float(line.split(",")[1]) for line in lines[1:]])


# ---------------------------------------------------------------------------
# expression parser for the star command

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>L\d\d)"
                    r"|(?P<op>[-+*^()]))")


def parse_poly(text: str, n: int) -> Poly:
    """Parse sums of coefficient-weighted monomials in the entries L<i><j>.

    Grammar: expr := ['+'|'-'] term (('+'|'-') term)*;
    term := factor ('*' factor)*; factor := number | L<i><j> ['^' int]
    | '(' expr ')'.  Numbers are integers or fractions a/b.
    """
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            if text[pos:].strip():
                raise ConfigError(f"bad token at {text[pos:]!r}")
            break
        tokens.append(m)
        pos = m.end()
    toks = [(m.lastgroup, m.group(m.lastgroup)) for m in tokens]
    nv = n * n
    idx = 0

    def peek():
        return toks[idx] if idx < len(toks) else (None, None)

    def take():
        nonlocal idx
        t = peek()
        idx += 1
        return t

    def factor() -> Poly:
        nonlocal idx
        kind, val = take()
        if kind == "num":
            return Poly.constant(nv, Fraction(val))
        if kind == "name":
            i, j = int(val[1]), int(val[2])
            if not (1 <= i <= n and 1 <= j <= n):
                raise ConfigError(f"{val} is outside the {n}x{n} matrix")
            power = 1
            if peek() == ("op", "^"):
                take()
                pk, pv = take()
                if pk != "num" or "/" in pv:
                    raise ConfigError("exponent must be a nonnegative integer")
                power = int(pv)
            return liepoisson.coordinate_poly(n, i, j) ** power
        if (kind, val) == ("op", "("):
            inner = expr()
            if take() != ("op", ")"):
                raise ConfigError("unbalanced parentheses")
            return inner
        raise ConfigError(f"expected a number, L<i><j>, or '(', got {val!r}")

    def term() -> Poly:
        out = factor()
        while peek() == ("op", "*"):
            take()
            out = out * factor()
        return out

    def expr() -> Poly:
        sign = Fraction(1)
        if peek()[0] == "op" and peek()[1] in "+-":
            sign = Fraction(-1) if take()[1] == "-" else Fraction(1)
        out = term() * sign
        while peek()[0] == "op" and peek()[1] in "+-":
            neg = take()[1] == "-"
            nxt = term()
            out = out - nxt if neg else out + nxt
        return out

    result = expr()
    if idx != len(toks):
        raise ConfigError(f"trailing input at {toks[idx][1]!r}")
    return result


# ---------------------------------------------------------------------------
# command bodies (return exit codes; used directly by tests)


def cmd_flow(cfg: RunConfig) -> int:
    if cfg.system is None:
        raise ConfigError("flow needs --system (or system= in the config)")
    try:
        system = lax.make_system(cfg.system, n=cfg.n, m=cfg.m, size=cfg.size)
    except (KeyError, ValueError) as exc:
        # str(KeyError) wraps the message in quotes; unwrap the bare text
        raise ConfigError(exc.args[0] if exc.args else str(exc))
    try:
        config = flow.IntegratorConfig(method=cfg.method, h=cfg.h,
                                       t_final=cfg.t_final, stride=cfg.stride)
    except ValueError as exc:
        raise ConfigError(str(exc))
    z0 = system.default_state() if cfg.state is None else \
        parse_state(cfg.state, system.dim, cfg.seed)
    base = _slug("flow", cfg.system,
                 None if cfg.n is None else f"n{cfg.n}",
                 None if cfg.m is None else f"m{cfg.m}",
                 None if cfg.size is None else f"size{cfg.size}")
    csv_path, png_path = _out_paths(base, cfg.out, cfg.plot)
    try:
        traj = flow.integrate(system, z0, config)
    except flow.FlowError as exc:
        click.echo(f"integration failed: {exc}", err=True)
        return EXIT_SOLVER
    rep = flow.drift_report(traj)
    flow.write_trajectory_csv(traj, csv_path, rep)
    ret = float(np.max(np.abs(traj.final_state - traj.initial_state)))
    click.echo(f"flow {system.family} ({system.phase_name} chart): "
               f"{len(traj.times)} samples to t = {traj.times[-1]:g}, "
               f"method {config.method}")
    drift_bits = [f"trL{'' if k == 1 else k}={v:.3e}"
                  for k, v in sorted(rep.invariant_drift.items())]
    click.echo("drift: " + " ".join(drift_bits)
               + f" eig={rep.eigenvalue_drift:.3e}")
    click.echo(f"return |z(T) - z(0)| = {ret:.3e}")
    click.echo(f"wrote {csv_path}")
    if png_path is not None:
        from . import plots

        plots.trajectory_figure(traj, png_path)
        click.echo(f"wrote {png_path}")
    return EXIT_OK


def cmd_spectrum(cfg: RunConfig) -> int:
    if cfg.problem is None:
        raise ConfigError("spectrum needs --problem (or problem= in the config)")
    try:
        problem = spectral.get_problem(cfg.problem, n=cfg.n, domain=cfg.domain)
    except (KeyError, ValueError) as exc:
        raise ConfigError(exc.args[0] if exc.args else str(exc))
    if cfg.mapping is not None:
        if cfg.mapping == "exp":
            mapping = spectral.ExpMap()
        elif cfg.mapping == "flatten":
            mapping = spectral.axis_conjugation_map(0 if cfg.n is None else cfg.n)
        else:
            raise ConfigError(f"unknown map {cfg.mapping!r} (exp, flatten)")
        try:
            problem = spectral.change_of_variable(problem, mapping)
        except spectral.MapError as exc:
            raise ConfigError(str(exc))
    base = _slug("spectrum", cfg.problem,
                 None if cfg.n is None else f"n{cfg.n}", cfg.mapping)
    csv_path, png_path = _out_paths(base, cfg.out, cfg.plot)
    want_vectors = cfg.vectors or cfg.plot
    try:
        spec = spectral.solve(problem, cfg.npoints, cfg.k, vectors=want_vectors)
    except ValueError as exc:
        raise ConfigError(str(exc))
    except spectral.SolveError as exc:
        click.echo(f"solve failed: {exc}", err=True)
        return EXIT_SOLVER
    click.echo(f"problem {cfg.problem}: {problem.render()}")
    click.echo(f"N = {spec.N}, method {spec.method}")
    for i, e in enumerate(spec.energies):
        click.echo(f"E_{i} = {float(e)!r}")
    spectral.write_spectrum_csv(spec, csv_path)
    click.echo(f"wrote {csv_path}")
    if cfg.vectors:
        psi_path = csv_path.with_name(csv_path.stem + "_psi.csv")
        spectral.write_eigenfunctions_csv(spec, psi_path)
        click.echo(f"wrote {psi_path}")
    if png_path is not None:
        from . import plots

        plots.spectrum_figure(spec, png_path)
        click.echo(f"wrote {png_path}")
    if cfg.compare is not None:
        other = read_spectrum_csv(cfg.compare)
        comparison = spectral.compare_spectra(spec.energies, other)
        tol = 1e-3 if cfg.rel_tol is None else cfg.rel_tol
        ok = comparison.ok(tol)
        click.echo(f"compare vs {cfg.compare}: max rel dev "
                   f"{comparison.max_rel_dev:.3e} over {comparison.levels} "
                   f"levels (tol {tol:g}) {'PASS' if ok else 'FAIL'}")
        if not ok:
            return EXIT_CHECK_FAILED
    return EXIT_OK


def cmd_star(n: int, left: str | None, right: str | None, table: bool,
             out: str | None) -> int:
    if n < 2:
        raise ConfigError("matrix size must be >= 2")
    S = liepoisson.r_bracket_constants(n)
    if table:
        if out:
            liepoisson.structure_to_csv(S, out)
            click.echo(f"wrote {out}")
        else:
            for i, j, k, l, r, s, v in S.entries():
                click.echo(f"{{L{i}{j}, L{k}{l}}} -> {v} * L{r}{s}")
        return EXIT_OK
    if left is None or right is None:
        raise ConfigError("star needs --left and --right expressions "
                          "(or --table)")
    f, g = parse_poly(left, n), parse_poly(right, n)
    st = liepoisson.gutt_star(f, g, S)
    names = tuple(f"L{i}{j}" for i in range(1, n + 1) for j in range(1, n + 1))
    click.echo(f"left  = {f.render(names)}")
    click.echo(f"right = {g.render(names)}")
    lines = []
    for k in sorted(st.orders):
        lines.append(f"hbar^{k}: {st.orders[k].render(names)}")
    sc = liepoisson.star_commutator(f, g, S)
    br = liepoisson.lie_poisson_bracket(f, g, S)
    lines.append(f"commutator hbar^1 part equals bracket: "
                 f"{(sc.order(1) - br).is_zero()}")
    for line in lines:
        click.echo(line)
    if out:
        Path(out).write_text("\n".join(lines) + "\n")
        click.echo(f"wrote {out}")
    return EXIT_OK


def cmd_verify(suite: str, list_only: bool = False) -> int:
    if list_only:
        for name in verify_mod.list_checks(suite):
            click.echo(name)
        return EXIT_OK
    results = verify_mod.run_suite(suite)
    click.echo(verify_mod.render_report(results))
    return EXIT_OK if all(r.ok for r in results) else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# click wiring


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Flat key=value file supplying defaults; "
              "command-line flags override it.")
@click.version_option(package_name="artifact", prog_name="todaq")
@click.pass_context
def main(ctx, config_path):
    """Toda flows, quantized operators, spectra, and verification suites."""
    if config_path is not None:
        data = read_config_file(config_path)
        ctx.default_map = {cmd: dict(data)
                           for cmd in ("flow", "spectrum", "star", "verify")}


@main.command("flow")
@click.option("--system", type=str, default=None,
              help=f"Flow family: {', '.join(lax.SYSTEM_NAMES)}.")
@click.option("--n", type=int, default=None, help="Toy-family exponent.")
@click.option("--m", type=int, default=None, help="Hierarchy member index.")
@click.option("--size", type=int, default=None, help="Matrix size for gl.")
@click.option("--state", type=str, default=None,
              help="Comma-separated initial state, or 'random'.")
@click.option("--t", "t_final", type=float, default=10.0, show_default=True,
              help="Final time.")
@click.option("--h", type=float, default=1e-3, show_default=True,
              help="Fixed step size.")
@click.option("--method", type=click.Choice(flow.METHODS), default="rk4",
              show_default=True)
@click.option("--stride", type=int, default=10, show_default=True,
              help="Sample every this many steps.")
@click.option("--seed", type=int, default=0, show_default=True,
              help="Seed for --state random.")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Trajectory CSV path (default flow_<system>....csv).")
@click.option("--plot", is_flag=True, default=False,
              help="Also render a PNG figure next to the CSV.")
@click.pass_context
def flow_command(ctx, system, n, m, size, state, t_final, h, method, stride,
                 seed, out, plot):
    """Integrate a catalog flow and write the trajectory CSV."""
    cfg = RunConfig(system=system, n=n, m=m, size=size, state=state,
                    t_final=t_final, h=h, method=method, stride=stride,
                    seed=seed, out=out, plot=plot)
    ctx.exit(cmd_flow(cfg))


@main.command("spectrum")
@click.option("--problem", type=str, default=None,
              help=f"Eigenproblem: {', '.join(spectral.PROBLEM_NAMES)}.")
@click.option("--n", type=int, default=None, help="Toy-family exponent.")
@click.option("--domain", type=str, default=None,
              help="Dirichlet box 'lo:hi' overriding the catalog domain.")
@click.option("--N", "npoints", type=int, default=4096, show_default=True,
              help="Grid subdivisions.")
@click.option("--k", type=int, default=5, show_default=True,
              help="Number of lowest eigenvalues.")
@click.option("--map", "mapping", type=str, default=None,
              help="Change of variable before solving: exp or flatten.")
@click.option("--vectors", is_flag=True, default=False,
              help="Also write the eigenfunction table CSV.")
@click.option("--compare", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Compare against a previous spectrum CSV.")
@click.option("--rel-tol", type=float, default=None,
              help="Tolerance for --compare (default 1e-3); exceeding it "
              "exits 1.")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Spectrum CSV path (default spectrum_<problem>....csv).")
@click.option("--plot", is_flag=True, default=False,
              help="Also render a PNG figure next to the CSV.")
@click.pass_context
def spectrum_command(ctx, problem, n, domain, npoints, k, mapping, vectors,
                     compare, rel_tol, out, plot):
    """Solve a catalog eigenproblem and write the k,E_k CSV."""
    cfg = RunConfig(problem=problem, n=n,
                    domain=None if domain is None else parse_domain(domain),
                    npoints=npoints, k=k, mapping=mapping, vectors=vectors,
                    compare=compare, rel_tol=rel_tol, out=out, plot=plot)
    ctx.exit(cmd_spectrum(cfg))


@main.command("star")
@click.option("--n", type=int, default=2, show_default=True,
              help="Matrix size of the linear bracket.")
@click.option("--left", type=str, default=None,
              help="Left factor, e.g. 'L12*L21 + 1/2*L11^2'.")
@click.option("--right", type=str, default=None, help="Right factor.")
@click.option("--table", is_flag=True, default=False,
              help="Print or write the bracket constants instead.")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Output path (CSV for --table, text otherwise).")
@click.pass_context
def star_command(ctx, n, left, right, table, out):
    """Star-multiply two polynomials in the matrix entries."""
    ctx.exit(cmd_star(n, left, right, table, out))


@main.command("verify")
@click.argument("suite", type=click.Choice(SUITE_CHOICES))
@click.option("--list", "list_only", is_flag=True, default=False,
              help="List check names without running them.")
@click.pass_context
def verify_command(ctx, suite, list_only):
    """Run a named verification suite; exit 0 only if all checks pass."""
    ctx.exit(cmd_verify(suite, list_only))


if __name__ == "__main__":
    main()
