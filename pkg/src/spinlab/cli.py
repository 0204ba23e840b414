"""Command-line front end.  All structured output is JSON (rational values
serialized as "p/q" strings); sweeps and scans emit CSV.  Exit codes:
0 success, 2 validation/schema error, 3 resource guard tripped."""

from __future__ import annotations

import hashlib
import json
import math
import os
import sys
import time

import click
import numpy as np

from . import (__version__, breakup as breakup_mod, catalog as catalog_mod,
               errors, gibbs, kbipartite, lattice as lat_mod, parameters,
               patterns)
from .patterns import Pattern
from .system import (bipartite_cover, config_weight, emit_number, load_system,
                     product, project_from_doubled, reweight)


def _meta(subcommand, system_path=None, seed=None, t0=None):
    meta = {
        "tool": "spinlab",
        "version": __version__,
        "subcommand": subcommand,
        "rng": gibbs.RNG_ID,
        "threads": os.environ.get("SPINLAB_THREADS"),
        "seed": seed,
        "wall_time_s": round(time.time() - t0, 3) if t0 else None,
    }
    if system_path:
        with open(system_path, "rb") as fh:
            meta["system_sha256"] = hashlib.sha256(fh.read()).hexdigest()
    return meta


def _emit(payload, out):
    text = json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_states(system, text):
    if text == "all":
        return system.full_mask()
    mask = 0
    for label in text.split(","):
        label = label.strip()
        if label == "":
            continue
        try:
            mask |= 1 << system.states.index(label)
        except ValueError:
            raise errors.SchemaError(f"unknown state {label!r}")
    return mask


def _parse_pattern(system, text) -> Pattern:
    """"A=1;B=2,3" with state labels."""
    parts = dict(p.split("=", 1) for p in text.split(";") if p)
    if set(parts) != {"A", "B"}:
        raise errors.SchemaError("pattern must be given as A=...;B=...")
    return Pattern(_parse_states(system, parts["A"]),
                   _parse_states(system, parts["B"]))


def _parse_psi(system, d, text) -> kbipartite.PsiSpec:
    """complete | class:J=<labels>:<cls>[:eps=x][:epsbar=y] |
    product:<labels>|<labels>|... (short products padded with S)."""
    if text == "complete":
        return kbipartite.PsiSpec(kind="product",
                                  coords=[system.full_mask()] * (2 * d))
    kind, _, rest = text.partition(":")
    if kind == "class":
        fields = rest.split(":")
        if not fields or not fields[0].startswith("J="):
            raise errors.SchemaError("class spec needs J=<labels>")
        J = _parse_states(system, fields[0][2:])
        cls = fields[1] if len(fields) > 1 else "full"
        eps = eps_bar = None
        for extra in fields[2:]:
            k, _, v = extra.partition("=")
            if k == "eps":
                eps = float(v)
            elif k == "epsbar":
                eps_bar = float(v)
            else:
                raise errors.SchemaError(f"unknown class option {k!r}")
        return kbipartite.class_spec(J, cls, eps, eps_bar)
    if kind == "product":
        coords = [_parse_states(system, grp) for grp in rest.split("|")]
        if len(coords) > 2 * d:
            raise errors.SchemaError("more coordinates than 2d")
        coords += [system.full_mask()] * (2 * d - len(coords))
        return kbipartite.PsiSpec(kind="product", coords=coords)
    raise errors.SchemaError(f"unknown psi spec kind {kind!r}")


def _load_config(lat, system, path):
    with open(path) as fh:
        raw = json.load(fh)
    values = raw.get("values")
    if not isinstance(values, dict):
        raise errors.SchemaError('config file needs {"values": {...}}')
    f = [None] * lat.n
    for key, label in values.items():
        coord = tuple(int(x) for x in key.split(","))
        if coord not in lat.index:
            raise errors.SchemaError(f"site {key} not on the lattice")
        try:
            f[lat.index[coord]] = system.states.index(label)
        except ValueError:
            raise errors.SchemaError(f"unknown state {label!r}")
    missing = [i for i, v in enumerate(f) if v is None]
    if missing:
        raise errors.SchemaError(
            f"{len(missing)} sites missing from config (incl. halo)")
    return f


def _coords_of(lat, vset):
    return sorted(",".join(str(x) for x in lat.coords[v]) for v in vset)


@click.group()
def cli():
    """Spin-system analysis toolbox."""


@cli.command("catalog")
@click.argument("name")
@click.option("--q", type=int, default=None)
@click.option("--lam", "--lambda", "lam", default=None)
@click.option("--lam-e", "lam_e", default=None)
@click.option("--lam-o", "lam_o", default=None)
@click.option("--beta", default=None)
@click.option("--m", type=int, default=None)
@click.option("--out", default=None)
def cmd_catalog(name, q, lam, lam_e, lam_o, beta, m, out):
    """Emit a built-in model as a system JSON file."""
    t0 = time.time()
    params = {}
    if q is not None:
        params["q"] = q
    if lam is not None:
        params["lam"] = lam
    if lam_e is not None:
        params["lam_e"] = lam_e
    if lam_o is not None:
        params["lam_o"] = lam_o
    if beta is not None:
        params["beta"] = math.inf if beta == "inf" else beta
    if m is not None:
        params["m"] = m
    system = catalog_mod.build(name, **params)
    payload = system.to_dict()
    payload["meta"] = _meta("catalog", seed=None, t0=t0)
    _emit(payload, out)


@cli.command("analyze")
@click.option("--system", "system_path", required=True)
@click.option("--out", default=None)
def cmd_analyze(system_path, out):
    """Pattern catalog: maximal/dominant patterns, equivalences, exponents."""
    t0 = time.time()
    system = load_system(system_path)
    if system.mode == "float":
        vals = sorted({x for row in system.interactions for x in row},
                      reverse=True)
        if len(vals) > 1 and vals[0] - vals[1] <= 1e-9 * vals[0]:
            click.echo("warning: top two interaction values nearly tied; "
                       "pattern structure may be unstable", err=True)
    cat = patterns.analyze(system)
    payload = cat.to_dict(system)
    payload["meta"] = _meta("analyze", system_path, t0=t0)
    _emit(payload, out)


@cli.command("check")
@click.option("--system", "system_path", required=True)
@click.option("--d", type=int, default=None)
@click.option("--condition", default="simple")
@click.option("--C", "c_big", type=float, default=1.0)
@click.option("--c", "c_small", type=float, default=1.0)
@click.option("--s", type=int, default=None)
@click.option("--sweep", default=None, help="d=LO:HI:geometric[:NPOINTS]")
@click.option("--out", default=None)
def cmd_check(system_path, d, condition, c_big, c_small, s, sweep, out):
    """Evaluate a long-range-order condition at dimension d, or sweep d."""
    t0 = time.time()
    system = load_system(system_path)
    if sweep:
        body = sweep.split("=", 1)[-1]
        parts = body.split(":")
        lo, hi = float(parts[0]), float(parts[1])
        if len(parts) > 2 and parts[2] != "geometric":
            raise errors.SchemaError("only geometric sweeps supported")
        npts = int(parts[3]) if len(parts) > 3 else 25
        ds = sorted({int(round(lo * (hi / lo) ** (i / (npts - 1))))
                     for i in range(npts)})
        lines = ["d,pass,min_margin"]
        for dv in ds:
            rep = parameters.check_condition(system, dv, condition,
                                             C=c_big, c=c_small, s=s)
            margin = min((iq.margin for iq in rep.inequalities
                          if not iq.vacuous), default=math.inf)
            lines.append(f"{dv},{int(rep.passes)},{margin}")
        text = "\n".join(lines) + "\n"
        if out:
            with open(out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return
    if d is None:
        raise errors.SchemaError("--d required without --sweep")
    rep = parameters.check_condition(system, d, condition, C=c_big,
                                     c=c_small, s=s)
    payload = rep.to_dict()
    payload["meta"] = _meta("check", system_path, t0=t0)
    _emit(payload, out)


@cli.command("zfun")
@click.option("--system", "system_path", required=True)
@click.option("--d", type=int, required=True)
@click.option("--psi", required=True)
@click.option("--i", "--I", "i_spec", default="all")
@click.option("--out", default=None)
def cmd_zfun(system_path, d, psi, i_spec, out):
    """Restricted partition function on the complete bipartite graph."""
    t0 = time.time()
    system = load_system(system_path)
    spec = _parse_psi(system, d, psi)
    i_mask = _parse_states(system, i_spec)
    z = kbipartite.z_compositions(system, d, spec, i_mask)
    payload = {"d": d, "psi": psi, "I": i_spec,
               "Z": emit_number(z), "Z_float": float(z),
               "meta": _meta("zfun", system_path, t0=t0)}
    _emit(payload, out)


@cli.command("verify-cond")
@click.option("--system", "system_path", required=True)
@click.option("--d", type=int, required=True)
@click.option("--alpha", type=float, required=True)
@click.option("--gamma", type=float, default=0.0)
@click.option("--eps", type=float, required=True)
@click.option("--epsbar", type=float, required=True)
@click.option("--seed", type=int, default=0)
@click.option("--out", default=None)
def cmd_verify_cond(system_path, d, alpha, gamma, eps, epsbar, seed, out):
    """Numerically test the abstract condition inequalities."""
    t0 = time.time()
    system = load_system(system_path)
    system = kbipartite.normalize_interactions(system)
    rep = kbipartite.verify_main_condition(system, d, alpha, gamma, eps,
                                           epsbar, seed=seed)
    rep["meta"] = _meta("verify-cond", system_path, seed=seed, t0=t0)
    _emit(rep, out)


@cli.command("exact")
@click.option("--system", "system_path", required=True)
@click.option("--lattice", "lattice_spec", required=True)
@click.option("--pattern", "pattern_text", required=True)
@click.option("--site", required=True)
@click.option("--out", default=None)
def cmd_exact(system_path, lattice_spec, pattern_text, site, out):
    """Exact single-site marginal under a pattern boundary condition."""
    t0 = time.time()
    system = load_system(system_path)
    lat = lat_mod.parse_lattice(lattice_spec)
    pat = _parse_pattern(system, pattern_text)
    bc = gibbs.PatternBoundary(pat)
    coord = tuple(int(x) for x in site.split(","))
    marg = gibbs.exact_measure(system, lat, bc, coord)
    payload = {
        "site": site,
        "marginal": {k: emit_number(v) for k, v in marg.items()},
        "prob_not_in_pattern": emit_number(
            gibbs.prob_not_in_pattern(system, lat, bc, coord)),
        "Z": emit_number(gibbs.z_pattern_box(system, lat, bc)),
        "meta": _meta("exact", system_path, t0=t0),
    }
    _emit(payload, out)


@cli.command("mcmc")
@click.option("--system", "system_path", required=True)
@click.option("--lattice", "lattice_spec", required=True)
@click.option("--pattern", "pattern_text", required=True)
@click.option("--site", required=True)
@click.option("--sweeps", default="1e5")
@click.option("--seed", type=int, default=0)
@click.option("--force", is_flag=True, default=False)
@click.option("--out", default=None)
def cmd_mcmc(system_path, lattice_spec, pattern_text, site, sweeps, seed,
             force, out):
    """Heat-bath sampling; reports the recorded site's marginal with
    batch-means standard errors."""
    t0 = time.time()
    system = load_system(system_path)
    lat = lat_mod.parse_lattice(lattice_spec)
    pat = _parse_pattern(system, pattern_text)
    coord = tuple(int(x) for x in site.split(","))
    res = gibbs.run_mcmc(system, lat, gibbs.PatternBoundary(pat), coord,
                         n_sweeps=int(float(sweeps)), seed=seed, force=force)
    payload = {
        "site": site, "n_sweeps": res.n_sweeps, "burn_in": res.burn_in,
        "marginal": res.marginal, "se": res.se, "n_batches": res.n_batches,
        "final_config": {",".join(map(str, lat.coords[v])):
                         system.states[res.config[v]]
                         for v in sorted(lat.interior)},
        "meta": _meta("mcmc", system_path, seed=seed, t0=t0),
    }
    _emit(payload, out)


@cli.command("breakup")
@click.option("--system", "system_path", required=True)
@click.option("--lattice", "lattice_spec", required=True)
@click.option("--config", "config_path", required=True)
@click.option("--pattern", "pattern_text", required=True)
@click.option("--seen-from", "seen_from", required=True)
@click.option("--out", default=None)
def cmd_breakup(system_path, lattice_spec, config_path, pattern_text,
                seen_from, out):
    """Construct and verify a breakup of a stored configuration."""
    t0 = time.time()
    system = load_system(system_path)
    lat = lat_mod.parse_lattice(lattice_spec)
    pat = _parse_pattern(system, pattern_text)
    f = _load_config(lat, system, config_path)
    V = frozenset(lat.index[tuple(int(x) for x in part.split(","))]
                  for part in seen_from.split(";"))
    atlas = breakup_mod.construct_breakup(system, lat, f, pat, V)
    report = breakup_mod.verify_breakup(system, lat, f, pat, atlas, V)
    payload = {
        "charts": {
            f"A={_labels(system, p.a)};B={_labels(system, p.b)}": {
                "X": _coords_of(lat, atlas.x_p[p]),
                "X_defect": _coords_of(lat, atlas.xp_p[p]),
            } for p in atlas.ctx.pats},
        "X_star": _coords_of(lat, atlas.x_star()),
        "stats": atlas.stats(),
        "verify": {k: (v if not isinstance(v, dict)
                       else {"holds": v["holds"]})
                   for k, v in report.items()},
        "meta": _meta("breakup", system_path, t0=t0),
    }
    _emit(payload, out)


def _labels(system, mask):
    return ",".join(system.states[i] for i in system.mask_states(mask))


@cli.command("breakup-scan")
@click.option("--system", "system_path", required=True)
@click.option("--lattice", "lattice_spec", required=True)
@click.option("--pattern", "pattern_text", required=True)
@click.option("--sweeps", default="1e4")
@click.option("--samples", type=int, default=10)
@click.option("--seed", type=int, default=0)
@click.option("--force", is_flag=True, default=False)
@click.option("--out", default=None)
def cmd_breakup_scan(system_path, lattice_spec, pattern_text, sweeps,
                     samples, seed, force, out):
    """Sample configurations by MCMC and stream breakup size statistics."""
    t0 = time.time()
    system = load_system(system_path)
    lat = lat_mod.parse_lattice(lattice_spec)
    pat = _parse_pattern(system, pattern_text)
    bc = gibbs.PatternBoundary(pat)
    center = frozenset({lat.index[tuple(x // 2 for x in lat.dims)]})
    lines = ["sample,seed,L,M,N"]
    for k in range(samples):
        sk = seed + k
        res = gibbs.run_mcmc(system, lat, bc, sorted(lat.interior)[0],
                             n_sweeps=int(float(sweeps)), seed=sk,
                             force=force)
        f = list(res.config)
        rng = np.random.Generator(np.random.PCG64(10 ** 6 + sk))
        halo = gibbs.sample_halo_extension(system, lat, pat, rng)
        for v, s in halo.items():
            f[v] = s
        atlas = breakup_mod.construct_breakup(system, lat, f, pat, center)
        st = atlas.stats()
        lines.append(f"{k},{sk},{st['L']},{st['M']},{st['N']}")
    text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


@cli.command("transform")
@click.option("--system", "system_path", required=True)
@click.option("--op", required=True,
              type=click.Choice(["reweight", "product", "project",
                                 "bipartite-cover"]))
@click.option("--multipliers", default=None, help="comma list for reweight")
@click.option("--d", type=int, default=None, help="dimension for reweight")
@click.option("--system2", default=None, help="second factor for product")
@click.option("--out", default=None)
def cmd_transform(system_path, op, multipliers, d, system2, out):
    """Weight-preserving and structural transformations."""
    t0 = time.time()
    system = load_system(system_path)
    if op == "reweight":
        if multipliers is None or d is None:
            raise errors.SchemaError("reweight needs --multipliers and --d")
        ms = [float(x) for x in multipliers.split(",")]
        result = reweight(system, ms, d)
    elif op == "product":
        if system2 is None:
            raise errors.SchemaError("product needs --system2")
        result = product(system, load_system(system2))
    elif op == "project":
        result = project_from_doubled(system)
    else:
        result, phi = bipartite_cover(system)
    payload = result.to_dict()
    if op == "bipartite-cover":
        payload["phi"] = {result.states[i]: system.states[phi[i]]
                          for i in range(result.n)}
    payload["meta"] = _meta("transform", system_path, t0=t0)
    _emit(payload, out)


def main(argv=None):
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.ClickException as e:
        e.show()
        return 2
    except click.exceptions.Abort:
        return 2
    except errors.ResourceGuard as e:
        click.echo(json.dumps({"error": type(e).__name__, "detail": str(e)}),
                   err=True)
        return 3
    except errors.SpinLabError as e:
        click.echo(json.dumps({"error": type(e).__name__, "detail": str(e)}),
                   err=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
