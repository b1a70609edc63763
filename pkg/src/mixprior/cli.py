"""Batch command-line front end.

One subcommand per analysis type, each driven by a single
self-describing config file:

    mixprior update         --config examples/baeten.cfg
    mixprior gibbs          --config examples/table1.cfg [--dump-chain ch.csv]
    mixprior shrinkage      --config examples/shrinkage_uniform.cfg
    mixprior marginal-check --config examples/marginal_check.cfg

Results go to stdout as aligned tables (3 decimals, or 12 significant
digits with --full-precision); --out adds a machine-readable CSV
document; all diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .config import (
    AnalysisConfig,
    ConfigError,
    GibbsCommand,
    MarginalCheckCommand,
    ShrinkageCommand,
    UpdateCommand,
    parse_config,
    render_config,
)
from .conjugate import dirichlet_marginal_mixture, posterior_update
from .distributions import DistributionSummary, Mixture
from .gibbs import (
    ChainOutput,
    DirichletWeights,
    FixedWeights,
    GibbsConfig,
    LatentModelSpec,
    gibbs_run,
    mcse,
    write_chain_csv,
)
from .report import ResultDocument, Table, format_text, write_csv
from .shrinkage import (
    ShrinkageSpec,
    latent_moments,
    latent_sum_pmf,
    marginal_extension_check,
    model_probabilities,
    pattern_bits,
    simulate_shrinkage,
    theta_moments,
)

SUMMARY_COLUMNS = ("quantity", "mean", "sd", "2.5%", "median", "97.5%")


def _summary_row(label: str, s: DistributionSummary) -> tuple:
    return (label, s.mean, s.sd, s.q2_5, s.median, s.q97_5)


def _run_update(p: UpdateCommand) -> tuple[Table, ...]:
    if isinstance(p.weight_prior, DirichletWeights):
        prior = dirichlet_marginal_mixture(p.components, p.weight_prior.concentration)
    else:
        prior = Mixture(p.components, p.weight_prior.weights)
    res = posterior_update(prior, p.data)
    mixture_rows = tuple(
        (i + 1, prior.weights[i], res.marginal_likelihoods[i],
         res.posterior_weights[i], c.alpha, c.beta)
        for i, c in enumerate(res.posterior.components)
    )
    tables = (
        Table(
            "posterior_mixture",
            ("component", "prior_weight", "marginal_likelihood",
             "posterior_weight", "alpha", "beta"),
            mixture_rows,
        ),
        Table(
            "posterior_summary",
            SUMMARY_COLUMNS,
            (_summary_row("theta", res.posterior.summary()),),
        ),
    )
    return tables


def _describe_weight_prior(prior) -> str:
    if isinstance(prior, FixedWeights):
        return "fixed [" + ", ".join(f"{w:g}" for w in prior.weights) + "]"
    return "dirichlet [" + ", ".join(f"{a:g}" for a in prior.concentration) + "]"


def _run_gibbs(p: GibbsCommand, seed: int) -> tuple[tuple[Table, ...], dict[str, ChainOutput]]:
    words = np.random.SeedSequence(seed).generate_state(len(p.analyses), np.uint64)
    chains: dict[str, ChainOutput] = {}
    for analysis, word in zip(p.analyses, words):
        spec = LatentModelSpec(p.components, analysis.weight_prior, p.data)
        cfg = GibbsConfig(p.burn_in, p.iterations, p.thin, int(word))
        chains[analysis.label] = gibbs_run(spec, cfg)

    analysis_rows = tuple(
        (i + 1, a.label, _describe_weight_prior(a.weight_prior))
        for i, a in enumerate(p.analyses)
    )
    summary_rows = []
    for i, a in enumerate(p.analyses):
        summary_rows.append(_summary_row(f"p[{i + 1}]", chains[a.label].summaries["theta"]))
    for i, a in enumerate(p.analyses):
        summary_rows.append(_summary_row(f"Z[{i + 1}]", chains[a.label].summaries["z"]))
    tables = [
        Table("analyses", ("index", "label", "weight_prior"), analysis_rows),
        Table("posterior_summary", SUMMARY_COLUMNS, tuple(summary_rows)),
    ]
    weight_rows = []
    for i, a in enumerate(p.analyses):
        chain = chains[a.label]
        if chain.pi is not None:
            for j in range(chain.pi.shape[1]):
                weight_rows.append(
                    _summary_row(f"pi_{j + 1}[{i + 1}]", chain.summaries[f"pi{j + 1}"])
                )
    if weight_rows:
        tables.append(Table("weight_posterior", SUMMARY_COLUMNS, tuple(weight_rows)))
    if all(chain.n_draws >= 1000 for chain in chains.values()):
        mcse_rows = []
        for i, a in enumerate(p.analyses):
            mcse_rows.append((f"p[{i + 1}]", mcse(chains[a.label], "theta")))
            mcse_rows.append((f"Z[{i + 1}]", mcse(chains[a.label], "z")))
        tables.append(Table("mcse", ("quantity", "mcse"), tuple(mcse_rows)))
    return tuple(tables), chains


def _moment_rows(obj) -> tuple[tuple, ...]:
    rows = []
    for field in dataclasses.fields(obj):
        value = getattr(obj, field.name)
        if value is not None:
            rows.append((field.name, value))
    return tuple(rows)


def _run_shrinkage(p: ShrinkageCommand, seed: int) -> tuple[Table, ...]:
    spec = ShrinkageSpec(p.parameters, p.weight_model, p.components)
    lm = latent_moments(spec)
    tables = [Table("latent_moments", ("statistic", "value"), _moment_rows(lm))]
    tm = None
    if spec.components is not None:
        tm = theta_moments(spec)
        tables.append(Table("theta_moments", ("statistic", "value"), _moment_rows(tm)))
    sum_dist = latent_sum_pmf(spec)
    tables.append(
        Table(
            "sum_distribution",
            ("family", "count", "probability"),
            tuple((sum_dist.family, s, prob) for s, prob in enumerate(sum_dist.probs)),
        )
    )
    if p.patterns:
        probs = model_probabilities(spec)
        tables.append(
            Table(
                "model_probabilities",
                ("bitmask", "probability"),
                tuple((pattern_bits(i, spec.m), float(v)) for i, v in enumerate(probs)),
            )
        )
    if p.draws is not None:
        sim = simulate_shrinkage(spec, p.draws, seed)
        rows = []
        analytic = {name: value for name, value in _moment_rows(lm)}
        if tm is not None:
            analytic.update({name: value for name, value in _moment_rows(tm)})
        estimates = dict(sim.latent)
        if sim.theta is not None:
            estimates.update(sim.theta)
        for name, est in estimates.items():
            if name in analytic:
                rows.append((name, analytic[name], est.value, est.se))
        for s, prob in enumerate(sum_dist.probs):
            emp = sim.sum_pmf[s]
            se = (emp * (1.0 - emp) / sim.n_draws) ** 0.5
            rows.append((f"sum_pmf[{s}]", prob, emp, se))
        tables.append(
            Table("simulation_check", ("statistic", "analytic", "simulated", "se"),
                  tuple(rows))
        )
    return tuple(tables)


def _run_marginal_check(p: MarginalCheckCommand, seed: int) -> tuple[Table, ...]:
    res = marginal_extension_check(p.mu, p.shape, p.scale, p.draws, seed)
    rows = (
        ("ks_distance", res.ks_distance),
        ("df", res.df),
        ("location", res.location),
        ("scale", res.scale),
        ("draws", res.n_draws),
    )
    return (Table("marginal_check", ("statistic", "value"), rows),)


def execute(cfg: AnalysisConfig) -> tuple[ResultDocument, dict[str, ChainOutput] | None]:
    """Dispatch a validated config; returns the document and any chains."""
    chains = None
    if isinstance(cfg.payload, UpdateCommand):
        tables = _run_update(cfg.payload)
    elif isinstance(cfg.payload, GibbsCommand):
        tables, chains = _run_gibbs(cfg.payload, cfg.seed)
    elif isinstance(cfg.payload, ShrinkageCommand):
        tables = _run_shrinkage(cfg.payload, cfg.seed)
    elif isinstance(cfg.payload, MarginalCheckCommand):
        tables = _run_marginal_check(cfg.payload, cfg.seed)
    else:
        raise TypeError(f"cannot execute payload {cfg.payload!r}")
    doc = ResultDocument(
        command=cfg.command,
        config_text=render_config(cfg),
        tables=tables,
        seed=cfg.seed,
        engine_version=__version__,
        created=datetime.now(timezone.utc).isoformat(timespec="seconds"),
    )
    return doc, chains


def run(cfg: AnalysisConfig) -> ResultDocument:
    """Run an analysis and return its result document."""
    return execute(cfg)[0]


def _chain_dump_path(base: str, label: str, multiple: bool) -> Path:
    path = Path(base)
    if not multiple:
        return path
    return path.with_name(f"{path.stem}-{label}{path.suffix or '.csv'}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mixprior",
        description="Mixture-prior inference: conjugate updating, Gibbs sampling "
                    "and shrinkage-prior analysis.",
    )
    parser.add_argument("--version", action="version", version=f"mixprior {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name, help_text in (
        ("update", "exact conjugate update of a beta mixture prior"),
        ("gibbs", "latent-variable Gibbs sampling, fixed or Dirichlet weights"),
        ("shrinkage", "moments and pattern probabilities for shared mixture weights"),
        ("marginal-check", "KS check of the normal/inverse-gamma marginal"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="path to the YAML config")
        cmd.add_argument("--seed", type=int, default=None,
                         help="override the config seed")
        cmd.add_argument("--out", default=None,
                         help="also write a machine-readable CSV document here")
        cmd.add_argument("--full-precision", action="store_true",
                         help="print 12 significant digits instead of 3 decimals")
        if name == "gibbs":
            cmd.add_argument("--dump-chain", default=None,
                             help="write retained draws per analysis to CSV")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as e:
        print(f"error: cannot read config: {e}", file=sys.stderr)
        return 1
    try:
        cfg = parse_config(text)
        if cfg.command != args.subcommand:
            raise ConfigError(
                [f"command: config declares {cfg.command!r} but the "
                 f"{args.subcommand!r} subcommand was invoked"]
            )
    except ConfigError as e:
        for item in e.errors:
            print(f"error: {item}", file=sys.stderr)
        return 2
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    if args.out is not None:
        cfg = dataclasses.replace(cfg, output_path=args.out)
    try:
        doc, chains = execute(cfg)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    sys.stdout.write(format_text(doc, args.full_precision))
    if cfg.output_path is not None:
        write_csv(doc, cfg.output_path)
    dump = getattr(args, "dump_chain", None)
    if dump is not None and chains is not None:
        multiple = len(chains) > 1
        for label, chain in chains.items():
            write_chain_csv(chain, _chain_dump_path(dump, label, multiple))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
