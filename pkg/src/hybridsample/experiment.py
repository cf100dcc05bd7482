"""Experiment orchestration: configs, replication runs, aggregation.

A config names a network source (synthetic, plain files, or LBSN-style
files), one sampling method, its parameters, and the replication count.
``run_experiment`` builds the network once, computes ground truth, fans the
replications out over worker threads with seeds derived from the master
seed, and aggregates per-label mean estimates and NRMSE.

Jump-strength units: config ``alpha``/``beta`` are per-node (an alpha of 1
gives a node of degree d a jump probability of about 1/(d+1), the scale the
method comparisons are run at).  Internally the samplers work with total
jumper mass, so the harness multiplies by the number of affiliation-covered
target nodes (alpha) or auxiliary nodes (beta).  Set ``alpha_units =
total`` to pass the values straight through.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields

from . import geo, ingest
from .estimators import (
    EstimateReport,
    nrmse,
    vsa_theta_known_n,
    vsa_theta_unknown_n,
    walk_theta,
)
from .graphs import (
    HybridNetwork,
    LabelDistribution,
    degree_labels,
    ground_truth_theta,
    in_degree_labels,
    out_degree_labels,
    undirected_view,
)
from .samplers import (
    AuxDistribution,
    compute_qu,
    fixed_weight_scheme,
    rwt_rwa_run,
    rwt_vsa_run,
    simple_rw_run,
    vs_a_collect,
    write_trace,
)
from .seeds import replication_seeds, spawn_rng
from .synth import SynthConfig, build_synthetic_hybrid, orient_edges

METHODS = ("SRW", "VS-A", "RWT-VSA", "RWT-RWA", "RRZI-VSA")
LABEL_KINDS = ("degree", "in-degree", "out-degree")
SOURCES = ("synthetic", "files", "lbsn")

RESULT_COLUMNS = (
    "method",
    "label",
    "theta_true",
    "mean_estimate",
    "nrmse",
    "runs",
    "budget",
    "alpha",
    "beta",
    "seed",
    "target_samples",
    "query_count",
)


@dataclass
class ExperimentConfig:
    source: str = "synthetic"
    method: str = "SRW"
    # synthetic source
    n_per_graph: int = 10_000
    m1: int = 2
    m2: int = 5
    m3: int = 10
    extra_pairs: int = 20_000
    directed_target: bool = False
    # files source
    target_path: str = ""
    auxiliary_path: str = ""
    affiliation_path: str = ""
    venues_path: str = ""
    # lbsn source
    social_path: str = ""
    checkins_path: str = ""
    bbox: str = ""
    # sampling
    alpha: float = 1.0
    beta: float = 1.0
    alpha_units: str = "per-node"
    budget: str = "2%"
    runs: int = 200
    seed: int = 1
    label: str = "degree"
    rrzi_k: int = 25
    jump_always: bool = False
    workers: int = 1
    # outputs
    out: str = ""
    raw_out: str = ""
    trace_out: str = ""

    def validate(self) -> None:
        if self.source not in SOURCES:
            raise ValueError(f"unknown source {self.source!r}; expected one of {SOURCES}")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.label not in LABEL_KINDS:
            raise ValueError(f"unknown label kind {self.label!r}")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("alpha and beta must be >= 0")
        if self.alpha_units not in ("per-node", "total"):
            raise ValueError("alpha_units must be 'per-node' or 'total'")
        if self.rrzi_k < 1:
            raise ValueError("rrzi_k must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        resolve_budget(self.budget, 10**6)  # syntax check; real n applied later


_BOOL_KEYS = {"directed_target", "jump_always"}
_INT_KEYS = {"n_per_graph", "m1", "m2", "m3", "extra_pairs", "runs", "seed", "rrzi_k", "workers"}
_FLOAT_KEYS = {"alpha", "beta"}


def parse_config_file(path) -> dict:
    """Flat "key = value" config format, one experiment per file."""
    mapping: dict = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
            key, _, value = line.partition("=")
            mapping[key.strip()] = value.strip()
    return mapping


def make_config(mapping: dict, overrides: dict | None = None) -> ExperimentConfig:
    merged = dict(mapping)
    if overrides:
        merged.update({k: v for k, v in overrides.items() if v is not None})
    known = {f.name for f in fields(ExperimentConfig)}
    kwargs = {}
    for key, value in merged.items():
        if key not in known:
            raise ValueError(f"unknown config key {key!r}")
        if isinstance(value, str):
            if key in _BOOL_KEYS:
                lowered = value.lower()
                if lowered not in ("true", "false", "1", "0", "yes", "no"):
                    raise ValueError(f"config key {key!r} expects a boolean, got {value!r}")
                value = lowered in ("true", "1", "yes")
            elif key in _INT_KEYS:
                value = int(value)
            elif key in _FLOAT_KEYS:
                value = float(value)
        kwargs[key] = value
    cfg = ExperimentConfig(**kwargs)
    cfg.validate()
    return cfg


def resolve_budget(budget, n: int) -> int:
    """Budget as absolute count ("2000"), percent ("2%"), or fraction ("0.02")."""
    if isinstance(budget, int):
        value = budget
    else:
        text = str(budget).strip()
        if text.endswith("%"):
            value = round(float(text[:-1]) / 100.0 * n)
        elif "." in text:
            value = round(float(text) * n)
        else:
            value = int(text)
    if value < 1:
        raise ValueError(f"budget {budget!r} resolves to {value}; must be >= 1")
    return value


@dataclass
class PreparedExperiment:
    """Everything shared across replications of one experiment."""

    cfg: ExperimentConfig
    hybrid: HybridNetwork          # walking version (undirected target)
    labeler: object
    truth: LabelDistribution
    budget: int
    alpha_total: float
    beta_total: float
    covered: list
    p_full: AuxDistribution | None = None
    p_covered: AuxDistribution | None = None
    qu: object = None
    weights: object = None
    venue_index: geo.VenueIndex | None = None
    root_region: geo.Region | None = None


def _parse_bbox(text: str) -> geo.Region:
    if text.lower() == "nyc":
        return geo.NYC_REGION
    parts = [float(x) for x in text.split(",")]
    if len(parts) != 4:
        raise ValueError("bbox expects 'lat_min,lat_max,lon_min,lon_max' or 'nyc'")
    return geo.Region(*parts)


def synthetic_venues(n: int, region: geo.Region, seed: int) -> list:
    """Uniform venue coordinates inside a region, one per auxiliary node."""
    rng = spawn_rng(seed, 6)
    span_lat = region.lat_max - region.lat_min
    span_lon = region.lon_max - region.lon_min
    return [
        geo.Venue(
            i,
            region.lat_min + rng.random() * span_lat,
            region.lon_min + rng.random() * span_lon,
        )
        for i in range(n)
    ]


def build_network(cfg: ExperimentConfig):
    """Build or load the hybrid network named by the config.

    Returns (hybrid, venue_index_or_None) with the target graph as stored
    (possibly directed).
    """
    if cfg.source == "synthetic":
        syn = SynthConfig(
            n_per_graph=cfg.n_per_graph,
            m1=cfg.m1,
            m2=cfg.m2,
            m3=cfg.m3,
            extra_pairs=cfg.extra_pairs,
            seed=cfg.seed,
        )
        hybrid = build_synthetic_hybrid(syn)
        if cfg.directed_target:
            hybrid = HybridNetwork(
                orient_edges(hybrid.target, cfg.seed), hybrid.auxiliary, hybrid.affiliation
            )
        index = None
        if cfg.method == "RRZI-VSA":
            index = geo.VenueIndex(
                synthetic_venues(hybrid.auxiliary.n, geo.NYC_REGION, cfg.seed)
            )
        return hybrid, index
    if cfg.source == "files":
        if not (cfg.target_path and cfg.auxiliary_path and cfg.affiliation_path):
            raise ValueError("files source needs target_path, auxiliary_path, affiliation_path")
        target = ingest.load_edge_list(cfg.target_path)
        auxiliary = ingest.load_edge_list(cfg.auxiliary_path)
        affiliation = ingest.load_affiliation(cfg.affiliation_path, target, auxiliary)
        index = None
        if cfg.venues_path:
            venues = geo.load_venues(cfg.venues_path)
            index = geo.VenueIndex(venues)
        return HybridNetwork(target, auxiliary, affiliation), index
    # lbsn
    if not (cfg.social_path and cfg.checkins_path):
        raise ValueError("lbsn source needs social_path and checkins_path")
    social = ingest.load_edge_list(cfg.social_path)
    bbox = _parse_bbox(cfg.bbox) if cfg.bbox else None
    checkins = ingest.load_checkins(cfg.checkins_path, bbox)
    return ingest.build_hybrid_from_lbsn(social, checkins)


def prepare_experiment(cfg: ExperimentConfig) -> PreparedExperiment:
    cfg.validate()
    stored, index = build_network(cfg)
    label_graph = stored.target
    if cfg.label == "degree":
        if label_graph.directed:
            raise ValueError("degree labels need an undirected target; use in/out-degree")
        labeler = degree_labels(label_graph)
    elif cfg.label == "in-degree":
        labeler = in_degree_labels(label_graph)
    else:
        labeler = out_degree_labels(label_graph)
    truth = ground_truth_theta(label_graph, labeler)

    hybrid = stored
    if stored.target.directed:
        hybrid = HybridNetwork(
            undirected_view(stored.target), stored.auxiliary, stored.affiliation
        )

    covered = hybrid.covered_targets()
    budget = resolve_budget(cfg.budget, hybrid.target.n)
    if cfg.alpha_units == "per-node":
        alpha_total = cfg.alpha * max(1, len(covered))
        beta_total = cfg.beta * max(1, hybrid.auxiliary.n)
    else:
        alpha_total = cfg.alpha
        beta_total = cfg.beta
    prep = PreparedExperiment(
        cfg, hybrid, labeler, truth, budget, alpha_total, beta_total, covered
    )

    if cfg.method == "VS-A":
        prep.p_full = AuxDistribution.uniform(hybrid.auxiliary.n)
    elif cfg.method == "RWT-VSA":
        support = [v for v in range(hybrid.auxiliary.n) if hybrid.affiliation.right_adj[v]]
        prep.p_covered = AuxDistribution.uniform_over(hybrid.auxiliary.n, support)
        prep.qu = compute_qu(hybrid, prep.p_covered)
    elif cfg.method == "RWT-RWA":
        prep.weights = fixed_weight_scheme(hybrid, alpha_total, beta_total)
    elif cfg.method == "RRZI-VSA":
        if index is None:
            raise ValueError("RRZI-VSA needs venue coordinates (venues_path or lbsn source)")
        if len(index) == 0:
            raise ValueError("venue index is empty")
        prep.venue_index = index
        prep.root_region = index.bounding_region()
    return prep


def _pick_where(rng, n: int, ok) -> int:
    for _ in range(20 * n + 20):
        x = rng.randrange(n)
        if ok(x):
            return x
    raise RuntimeError("could not find a usable start node")


def _walk_trace(prep: PreparedExperiment, rep_seed: int):
    """Run one walk replication; start nodes come from a per-replication RNG
    stream separate from the chain streams."""
    cfg = prep.cfg
    hybrid = prep.hybrid
    rng = spawn_rng(rep_seed, 98)
    if cfg.method == "SRW":
        start = _pick_where(rng, hybrid.target.n, lambda u: hybrid.target.adj[u])
        return simple_rw_run(hybrid.target, prep.budget, start, rep_seed)
    if cfg.method == "RWT-VSA":
        qu = prep.qu
        start = _pick_where(
            rng, hybrid.target.n, lambda u: hybrid.target.adj[u] or qu[u] > 0
        )
        return rwt_vsa_run(
            hybrid, prep.p_covered, prep.alpha_total, prep.budget, start, rep_seed,
            jump_always=cfg.jump_always, qu=qu,
        )
    ws = prep.weights
    x = _pick_where(rng, hybrid.target.n, lambda u: hybrid.target.adj[u] or ws.omega[u] > 0)
    xp = prep.covered[rng.randrange(len(prep.covered))]
    aux = hybrid.auxiliary
    y = _pick_where(rng, aux.n, lambda v: aux.adj[v] or ws.w[v] > 0)
    return rwt_rwa_run(
        hybrid, prep.alpha_total, prep.beta_total, None, prep.budget,
        (x, xp, y), rep_seed, weights=ws,
    )


def run_replication(prep: PreparedExperiment, rep_seed: int) -> EstimateReport:
    cfg = prep.cfg
    if cfg.method == "VS-A":
        sample = vs_a_collect(prep.hybrid, prep.p_full, prep.budget, rep_seed)
        report = vsa_theta_unknown_n(sample, prep.labeler, seed=rep_seed)
        # carry the known-size normalization alongside the ratio form
        known = vsa_theta_known_n(sample, prep.labeler, prep.hybrid.target.n, seed=rep_seed)
        report.theta_known_n = known.theta
        return report
    if cfg.method == "RRZI-VSA":
        return geo.rrzi_vsa_estimate(
            prep.hybrid, prep.venue_index, prep.root_region, cfg.rrzi_k,
            prep.budget, prep.labeler, rep_seed,
        )
    trace = _walk_trace(prep, rep_seed)
    return walk_theta(trace, prep.labeler, method=cfg.method, seed=rep_seed)


def _label_key(label):
    """Numeric labels sort numerically, anything else lexically after them."""
    if isinstance(label, (int, float)):
        return (0, label, "")
    return (1, 0, str(label))


@dataclass
class ResultRow:
    method: str
    label: object
    theta_true: float
    mean_estimate: float
    nrmse: float
    runs: int
    budget: int
    alpha: float
    beta: float
    seed: int
    target_samples: float
    query_count: float


@dataclass
class ResultTable:
    rows: list = field(default_factory=list)

    def label_axis(self) -> list:
        return sorted({row.label for row in self.rows}, key=_label_key)

    def by_label(self) -> dict:
        return {row.label: row for row in self.rows}


def run_experiment(cfg: ExperimentConfig, prep: PreparedExperiment | None = None) -> ResultTable:
    """Run all replications of a configured experiment and aggregate.

    Any replication failure aborts the experiment with a diagnostic naming
    the failing replication seed.
    """
    if prep is None:
        prep = prepare_experiment(cfg)
    seeds = replication_seeds(cfg.seed, cfg.runs)

    def one(args):
        idx, rep_seed = args
        try:
            return run_replication(prep, rep_seed)
        except Exception as exc:
            raise RuntimeError(f"replication {idx} (seed {rep_seed}) failed: {exc}") from exc

    tasks = list(enumerate(seeds))
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            reports = list(pool.map(one, tasks))
    else:
        reports = [one(t) for t in tasks]

    if cfg.trace_out and reports and cfg.method in ("SRW", "RWT-VSA", "RWT-RWA"):
        # re-run replication 0 to export its trace (runs are pure and cheap)
        write_trace(_walk_trace(prep, seeds[0]), cfg.trace_out)
    if cfg.raw_out:
        with open(cfg.raw_out, "w", encoding="utf-8") as fh:
            fh.write("method,label,theta_hat,theta_true,budget,seed\n")
            for rep in reports:
                for row in rep.csv_rows(prep.truth):
                    fh.write(row + "\n")

    rows = []
    for label in prep.truth.labels():
        t_true = prep.truth[label]
        if t_true <= 0.0:
            continue
        estimates = [rep.theta.get(label, 0.0) for rep in reports]
        rows.append(
            ResultRow(
                method=cfg.method,
                label=label,
                theta_true=t_true,
                mean_estimate=math.fsum(estimates) / len(estimates),
                nrmse=nrmse(estimates, t_true),
                runs=cfg.runs,
                budget=prep.budget,
                alpha=cfg.alpha,
                beta=cfg.beta,
                seed=cfg.seed,
                target_samples=math.fsum(
                    rep.target_samples or 0 for rep in reports
                ) / len(reports),
                query_count=math.fsum(
                    rep.query_count or 0 for rep in reports
                ) / len(reports),
            )
        )
    rows.sort(key=lambda r: (r.method, _label_key(r.label)))
    return ResultTable(rows)


def write_result_csv(table: ResultTable, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_result_csv(table))


def format_result_csv(table: ResultTable) -> str:
    lines = [",".join(RESULT_COLUMNS)]
    for r in table.rows:
        lines.append(
            f"{r.method},{r.label},{r.theta_true!r},{r.mean_estimate!r},{r.nrmse!r},"
            f"{r.runs},{r.budget},{r.alpha!r},{r.beta!r},{r.seed},"
            f"{r.target_samples!r},{r.query_count!r}"
        )
    return "\n".join(lines) + "\n"


def read_result_csv(path) -> ResultTable:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != ",".join(RESULT_COLUMNS):
            raise ValueError(f"{path}: unexpected result header {header!r}")
        rows = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != len(RESULT_COLUMNS):
                raise ValueError(f"{path}: malformed result row {line!r}")
            rows.append(
                ResultRow(
                    method=parts[0],
                    label=_parse_label(parts[1]),
                    theta_true=float(parts[2]),
                    mean_estimate=float(parts[3]),
                    nrmse=float(parts[4]),
                    runs=int(parts[5]),
                    budget=int(parts[6]),
                    alpha=float(parts[7]),
                    beta=float(parts[8]),
                    seed=int(parts[9]),
                    target_samples=float(parts[10]),
                    query_count=float(parts[11]),
                )
            )
    return ResultTable(rows)


def _parse_label(text: str):
    try:
        return int(text)
    except ValueError:
        return text


FIGURE_KINDS = {
    "fig2-convergence": ("budget", "mean_estimate"),
    "fig3-nrmse": ("alpha", "nrmse"),
    "fig7-style": ("alpha", "nrmse"),
}


def emit_figure_data(kind: str, tables, out_path) -> None:
    """Project result tables into a tidy plot-ready CSV.

    Columns are method,param,label,value; the param column carries the
    swept quantity (budget for convergence plots, alpha otherwise).
    """
    if kind not in FIGURE_KINDS:
        raise ValueError(f"unknown figure kind {kind!r}; expected one of {sorted(FIGURE_KINDS)}")
    tables = list(tables)
    if not tables:
        raise ValueError("empty sweep: no result tables given")
    param_field, value_field = FIGURE_KINDS[kind]
    axis = tables[0].label_axis()
    for t in tables[1:]:
        if t.label_axis() != axis:
            raise ValueError("mismatched label axes across result tables")
    out_rows = []
    for t in tables:
        for r in t.rows:
            out_rows.append(
                (r.method, getattr(r, param_field), r.label, getattr(r, value_field))
            )
    out_rows.sort(key=lambda row: (row[0], str(row[1]), _label_key(row[2])))
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write("method,param,label,value\n")
        for method, param, label, value in out_rows:
            fh.write(f"{method},{param},{label},{value!r}\n")
