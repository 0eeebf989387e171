"""Stage definitions, the full pipeline and exports over a workspace."""
from __future__ import annotations

import csv
import io
import logging
import shutil
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from . import affinity as aff
from . import collab as col
from . import roles as rl
from . import topics as tp
from .community import detect_communities, double_cluster
from .community.partition import Partition
from .config import Config
from .corpus import (
    AuthorEntry,
    AuthorTable,
    Corpus,
    apply_disambiguation,
    apply_subject_filter,
    build_author_table,
    dump_canonical,
    last_name_commonality,
    load_canonical,
    load_disambiguation_map,
    normalize_corpus,
    parse_wos_flatfile,
)
from .delineation import precision_from_areas, recall_report
from .graph import (
    build_citation_graph,
    build_coauthor_graph,
    component_stats,
    components,
    node_key,
    write_dot,
    write_edgelist_csv,
    write_graphml,
)
from .report import SummaryReport
from .workspace import StageContext, StageError, Workspace, network_from_json

log = logging.getLogger(__name__)

__all__ = ["STAGES", "PIPELINE", "run_stage", "run_pipeline", "export", "EXPORTS", "summary_counts"]

CONFIG_FILE = "config.ini"


@dataclass(frozen=True)
class Stage:
    name: str
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    func: Callable[[StageContext, Config], None]
    params: Callable[[Config], dict]
    external: Callable[[Config], dict] = lambda cfg: {}
    optional_inputs: tuple[str, ...] = ()


# ---------------------------------------------------------------------------
# artifact readers


def _corpus(ctx: StageContext) -> Corpus:
    return load_canonical(ctx.read_text("corpus.jsonl"))


def _authors_csv(table: AuthorTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["author_id", "last_name", "publication_count", "record_ids"])
    for a, e in table.entries.items():
        w.writerow([a, e.last_name, e.publication_count, ";".join(sorted(e.record_ids))])
    return buf.getvalue()


def _author_table(ctx: StageContext) -> AuthorTable:
    meta = ctx.read_json("authors_summary.json")
    entries = {}
    for row in list(csv.reader(io.StringIO(ctx.read_text("authors.csv"))))[1:]:
        entries[row[0]] = AuthorEntry(int(row[2]), frozenset(row[3].split(";")), row[1])
    return AuthorTable(entries, meta["min_pubs"], meta["total_authors"], meta["removed"], meta["one_time_authors"])


def _roles(ctx: StageContext) -> dict:
    out = {}
    for row in list(csv.reader(io.StringIO(ctx.read_text("roles.csv"))))[1:]:
        out[row[0]] = rl.NodeRoleProfile(float(row[1]), float(row[2]), row[3])
    return out


def _areas(ctx: StageContext) -> list[tp.TopicArea]:
    return tp.areas_from_csv(ctx.read_text("areas.csv"))


def _giant(net) -> list:
    comps = components(net)
    return comps[0] if comps else []


# ---------------------------------------------------------------------------
# stages


def _ingest(ctx: StageContext, cfg: Config) -> None:
    paths = [p.strip() for p in cfg.get("ingest", "input").split(",") if p.strip()]
    errors: list = []
    records = []
    for p in paths:
        with open(p, "rb") as fh:
            records.extend(parse_wos_flatfile(fh.read(), errors))
    ymin, ymax = cfg.getint("ingest", "year_min"), cfg.getint("ingest", "year_max")
    yr = None
    if ymin is not None or ymax is not None:
        yr = (ymin if ymin is not None else -10**9, ymax if ymax is not None else 10**9)
    corpus = normalize_corpus(records, yr)
    cats = [c.strip() for c in cfg.get("ingest", "subject_categories").split(";") if c.strip()]
    if cats:
        corpus = apply_subject_filter(corpus, cats)
    dis = cfg.get("ingest", "disambiguation").strip()
    if dis:
        with open(dis, encoding="utf-8") as fh:
            corpus = apply_disambiguation(corpus, load_disambiguation_map(fh))
    if not len(corpus):
        raise ValueError("no usable records after ingest")
    ctx.write("corpus.jsonl", dump_canonical(corpus))
    lines = [f"parse error at line {ln}: {msg}" for ln, msg in errors] + list(corpus.warnings)
    ctx.write("ingest_log.txt", "".join(line + "\n" for line in lines))


def _ingest_external(cfg: Config) -> dict:
    paths = [p.strip() for p in cfg.get("ingest", "input").split(",") if p.strip()]
    if not paths:
        raise StageError("ingest", "no input file configured (use --input)")
    ext = {f"input{i}": p for i, p in enumerate(paths)}
    dis = cfg.get("ingest", "disambiguation").strip()
    if dis:
        ext["disambiguation"] = dis
    return ext


def _authors(ctx: StageContext, cfg: Config) -> None:
    table = build_author_table(_corpus(ctx), cfg.getint("authors", "min_pubs") or 1)
    ctx.write("authors.csv", _authors_csv(table))
    ctx.write_json("authors_summary.json", {
        "min_pubs": table.min_pubs, "total_authors": table.total_authors,
        "removed": table.removed, "one_time_authors": table.one_time_authors, "kept": len(table),
    })


def _graph(ctx: StageContext, cfg: Config) -> None:
    corpus = _corpus(ctx)
    co = build_coauthor_graph(corpus, _author_table(ctx), cfg.getint("graph", "max_authors"))
    cit = build_citation_graph(corpus)
    ctx.write_network("coauthor.json", co)
    ctx.write_network("citation.json", cit)
    stats = {}
    for name, net in (("coauthor", co), ("citation", cit)):
        if net.nodes:
            s = component_stats(net)
            stats[name] = {"nodes": s.node_count, "giant": s.giant_size, "components": s.component_count}
        else:
            stats[name] = {"nodes": 0, "giant": 0, "components": 0}
    ctx.write_json("components.json", stats)


def _cluster(ctx: StageContext, cfg: Config) -> None:
    seed, trials = cfg.getint("run", "seed"), cfg.getint("run", "trials")
    kw = {"teleport": cfg.getfloat("cluster", "teleport"), "workers": cfg.getint("run", "workers")}
    co = ctx.read_network("coauthor.json")
    if not co.edges:
        raise ValueError("co-author network has no edges")
    part, rep = detect_communities(co, seed, trials, **kw)
    ctx.write("coauthor_partition.csv", part.to_csv())
    ctx.write("coauthor_codelength.txt", rep.as_text())
    cit = ctx.read_network("citation.json")
    if not cit.edges:
        raise ValueError("citation network has no edges")
    dc = double_cluster(cit, seed, trials, **kw)
    ctx.write("doc_level1.csv", dc.level1.to_csv())
    ctx.write("doc_level2.csv", dc.level2.to_csv())
    ctx.write("docmap.csv", Partition(dc.docmap).to_csv())
    ctx.write("citation_codelength.txt", dc.level1_report.as_text())


def _roles_stage(ctx: StageContext, cfg: Config) -> None:
    net = ctx.read_network("coauthor.json")
    part = ctx.read_partition("coauthor_partition.csv")
    profiles = rl.profile_roles(net, part)
    ctx.write("roles.csv", rl.roles_to_csv(profiles))
    giant = _giant(net)
    common = last_name_commonality(_author_table(ctx))
    names = {n: net.node_attrs[n]["last_name"] for n in giant}
    rep = rl.distortion_report(
        {n: profiles[n] for n in giant}, {n: common[names[n]] for n in giant},
        min_members=cfg.getint("roles", "min_members"), alpha=cfg.getfloat("roles", "alpha"),
    )
    ctx.write("distortion.txt", rep.summary())
    ctx.write("distortion_cdf.csv", rep.cdf_csv())


def _topics(ctx: StageContext, cfg: Config) -> None:
    docmap = ctx.read_partition("docmap.csv")
    cit = ctx.read_network("citation.json")
    corpus = _corpus(ctx)
    areas, coverage = tp.extract_topic_areas(docmap.assignment, len(cit.nodes), cfg.getfloat("topics", "min_frac"))
    ctx.write("areas.csv", tp.areas_to_csv(areas))
    top_n = cfg.getint("topics", "top_n")
    stop = tp.load_stopwords()
    ctx.write("area_metadata.txt", "".join(tp.area_label_metadata(a, corpus, top_n, stop).as_text() for a in areas))
    ctx.write_network("inter_area.json", tp.inter_area_citation_network(areas, corpus))
    ctx.write_json("topics_summary.json", {"areas": len(areas), "coverage": coverage, "documents": len(cit.nodes)})


def _rir(ctx: StageContext, cfg: Config) -> None:
    corpus = _corpus(ctx)
    series = [tp.rir_series(a, corpus, cfg.getint("rir", "start"), cfg.getint("rir", "end"), cfg.getint("rir", "window"))
              for a in _areas(ctx)]
    ctx.write("rir.csv", tp.rir_csv(series))


def _affinity(ctx: StageContext, cfg: Config) -> None:
    mode = cfg.get("affinity", "mode")
    areas = _areas(ctx)
    if len(areas) < 2:
        raise ValueError("affinity needs at least two topic areas")
    m = aff.association_matrix(areas, _corpus(ctx), mode)
    ctx.write("residuals.csv", aff.residual_table_csv(m))
    ctx.write("heatmap.csv", aff.heatmap_csv(m))
    ctx.write_network("affinity.json", m.affinity_network())
    lines = [f"a{a}: chi2={t.statistic:.4f} df={t.df} p={t.p_value:.4g}{' flagged' if f else ''}"
             for a, t, f in zip(m.areas, m.chi_square, m.row_flags)]
    ctx.write("chi_square.txt", f"# goodness of fit per source area ({mode})\n" + "\n".join(lines) + "\n")


def _collab(ctx: StageContext, cfg: Config) -> None:
    net = ctx.read_network("coauthor.json")
    part = ctx.read_partition("coauthor_partition.csv")
    roles = _roles(ctx)
    giant = _giant(net)
    gnet, gpart = net.subgraph(giant), part.restrict(giant)
    cnet = col.build_group_collab_network(gnet, gpart, roles)
    ctx.write_network("collab.json", cnet)
    links = col.intercluster_links(gnet, gpart, roles)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["cluster_a", "cluster_b", "kind", "joint_pubs", "distinct_pairs", "hub_hub"])
    for (a, b), link in links.items():
        w.writerow([a, b, link.kind, link.joint_pubs, link.distinct_pairs, int(link.hub_hub)])
    ctx.write("links.csv", buf.getvalue())

    corpus, table = _corpus(ctx), _author_table(ctx)
    clusters = gpart.clusters()
    geo = {c: col.geographic_affiliation(m, corpus, table=table) for c, m in clusters.items()}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["cluster", "size", "geo"])
    for c in sorted(clusters, key=node_key):
        w.writerow([c, len(clusters[c]), geo[c]])
    ctx.write("geo.csv", buf.getvalue())
    ctx.write("propensity.csv", col.geographic_propensity(cnet, geo).to_csv())

    areas = _areas(ctx) if ctx.exists("areas.csv") else []
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["cluster", "used_hubs", "publications"] + [f"area_{a.area_id}" for a in areas])
    for c in sorted(clusters, key=node_key):
        act = col.topical_activity(clusters[c], areas, table, roles)
        w.writerow([c, int(act.used_hubs), act.publications] + [repr(act.activity[a.area_id]) for a in areas])
    ctx.write("activity.csv", buf.getvalue())

    linked, total, _ = col.linked_cluster_proportion(cnet)
    sizes = sorted(len(m) for m in clusters.values())
    ctx.write_json("collab_summary.json", {
        "giant_nodes": len(giant), "giant_clusters": total, "linked_clusters": linked,
        "giant_cluster_sizes": sizes, "clusters": part.num_clusters,
    })


def _overlay(ctx: StageContext, cfg: Config) -> None:
    cnet = ctx.read_network("collab.json")
    rows = list(csv.reader(io.StringIO(ctx.read_text("geo.csv"))))[1:]
    geo = {int(r[0]): r[2] for r in rows}
    act_rows = list(csv.reader(io.StringIO(ctx.read_text("activity.csv"))))
    head = act_rows[0]
    activity = {}
    for r in act_rows[1:]:
        vals = {int(h.split("_", 1)[1]): float(v) for h, v in zip(head[3:], r[3:])}
        activity[int(r[0])] = col.TopicalActivity(vals, bool(int(r[1])), int(r[2]))
    ctx.write_network("overlay.json", col.overlay_network(cnet, geo, activity))


def _precision(ctx: StageContext, cfg: Config) -> None:
    rep = precision_from_areas(_areas(ctx), _corpus(ctx), cfg.getint("delineation", "top_k"))
    ctx.write("precision.txt", rep.as_text())
    ctx.write("precision_heatmap.csv", rep.heatmap_csv())
    ctx.write("precision_residuals.csv", rep.residual_csv())


def _recall(ctx: StageContext, cfg: Config) -> None:
    path = cfg.get("delineation", "researchers").strip()
    with open(path, "rb") as fh:
        pubs = parse_wos_flatfile(fh.read())
    rep = recall_report(pubs, _corpus(ctx), cfg.getint("run", "seed"), cfg.getint("run", "trials"),
                        researcher_id=Path(path).stem)
    ctx.write("recall.csv", rep.to_csv())
    ctx.write("recall.txt", rep.as_text())


def summary_counts(ctx: StageContext) -> dict:
    counts: dict = {}
    if ctx.exists("corpus.jsonl"):
        counts["publications"] = len(_corpus(ctx))
    if ctx.exists("authors_summary.json"):
        s = ctx.read_json("authors_summary.json")
        counts.update(authors=s["total_authors"], one_time_authors=s["one_time_authors"])
    if ctx.exists("components.json"):
        s = ctx.read_json("components.json")
        counts.update(documents=s["citation"]["nodes"], authors_filtered=s["coauthor"]["nodes"],
                      giant_nodes=s["coauthor"]["giant"])
    if ctx.exists("doc_level1.csv"):
        counts["document_clusters"] = ctx.read_partition("doc_level1.csv").num_clusters
        counts["topic_clusters"] = ctx.read_partition("doc_level2.csv", int).num_clusters
    if ctx.exists("coauthor_partition.csv"):
        counts["clusters"] = ctx.read_partition("coauthor_partition.csv").num_clusters
    if ctx.exists("collab_summary.json"):
        s = ctx.read_json("collab_summary.json")
        counts.update(giant_clusters=s["giant_clusters"], linked_clusters=s["linked_clusters"],
                      giant_cluster_sizes=s["giant_cluster_sizes"])
    return counts


def _report(ctx: StageContext, cfg: Config) -> None:
    counts = summary_counts(ctx)
    ctx.write_json("summary_counts.json", counts)
    ctx.write("summary.txt", SummaryReport.from_counts(counts).as_text())


def _seeded(cfg: Config) -> dict:
    return {"seed": cfg.getint("run", "seed"), "trials": cfg.getint("run", "trials")}


STAGES: dict[str, Stage] = {s.name: s for s in (
    Stage("ingest", (), ("corpus.jsonl", "ingest_log.txt"), _ingest,
          lambda c: {k: c.get("ingest", k) for k in ("year_min", "year_max", "subject_categories")},
          _ingest_external),
    Stage("authors", ("corpus.jsonl",), ("authors.csv", "authors_summary.json"), _authors,
          lambda c: {"min_pubs": c.getint("authors", "min_pubs")}),
    Stage("graph", ("corpus.jsonl", "authors.csv", "authors_summary.json"),
          ("coauthor.json", "citation.json", "components.json"), _graph,
          lambda c: {"max_authors": c.getint("graph", "max_authors")}),
    Stage("cluster", ("coauthor.json", "citation.json"),
          ("coauthor_partition.csv", "coauthor_codelength.txt", "doc_level1.csv", "doc_level2.csv",
           "docmap.csv", "citation_codelength.txt"), _cluster,
          lambda c: {**_seeded(c), "teleport": c.getfloat("cluster", "teleport")}),
    Stage("roles", ("coauthor.json", "coauthor_partition.csv", "authors.csv", "authors_summary.json"),
          ("roles.csv", "distortion.txt", "distortion_cdf.csv"), _roles_stage,
          lambda c: {"min_members": c.getint("roles", "min_members"), "alpha": c.getfloat("roles", "alpha")}),
    Stage("topics", ("docmap.csv", "citation.json", "corpus.jsonl"),
          ("areas.csv", "area_metadata.txt", "inter_area.json", "topics_summary.json"), _topics,
          lambda c: {"min_frac": c.getfloat("topics", "min_frac"), "top_n": c.getint("topics", "top_n")}),
    Stage("rir", ("areas.csv", "corpus.jsonl"), ("rir.csv",), _rir,
          lambda c: {k: c.getint("rir", k) for k in ("window", "start", "end")}),
    Stage("affinity", ("areas.csv", "corpus.jsonl"),
          ("residuals.csv", "heatmap.csv", "affinity.json", "chi_square.txt"), _affinity,
          lambda c: {"mode": c.get("affinity", "mode")}),
    Stage("collab", ("coauthor.json", "coauthor_partition.csv", "roles.csv", "corpus.jsonl",
                     "authors.csv", "authors_summary.json"),
          ("collab.json", "links.csv", "geo.csv", "propensity.csv", "activity.csv", "collab_summary.json"),
          _collab, lambda c: {}, optional_inputs=("areas.csv",)),
    Stage("overlay", ("collab.json", "geo.csv", "activity.csv"), ("overlay.json",), _overlay, lambda c: {}),
    Stage("delineate-precision", ("areas.csv", "corpus.jsonl"),
          ("precision.txt", "precision_heatmap.csv", "precision_residuals.csv"), _precision,
          lambda c: {"top_k": c.getint("delineation", "top_k")}),
    Stage("delineate-recall", ("corpus.jsonl",), ("recall.csv", "recall.txt"), _recall, _seeded,
          lambda c: {"researchers": c.get("delineation", "researchers").strip()
                     or _raise("delineate-recall", "no researcher publication file (use --researchers)")}),
    Stage("report", (), ("summary.txt", "summary_counts.json"), _report, lambda c: {},
          optional_inputs=("corpus.jsonl", "authors_summary.json", "components.json", "doc_level1.csv",
                           "doc_level2.csv", "coauthor_partition.csv", "collab_summary.json")),
)}

PIPELINE = ("ingest", "authors", "graph", "cluster", "roles", "topics", "rir", "affinity", "collab",
            "overlay", "report")

PRODUCERS = {out: s.name for s in STAGES.values() for out in s.outputs}


def _raise(stage: str, msg: str):
    raise StageError(stage, msg)


def _save_config(ws: Workspace, cfg: Config) -> None:
    buf = io.StringIO()
    cfg.parser.write(buf)
    ws.path(CONFIG_FILE).write_text(buf.getvalue(), "utf-8")


def run_stage(ws: Workspace, name: str, cfg: Config) -> bool:
    if name not in STAGES:
        raise StageError(name, f"unknown stage; valid: {', '.join(STAGES)}")
    st = STAGES[name]
    external = st.external(cfg)
    log.info("stage %s (seed=%s)", name, cfg.get("run", "seed"))
    ran = ws.run_stage(name, lambda ctx: st.func(ctx, cfg), st.inputs, st.params(cfg), external,
                       st.optional_inputs, PRODUCERS)
    log.info("stage %s %s", name, "done" if ran else "up to date")
    return ran


def run_pipeline(cfg: Config, root) -> Workspace:
    """Run every pipeline stage in order; a failing stage halts the run and
    leaves earlier artifacts in place."""
    ws = Workspace(root)
    _save_config(ws, cfg)
    for name in PIPELINE:
        run_stage(ws, name, cfg)
    return ws


# ---------------------------------------------------------------------------
# exports

NETWORK_ARTIFACTS = {
    "coauthor": "coauthor.json",
    "citation": "citation.json",
    "collab": "collab.json",
    "overlay": "overlay.json",
    "affinity": "affinity.json",
    "inter-area": "inter_area.json",
}
TABLE_ARTIFACTS = {
    "partition": "coauthor_partition.csv",
    "docmap": "docmap.csv",
    "roles": "roles.csv",
    "distortion-cdf": "distortion_cdf.csv",
    "areas": "areas.csv",
    "rir": "rir.csv",
    "residuals": "residuals.csv",
    "heatmap": "heatmap.csv",
    "links": "links.csv",
    "geo": "geo.csv",
    "activity": "activity.csv",
    "propensity": "propensity.csv",
    "precision-heatmap": "precision_heatmap.csv",
    "recall": "recall.csv",
    "summary": "summary.txt",
}
EXPORTS = {**{a: ("graphml", "dot", "csv") for a in NETWORK_ARTIFACTS}, **{a: ("csv",) for a in TABLE_ARTIFACTS}}


def export(ws: Workspace, artifact: str, fmt: str, dest) -> Path:
    """Write a view of a staged artifact to ``dest``."""
    if artifact not in EXPORTS:
        raise StageError("export", f"unknown artifact {artifact!r}; valid: {', '.join(sorted(EXPORTS))}")
    if fmt not in EXPORTS[artifact]:
        raise StageError("export", f"unknown format {fmt!r} for {artifact}; valid: {', '.join(EXPORTS[artifact])}")
    fname = NETWORK_ARTIFACTS.get(artifact) or TABLE_ARTIFACTS[artifact]
    if not ws.has(fname):
        raise StageError("export", f"{artifact} not in workspace; run stage `{PRODUCERS[fname]}` first")
    dest = Path(dest)
    if artifact in TABLE_ARTIFACTS:
        shutil.copyfile(ws.path(fname), dest)
        return dest
    net = network_from_json(ws.path(fname).read_text("utf-8"))
    if fmt == "graphml":
        write_graphml(net, dest)
    elif fmt == "dot":
        write_dot(net, dest)
    else:
        write_edgelist_csv(net, dest)
    return dest


def report_from_counts(text: str) -> str:
    return SummaryReport.from_json(text).as_text()

