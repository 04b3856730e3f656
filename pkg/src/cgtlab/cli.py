"""Batch command-line driver.

Every subcommand writes into a project directory through the same store
and run-manager code paths as the HTTP service, so artifacts come out
byte-identical for the same seeds. Exit codes: 0 success, 1 domain error,
2 usage error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from .corpus import PreprocessConfig, fetch_public_listing, write_jsonl
from .corpus.synthetic import SynthSpec, generate_synthetic
from .errors import CgtError
from .selection import MetricTable, select_k
from .validation import (
    bundled_proposals,
    bundled_term_selections,
    bundled_themes,
    build_term_ledger,
    compare,
    load_labelings,
    load_themes,
)
from .workbench import ProjectStore, RunManager, get_topic_view

PROJECT_ENV = "CGTLAB_PROJECT"


class Session:
    """Store/manager pair rooted at the project's parent directory."""

    def __init__(self, project_path: Path):
        self.project_path = project_path
        self.store = ProjectStore(project_path.parent)
        self.project_id = project_path.name
        self._manager: RunManager | None = None

    def ensure_project(self) -> str:
        try:
            self.store.project_dir(self.project_id)
        except CgtError:
            info = self.store.create_project(self.project_id)
            self.project_id = info.project_id
        return self.project_id

    @property
    def manager(self) -> RunManager:
        if self._manager is None:
            self._manager = RunManager(self.store, pool_size=1)
        return self._manager

    def run_sync(self, kind: str, params: dict) -> dict:
        run_id = self.manager.start_run(self.project_id, kind, params)
        status = self.manager.wait(run_id)
        if status["status"] != "done":
            raise CgtError(f"run {run_id} failed: {status.get('error')}")
        return status


def _merge_config_file(ctx: click.Context, project: Path, params: dict) -> dict:
    """config.json in the project directory fills in values the command
    line left at their defaults."""
    path = project / "config.json"
    if not path.exists():
        return params
    overrides = json.loads(path.read_text(encoding="utf-8"))
    merged = dict(params)
    for key, value in overrides.items():
        if key in merged and (
            ctx.get_parameter_source(key) == click.core.ParameterSource.DEFAULT
        ):
            merged[key] = value
    return merged


@click.group()
@click.option(
    "--project",
    "project_path",
    envvar=PROJECT_ENV,
    default="./cgtlab-project",
    type=click.Path(path_type=Path),
    help=f"Project directory (or ${PROJECT_ENV}).",
)
@click.pass_context
def main(ctx: click.Context, project_path: Path):
    """Topic-modeling workbench: corpora, models, validation, queries."""
    ctx.obj = Session(project_path.resolve())


def _echo_json(obj) -> None:
    click.echo(json.dumps(obj, indent=2, sort_keys=True))


@main.command()
@click.option("--input", "input_file", required=True,
              type=click.Path(exists=True, path_type=Path))
@click.option("--salt", default="", help="Salt for author pseudonymization.")
@click.pass_obj
def ingest(session: Session, input_file: Path, salt: str):
    """Ingest a JSONL dump of posts into the project."""
    from .corpus import ingest_jsonl

    session.ensure_project()
    with open(input_file, encoding="utf-8") as fh:
        result = ingest_jsonl(fh, salt=salt)
    d = session.store.project_dir(session.project_id)
    with open(d / "corpus_raw.jsonl", "w", encoding="utf-8") as fh:
        write_jsonl(result.posts, fh)
    rejects = [{"line_no": r.line_no, "reason": r.reason} for r in result.rejects]
    (d / "ingest_rejects.json").write_text(json.dumps(rejects, indent=2) + "\n")
    click.echo(f"ingested {len(result.posts)} posts, {len(rejects)} rejects")


@main.command()
@click.option("--subreddit", required=True)
@click.option("--pages", default=1, show_default=True)
@click.option("--salt", default="")
@click.pass_obj
def fetch(session: Session, subreddit: str, pages: int, salt: str):
    """Fetch a subreddit's public listing into the project."""
    from .corpus.listing import ListingConfig

    session.ensure_project()
    posts = fetch_public_listing(subreddit, pages, config=ListingConfig(salt=salt))
    d = session.store.project_dir(session.project_id)
    mode = "a" if (d / "corpus_raw.jsonl").exists() else "w"
    with open(d / "corpus_raw.jsonl", mode, encoding="utf-8") as fh:
        write_jsonl(posts, fh)
    click.echo(f"fetched {len(posts)} posts from r/{subreddit}")


@main.command()
@click.option("--min-df", default=5, show_default=True)
@click.option("--max-df-ratio", default=0.5, show_default=True)
@click.option("--min-token-len", default=2, show_default=True)
@click.option("--keep-numbers", is_flag=True)
@click.option("--salt", default="")
@click.pass_obj
def build(session: Session, min_df: int, max_df_ratio: float,
          min_token_len: int, keep_numbers: bool, salt: str):
    """Preprocess the ingested posts and build the corpus artifact."""
    session.ensure_project()
    d = session.store.project_dir(session.project_id)
    raw = d / "corpus_raw.jsonl"
    if not raw.exists():
        raise CgtError("no ingested posts; run `ingest` or `fetch` first")
    config = PreprocessConfig(
        min_df=min_df,
        max_df_ratio=max_df_ratio,
        min_token_len=min_token_len,
        keep_numbers=keep_numbers,
    )
    with open(raw, encoding="utf-8") as fh:
        result = session.store.put_corpus_from_jsonl(
            session.project_id, fh, config, salt=salt
        )
    _echo_json(result)


@main.command()
@click.option("--k", "k_true", required=True, type=int)
@click.option("--docs", "n_docs", required=True, type=int)
@click.option("--vocab", "vocab_size", required=True, type=int)
@click.option("--doc-len", default=80.0, show_default=True)
@click.option("--alpha", default=0.1, show_default=True)
@click.option("--beta", default=0.05, show_default=True)
@click.option("--children", default=0, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.pass_context
def synth(ctx: click.Context, **kw):
    """Generate a synthetic ground-truth corpus into the project."""
    session: Session = ctx.obj
    session.ensure_project()
    params = _merge_config_file(ctx, session.project_path, kw)
    spec = SynthSpec(
        k_true=params["k_true"],
        vocab_size=params["vocab_size"],
        n_docs=params["n_docs"],
        doc_len_mean=params["doc_len"],
        alpha_true=params["alpha"],
        beta_true=params["beta"],
        seed=params["seed"],
        n_children=params["children"],
    )
    res = generate_synthetic(spec)
    bare = PreprocessConfig(stoplist=frozenset(), min_token_len=1, min_df=1,
                            max_df_ratio=1.0, lemma_exceptions={})
    posts = _synthetic_posts(res.corpus)
    info = session.store.put_corpus(
        session.project_id, res.corpus, posts=posts, config=bare
    )
    d = session.store.project_dir(session.project_id)
    np.save(d / "corpus" / "planted_phi.npy", res.phi)
    np.save(d / "corpus" / "planted_theta.npy", res.theta)
    if res.child_phi is not None:
        np.save(d / "corpus" / "planted_children.npy", res.child_phi)
    _echo_json(info)


def _synthetic_posts(corpus):
    from .corpus import RawPost

    vocab = corpus.vocabulary
    return [
        RawPost(
            id=doc.source_id,
            subreddit="synthetic",
            author_ref="",
            created_utc=0,
            kind="post",
            parent_id=None,
            text=" ".join(vocab.terms[t] for t in doc.tokens),
        )
        for doc in corpus.documents
    ]


@main.command()
@click.option("--k", required=True, type=int)
@click.option("--alpha", default=None, type=float)
@click.option("--beta", default=0.01, show_default=True)
@click.option("--iterations", default=1000, show_default=True)
@click.option("--burn-in", default=800, show_default=True)
@click.option("--sample-lag", default=20, show_default=True)
@click.option("--n-samples", default=10, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.pass_context
def train(ctx: click.Context, **kw):
    """Train a topic model on the project corpus."""
    session: Session = ctx.obj
    params = _merge_config_file(ctx, session.project_path, kw)
    status = session.run_sync("lda", {
        "K": params["k"],
        "alpha": params["alpha"],
        "beta": params["beta"],
        "iterations": params["iterations"],
        "burn_in": params["burn_in"],
        "sample_lag": params["sample_lag"],
        "n_samples": params["n_samples"],
        "seed": params["seed"],
    })
    _echo_json(status)


@main.command()
@click.option("--k-min", required=True, type=int)
@click.option("--k-max", required=True, type=int)
@click.option("--k-step", default=1, show_default=True)
@click.option("--jobs", default=1, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--iterations", default=1000, show_default=True)
@click.option("--burn-in", default=800, show_default=True)
@click.option("--sample-lag", default=20, show_default=True)
@click.option("--n-samples", default=10, show_default=True)
@click.option("--coherence-top-n", default=10, show_default=True)
@click.option("--window-size", default=110, show_default=True)
@click.pass_context
def sweep(ctx: click.Context, **kw):
    """Train one model per K and tabulate the four selection metrics."""
    session: Session = ctx.obj
    params = _merge_config_file(ctx, session.project_path, kw)
    status = session.run_sync("sweep", {
        "k_min": params["k_min"],
        "k_max": params["k_max"],
        "k_step": params["k_step"],
        "jobs": params["jobs"],
        "coherence_top_n": params["coherence_top_n"],
        "window_size": params["window_size"],
        "base": {
            "seed": params["seed"],
            "iterations": params["iterations"],
            "burn_in": params["burn_in"],
            "sample_lag": params["sample_lag"],
            "n_samples": params["n_samples"],
        },
    })
    run_dir = session.store.run_dir(session.project_id, status["run_id"])
    click.echo((run_dir / "metrics.csv").read_text(), nl=False)
    click.echo(f"# run {status['run_id']} recommended_k="
               f"{status['result'].get('recommended_k')}")


@main.command("select-k")
@click.option("--run", "run_id", required=True)
@click.pass_obj
def select_k_cmd(session: Session, run_id: str):
    """Rank-sum recommendation from a sweep run's metric table."""
    project_id = session.store.project_of_run(run_id)
    run_dir = session.store.run_dir(project_id, run_id)
    table = MetricTable.load(run_dir / "metrics.json")
    best, report = select_k(table)
    click.echo(f"recommended K = {best}")
    for row in report:
        mark = "*" if row["selected"] else " "
        click.echo(
            f"{mark} K={row['K']:>3} rank_sum={row['rank_sum']:>3} "
            f"cao={row['cao']:.4f} arun={row['arun']:.4f} "
            f"umass={row['umass']:.4f} c_v={row['c_v']:.4f}"
        )


@main.command()
@click.option("--run", "run_id", required=True)
@click.option("--topic", required=True, type=int)
@click.option("--n-terms", default=20, show_default=True)
@click.option("--n-docs", default=5, show_default=True)
@click.pass_obj
def topics(session: Session, run_id: str, topic: int, n_terms: int, n_docs: int):
    """Print a topic's top terms and documents (same content as the API)."""
    view = get_topic_view(session.store, run_id, topic, n_terms, n_docs)
    _echo_json(view)


@main.command("compare")
@click.option("--runs", default="", help="Comma-separated run ids (project mode).")
@click.option("--themes", "themes_file", type=click.Path(path_type=Path),
              help="Theme fixture file (file mode; default: bundled).")
@click.option("--labelings", "labeling_files", multiple=True,
              type=click.Path(exists=True, path_type=Path),
              help="Labeling files (file mode).")
@click.pass_obj
def compare_cmd(session: Session, runs: str, themes_file: Path | None,
                labeling_files: tuple[Path, ...]):
    """Concurrence of labeled runs against the theme list."""
    if labeling_files:
        themes = load_themes(themes_file) if themes_file else bundled_themes()
        labelings = {}
        for path in labeling_files:
            run_id, labs = load_labelings(path)
            labelings[run_id] = labs
        report = compare(themes, labelings)
    else:
        run_ids = [r for r in runs.split(",") if r]
        if not run_ids:
            raise click.UsageError("provide --runs or --labelings")
        themes = session.store.themes(session.project_id)
        labelings = session.store.labelings_for_compare(session.project_id, run_ids)
        report = compare(themes, labelings)
    click.echo(report.to_markdown())
    click.echo(
        f"union detected={len(report.detected_themes)} "
        f"missing={len(report.missing_themes)} "
        f"novel={len(report.novel_topics)} "
        f"final={report.final_topic_count}"
    )


@main.command()
@click.option("--run-a", help="First model run id (project mode).")
@click.option("--run-b", help="Second model run id (project mode).")
@click.option("--top-n", default=20, show_default=True)
@click.option("--proposals", "proposals_file", type=click.Path(path_type=Path))
@click.option("--bundled-fixtures", is_flag=True,
              help="Build from the bundled published term selections.")
@click.pass_obj
def ledger(session: Session, run_a: str | None, run_b: str | None, top_n: int,
           proposals_file: Path | None, bundled_fixtures: bool):
    """Build the per-topic query-term ledger."""
    from .validation import bundled_labelings, build_term_ledger_from_models
    from .lda import load_model

    session.ensure_project()
    proposals = bundled_proposals()
    if proposals_file:
        obj = json.loads(proposals_file.read_text(encoding="utf-8"))
        proposals = {int(k): v for k, v in obj.get("proposals", obj).items()}
    if bundled_fixtures:
        themes = bundled_themes()
        rid_a, labs_a = bundled_labelings("labelings_13")
        rid_b, labs_b = bundled_labelings("labelings_17")
        report = compare(themes, {rid_a: labs_a, rid_b: labs_b})
        _, sel_a = bundled_term_selections("term_selections_13")
        _, sel_b = bundled_term_selections("term_selections_17")
        result = build_term_ledger(report, {rid_a: sel_a, rid_b: sel_b}, proposals)
    else:
        if not (run_a and run_b):
            raise click.UsageError("provide --run-a/--run-b or --bundled-fixtures")
        themes = session.store.themes(session.project_id)
        labelings = session.store.labelings_for_compare(
            session.project_id, [run_a, run_b]
        )
        report = compare(themes, labelings)
        corpus = session.store.load_corpus(session.project_id)
        models = {
            rid: (load_model(session.store.run_dir(session.project_id, rid) / "model"),
                  corpus)
            for rid in (run_a, run_b)
        }
        exclusions = {
            rid: session.store.excluded_terms(session.project_id, rid)
            for rid in (run_a, run_b)
        }
        result = build_term_ledger_from_models(
            report, models, labelings, top_n=top_n,
            exclusions=exclusions, proposals=proposals,
        )
    session.store.put_ledger(session.project_id, result.to_json())
    _echo_json(result.to_json())


@main.command()
@click.option("--queries", "queries_file", type=click.Path(path_type=Path),
              help="queries.json input (default: build from the stored ledger).")
@click.option("--method", default="kl", show_default=True,
              type=click.Choice(["frequency", "kl", "embedding"]))
@click.option("--expansion-size", default=30, show_default=True)
@click.option("--background-topics", default=10, show_default=True)
@click.option("--seed-boost", default=50.0, show_default=True)
@click.option("--relevance-threshold", default=0.3, show_default=True)
@click.option("--t-max", default=10, show_default=True)
@click.option("--min-subtopic-docs", default=5, show_default=True)
@click.option("--iterations", default=500, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.pass_context
def qdtm(ctx: click.Context, **kw):
    """Run query-driven topic modeling from a query file or the ledger."""
    session: Session = ctx.obj
    params = _merge_config_file(ctx, session.project_path, kw)
    config = {
        "method": params["method"],
        "expansion_size": params["expansion_size"],
        "background_topics": params["background_topics"],
        "seed_boost": params["seed_boost"],
        "relevance_threshold": params["relevance_threshold"],
        "t_max": params["t_max"],
        "min_subtopic_docs": params["min_subtopic_docs"],
        "iterations": params["iterations"],
        "seed": params["seed"],
    }
    run_params: dict = {"config": config}
    qfile = params["queries_file"]
    if qfile:
        obj = json.loads(Path(qfile).read_text(encoding="utf-8"))
        run_params["queries"] = obj["queries"]
    else:
        run_params["from_ledger"] = True
    status = session.run_sync("qdtm", run_params)
    _echo_json(status)


@main.command("judge-export")
@click.option("--output", "output_file", required=True,
              type=click.Path(path_type=Path))
@click.pass_obj
def judge_export(session: Session, output_file: Path):
    """Write all coherence judgments to a file."""
    judgments = session.store.judgments(session.project_id)
    output_file.write_text(json.dumps({"judgments": judgments}, indent=2,
                                      sort_keys=True) + "\n")
    click.echo(f"exported {sum(len(v) for v in judgments.values())} judgments")


@main.command("judge-import")
@click.option("--input", "input_file", required=True,
              type=click.Path(exists=True, path_type=Path))
@click.pass_obj
def judge_import(session: Session, input_file: Path):
    """Apply judgments from a file (headless counterpart of the UI)."""
    session.ensure_project()
    obj = json.loads(input_file.read_text(encoding="utf-8"))
    count = 0
    for node_ref, per_annotator in obj["judgments"].items():
        for annotator, rec in per_annotator.items():
            existing = session.store.judgments(session.project_id)
            current = existing.get(node_ref, {}).get(annotator)
            session.store.put_judgment(
                session.project_id,
                node_ref,
                coherent=rec["coherent"],
                include=rec["include"],
                note=rec.get("note", ""),
                annotator=annotator,
                revision=(current or {}).get("revision"),
            )
            count += 1
    click.echo(f"imported {count} judgments")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8080, show_default=True)
@click.option("--ui-dir", type=click.Path(path_type=Path), default=None,
              help="Static UI assets to serve under /ui.")
@click.pass_obj
def serve(session: Session, host: str, port: int, ui_dir: Path | None):
    """Start the workbench HTTP service over this project root."""
    import uvicorn

    from .workbench import create_app

    session.ensure_project()
    app = create_app(session.store.root, static_dir=ui_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")


@main.command()
@click.option("--output", "output_file", type=click.Path(path_type=Path))
@click.pass_obj
def export(session: Session, output_file: Path | None):
    """Export the project as a portable archive."""
    data = session.store.export_bundle(session.project_id)
    out = output_file or Path(f"{session.project_id}.zip")
    out.write_bytes(data)
    click.echo(f"wrote {out} ({len(data)} bytes)")


def run_cli(argv: list[str] | None = None) -> int:
    """Entry point with the documented exit-code contract."""
    try:
        main.main(args=argv, standalone_mode=False, prog_name="cgtlab")
        return 0
    except CgtError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except click.UsageError as exc:
        exc.show(file=sys.stderr)
        return 2
    except click.exceptions.Exit as exc:
        return int(exc.exit_code or 0)
    except click.Abort:
        return 2


def cli_entry() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    sys.exit(run_cli())
