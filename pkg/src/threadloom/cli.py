"""Command-line interface.

Subcommands:
    generate   run the full synthesis pipeline from a clips file, either
               offline against a recorded snapshot or against live
               providers configured by environment variables.
    snapshot   record a replayable snapshot of the live providers for a
               set of seed papers.
    serve      run the HTTP service.

Exit codes: 0 success, 1 pipeline or provider failure, 2 empty result
(no contexts survived the filter), 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .corpus.cache import RequestCache
from .corpus.client import CorpusClient
from .corpus.providers import (
    HttpMetadataProvider,
    HttpPdfFetcher,
    HttpPdfSearchProvider,
    HttpStructureParser,
)
from .corpus.ratelimit import TokenBucket
from .corpus.snapshot import (
    RecordingMetadataProvider,
    SnapshotStore,
    record_acquisitions,
    replay_providers,
)
from .embedding import HashingEmbedder, RemoteEmbedder
from .graph import SeedClip
from .jsonio import dumps_canonical
from .labeling import KeywordLabelGenerator, RemoteChatGenerator
from .orchestrator import (
    PipelineConfig,
    SynthesisError,
    render_markdown,
    run_synthesis,
)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_EMPTY = 2
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    """argparse that exits with the usage code instead of 2."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> _Parser:
    parser = _Parser(prog="threadloom", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="run the synthesis pipeline")
    gen.add_argument("--clips", required=True, help="JSON file of seed clips")
    mode = gen.add_mutually_exclusive_group(required=True)
    mode.add_argument("--snapshot", help="replay a recorded snapshot directory")
    mode.add_argument(
        "--live", action="store_true", help="use live providers from env"
    )
    gen.add_argument("--out", help="write the artifact here instead of stdout")
    gen.add_argument(
        "--format", choices=("json", "markdown"), default="json"
    )
    gen.add_argument("--per-direction-cap", type=int, default=50)
    gen.add_argument("--top-k", type=int, default=30)
    gen.add_argument("--filter-threshold", type=float, default=0.80)
    gen.add_argument("--merge-threshold", type=float, default=0.92)
    gen.add_argument("--max-top-groups", type=int, default=8)
    gen.add_argument("--max-threads", type=int, default=25)
    gen.add_argument("--min-thread-size", type=int, default=2)
    gen.add_argument("--damping", type=float, default=0.5)
    gen.add_argument("--tol", type=float, default=1e-5)
    gen.add_argument("--max-iterations", type=int, default=200)
    gen.add_argument(
        "--baseline-compat",
        action="store_true",
        help="constant 0.58 same-state potential on every edge",
    )
    gen.add_argument("--lbp-debug", help="write per-iteration deltas here")
    gen.add_argument("--cache-dir", help="provider cache directory (live mode)")

    snap = sub.add_parser("snapshot", help="record a replayable snapshot")
    snap.add_argument(
        "--seed-ids", required=True, help="comma-separated seed paper ids"
    )
    snap.add_argument("--out", required=True, help="snapshot directory")
    snap.add_argument("--per-direction-cap", type=int, default=50)
    snap.add_argument(
        "--acquire-top",
        type=int,
        default=100,
        help="acquire full text for this many most-cited candidates",
    )
    snap.add_argument("--cache-dir", help="provider cache directory")

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--workspaces", help="workspace state directory")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8080)
    serve.add_argument(
        "--snapshot", help="serve offline from this snapshot directory"
    )
    serve.add_argument("--cache-dir", help="provider cache directory")
    serve.add_argument(
        "--synchronous-jobs",
        action="store_true",
        help="run jobs on the request thread (testing only)",
    )
    return parser


# ----------------------------------------------------------------------
# Provider wiring


def _build_live_providers(args) -> dict:
    """Live provider bundle from THREADLOOM_* environment variables."""
    metadata_url = os.environ.get("THREADLOOM_METADATA_URL")
    if not metadata_url:
        raise SystemExit(
            "THREADLOOM_METADATA_URL is required for live mode"
        )
    cache_dir = getattr(args, "cache_dir", None) or os.environ.get(
        "THREADLOOM_CACHE_DIR"
    )
    cache = RequestCache(cache_dir) if cache_dir else None
    limiter = TokenBucket()
    bundle: dict = {
        "metadata": HttpMetadataProvider(
            metadata_url,
            api_key=os.environ.get("THREADLOOM_METADATA_KEY"),
            cache=cache,
            limiter=limiter,
        ),
        "search": None,
        "fetcher": None,
        "parser": None,
    }
    search_url = os.environ.get("THREADLOOM_SEARCH_URL")
    if search_url:
        bundle["search"] = HttpPdfSearchProvider(
            search_url,
            api_key=os.environ.get("THREADLOOM_SEARCH_KEY"),
            cache=cache,
            limiter=limiter,
        )
    parser_url = os.environ.get("THREADLOOM_PARSER_URL")
    if parser_url:
        bundle["fetcher"] = HttpPdfFetcher(limiter=limiter)
        bundle["parser"] = HttpStructureParser(
            parser_url, cache=cache, limiter=limiter
        )
    return bundle


def _build_embedder():
    endpoint = os.environ.get("THREADLOOM_EMBED_URL")
    if endpoint:
        return RemoteEmbedder(
            endpoint,
            model=os.environ.get("THREADLOOM_EMBED_MODEL", "default"),
            api_key=os.environ.get("THREADLOOM_EMBED_KEY"),
        )
    return HashingEmbedder()


def _build_generator():
    endpoint = os.environ.get("THREADLOOM_CHAT_URL")
    if endpoint:
        return RemoteChatGenerator(
            endpoint,
            model=os.environ.get("THREADLOOM_CHAT_MODEL", "default"),
            api_key=os.environ.get("THREADLOOM_CHAT_KEY"),
        )
    return KeywordLabelGenerator()


def _load_clips(path: str) -> list[SeedClip]:
    try:
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise SystemExit(f"cannot read clips file {path}: {exc}")
    entries = data.get("clips") if isinstance(data, dict) else data
    if not isinstance(entries, list) or not entries:
        raise SystemExit(f"clips file {path} holds no clips")
    try:
        return [SeedClip.from_dict(entry) for entry in entries]
    except (KeyError, ValueError) as exc:
        raise SystemExit(f"bad clip in {path}: {exc}")


def _config_from_args(args) -> PipelineConfig:
    return PipelineConfig(
        per_direction_cap=args.per_direction_cap,
        top_k=args.top_k,
        filter_threshold=args.filter_threshold,
        merge_threshold=args.merge_threshold,
        max_top_groups=args.max_top_groups,
        max_threads=args.max_threads,
        min_thread_size=args.min_thread_size,
        damping=args.damping,
        tol=args.tol,
        max_iterations=args.max_iterations,
        baseline_compat=args.baseline_compat,
    )


# ----------------------------------------------------------------------
# Subcommands


def _cmd_generate(args) -> int:
    clips = _load_clips(args.clips)
    if args.snapshot:
        providers = replay_providers(SnapshotStore(args.snapshot))
        embedder = HashingEmbedder()
        generator = KeywordLabelGenerator()
    else:
        providers = _build_live_providers(args)
        embedder = _build_embedder()
        generator = _build_generator()
    client = CorpusClient(**providers)
    config = _config_from_args(args)

    debug_handle = None
    if args.lbp_debug:
        debug_handle = open(args.lbp_debug, "w", encoding="utf-8")
    try:
        result = run_synthesis(
            clips,
            client,
            embedder,
            generator,
            config=config,
            observer=lambda stage: print(f"stage: {stage}", file=sys.stderr),
            lbp_debug=debug_handle,
        )
    except SynthesisError as exc:
        print(f"synthesis failed at {exc}", file=sys.stderr)
        return EXIT_FAILURE
    finally:
        if debug_handle is not None:
            debug_handle.close()

    if args.format == "json":
        artifact = dumps_canonical(result)
    else:
        artifact = render_markdown(result)
    if args.out:
        Path(args.out).write_text(artifact, encoding="utf-8")
    else:
        sys.stdout.write(artifact)
    if result["empty"]:
        print("no contexts passed the relevance filter", file=sys.stderr)
        return EXIT_EMPTY
    return EXIT_OK


def _cmd_snapshot(args) -> int:
    seeds = sorted({s.strip() for s in args.seed_ids.split(",") if s.strip()})
    if not seeds:
        print("no seed ids given", file=sys.stderr)
        return EXIT_USAGE
    providers = _build_live_providers(args)
    store = SnapshotStore(args.out)
    recording = RecordingMetadataProvider(providers["metadata"], store)
    client = CorpusClient(
        recording,
        search=providers["search"],
        fetcher=providers["fetcher"],
        parser=providers["parser"],
    )

    resolved = []
    for seed in seeds:
        try:
            record = recording.get_paper(seed)
        except Exception as exc:
            print(f"seed {seed}: {exc}", file=sys.stderr)
            continue
        if record is None:
            print(f"seed {seed}: not found in the metadata index", file=sys.stderr)
        else:
            resolved.append(seed)
    if not resolved:
        print("no seed resolved; nothing recorded", file=sys.stderr)
        return EXIT_FAILURE

    store.record_manifest(resolved, args.per_direction_cap)
    corpus = client.fetch_neighborhood(
        resolved, per_direction_cap=args.per_direction_cap
    )
    store.flush_neighborhood()

    by_citations = sorted(
        (pid for pid in corpus.papers if pid not in corpus.seed_ids),
        key=lambda pid: (-corpus.papers[pid].citation_count, pid),
    )
    targets = list(corpus.seed_ids) + by_citations[: max(0, args.acquire_top)]
    results = record_acquisitions(client, store, targets)
    degraded = sum(1 for r in results if r.degraded)
    print(
        f"recorded {len(corpus.papers)} papers, "
        f"{len(targets)} acquisitions ({degraded} fallback)",
        file=sys.stderr,
    )
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .orchestrator import PipelineConfig as _Config
    from .service import ServiceDeps, create_app

    if args.snapshot:
        providers = replay_providers(SnapshotStore(args.snapshot))
        embedder = HashingEmbedder()
        generator = KeywordLabelGenerator()
    else:
        providers = _build_live_providers(args)
        embedder = _build_embedder()
        generator = _build_generator()
    client = CorpusClient(**providers)
    workspace_root = (
        args.workspaces
        or os.environ.get("THREADLOOM_WORKSPACES")
        or "./workspaces"
    )
    deps = ServiceDeps(
        client=client,
        embedder=embedder,
        generator=generator,
        config=_Config(),
        api_token=os.environ.get("THREADLOOM_API_TOKEN"),
        synchronous_jobs=args.synchronous_jobs,
    )
    app = create_app(workspace_root, deps)
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "generate": _cmd_generate,
        "snapshot": _cmd_snapshot,
        "serve": _cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except SystemExit as exc:
        if isinstance(exc.code, str):
            print(exc.code, file=sys.stderr)
            return EXIT_FAILURE
        raise
    except KeyboardInterrupt:
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
