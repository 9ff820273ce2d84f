"""Pipeline driver: ``asymgauge <subcommand> --config <file> [--key value ...]``.

Stages write their artifacts under the configured output directory and
later stages read them back, so each stage can run in its own process (or
on its own machine, for the scoring stage). Running a stage before its
inputs exist is a dependency error naming the stage to run first.

Every text artifact starts with ``#`` metadata lines: tool version, config
hash, seed, and a checksum per input file. Nothing in the header or the
body depends on wall-clock time, so re-running a stage with identical
inputs and configuration reproduces the file byte for byte.

Exit codes: 0 success, 2 validation/config, 3 missing pipeline dependency,
4 scoring-channel failure, 5 internal error.
"""

from __future__ import annotations

import argparse
import hashlib
import logging
import sys
from pathlib import Path

from . import __version__
from .config import RunConfig, load_config
from .corpus_index import (
    build_index,
    contexts_for_pair,
    load_index,
    read_corpus_dir,
    read_corpus_stream,
    save_index,
)
from .errors import (
    AsymGaugeError,
    ConfigurationError,
    DependencyError,
    IncompleteBatchError,
    ScorerChannelError,
    ScorerProtocolError,
    ValidationError,
)
from .evocation_data import (
    clean_pair_filter,
    ingest_evocation,
    pair_vocabulary,
    read_conditional_tsv,
    write_conditional_tsv,
)
from .lm_conditionals import (
    ScoreResult,
    collect_pairs,
    emit_tasks,
    lm_conditional_table,
    make_scorer,
    read_factor_log,
    read_result_file,
    write_factor_log,
    write_task_file,
    _pair_seed,
)
from .metrics import (
    bin_analysis,
    direction_sign,
    geometric_mean_similarity,
    read_similarity_gold,
    similarity_eval,
)
from .relation_annotator import (
    build_pair_sets,
    open_assertions,
    parse_conceptnet,
    read_pair_tsv,
    write_pair_tsv,
)
from .report import assemble_report, format_report_text, lenient_lar_map, write_bin_csv, write_report_tsv
from .static_conditionals import (
    SoftmaxConditionals,
    cosine,
    load_dual_vectors,
    load_vectors,
)

logger = logging.getLogger(__name__)

SUBCOMMANDS = (
    "ingest",
    "annotate",
    "index",
    "cond-evoc",
    "cond-static",
    "cond-lm",
    "report",
    "simeval",
)


def _sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()[:16]


def _metadata(
    cfg: RunConfig, subcommand: str, inputs: list[tuple[str, Path]] = [], extra: list[str] = []
) -> list[str]:
    lines = [
        f"asymgauge {subcommand} v{__version__}",
        f"config_hash={cfg.hash()}",
        f"seed={cfg.get_int('seed')}",
    ]
    for label, path in inputs:
        lines.append(f"input {label} sha256={_sha256_file(path)}")
    lines.extend(extra)
    return lines


def _need(path: Path, produced_by: str) -> Path:
    if not path.exists():
        raise DependencyError(f"{path} not found; run `asymgauge {produced_by}` first")
    return path


def _datasets(cfg: RunConfig) -> list[tuple[str, Path]]:
    entries = cfg.named_paths("datasets")
    if not entries:
        raise ConfigurationError("config key 'datasets' must list name:path entries")
    return entries


def _ingested_path(cfg: RunConfig, name: str) -> Path:
    return cfg.output_dir() / "ingested" / f"{name}.tsv"


def _pairs_dir(cfg: RunConfig, name: str) -> Path:
    return cfg.output_dir() / "pairs" / name


def _cond_path(cfg: RunConfig, name: str) -> Path:
    return cfg.output_dir() / "cond" / f"{name}.tsv"


def _load_ingested(cfg: RunConfig, name: str):
    path = _need(_ingested_path(cfg, name), "ingest")
    return ingest_evocation(path, name)


def _read_pair_dir(cfg: RunConfig, name: str) -> dict:
    pairs_dir = _need(_pairs_dir(cfg, name), "annotate")
    sets = {}
    for file in sorted(pairs_dir.glob("*.tsv")):
        ps = read_pair_tsv(file, relation=file.stem)
        sets[ps.relation] = ps
    if not sets:
        raise DependencyError(f"{pairs_dir} holds no pair files; run `asymgauge annotate`")
    return sets


def _load_cond(cfg: RunConfig, name: str):
    path = _cond_path(cfg, name)
    if not path.exists():
        raise DependencyError(
            f"{path} not found; run the cond-evoc/cond-static/cond-lm stage "
            f"that produces resource {name!r}"
        )
    return read_conditional_tsv(path, resource_id=name)


def _relations_from(cfg: RunConfig) -> list[str]:
    names = cfg.get_names("relations_from")
    if not names:
        names = [name for name, _ in _datasets(cfg)]
    return names


# ---------------------------------------------------------------------------
# subcommands


def cmd_ingest(cfg: RunConfig, args) -> None:
    out = cfg.output_dir() / "ingested"
    out.mkdir(parents=True, exist_ok=True)
    for name, path in _datasets(cfg):
        if not path.exists():
            raise ValidationError(f"dataset {name!r}: file not found: {path}")
        dataset = ingest_evocation(path, name)
        target = out / f"{name}.tsv"
        header = _metadata(
            cfg,
            "ingest",
            inputs=[(name, path)],
            extra=[f"cues={len(dataset.entries)} rows={len(dataset)}"],
        )
        with open(target, "w", encoding="utf-8", newline="\n") as fh:
            for line in header:
                fh.write(f"# {line}\n")
            for cue in sorted(dataset.entries):
                for response in sorted(dataset.entries[cue]):
                    fh.write(f"{cue}\t{response}\t{dataset.entries[cue][response]}\n")
        print(f"wrote {target}")


def _vocab_for_name(cfg: RunConfig, name: str) -> set[str]:
    for ds_name, _ in cfg.named_paths("datasets"):
        if ds_name == name:
            dataset = _load_ingested(cfg, name)
            return pair_vocabulary(clean_pair_filter(dataset))
    for vec_name, path in cfg.named_paths("vectors"):
        if vec_name == name:
            return load_vectors(path, name=name).vocabulary()
    for vec_name, wpath, cpath in cfg.named_path_pairs("dual_vectors"):
        if vec_name == name:
            return load_dual_vectors(wpath, cpath, name=name).vocabulary()
    raise ConfigurationError(f"vocab_from names unknown resource {name!r}")


def cmd_annotate(cfg: RunConfig, args) -> None:
    dump = cfg.get_path("conceptnet")
    if not dump.exists():
        raise ValidationError(f"assertion dump not found: {dump}")
    language = cfg.require("language")
    with open_assertions(dump) as fh:
        edges = parse_conceptnet(fh, language_tag=language)
    extra_vocabs = [_vocab_for_name(cfg, n) for n in cfg.get_names("vocab_from")]

    for name, _ in _datasets(cfg):
        dataset = _load_ingested(cfg, name)
        clean = clean_pair_filter(dataset)
        vocab = pair_vocabulary(clean)
        for extra in extra_vocabs:
            vocab &= extra
        sets = build_pair_sets(sorted(clean), edges, vocab)
        out = _pairs_dir(cfg, name)
        out.mkdir(parents=True, exist_ok=True)
        for stale in out.glob("*.tsv"):
            stale.unlink()
        for relation in sorted(sets):
            target = out / f"{relation}.tsv"
            header = _metadata(
                cfg,
                "annotate",
                inputs=[(name, _ingested_path(cfg, name)), ("assertions", dump)],
                extra=[f"relation={relation} pairs={len(sets[relation])}"],
            )
            write_pair_tsv(sets[relation], target, header_lines=header)
        print(f"wrote {len(sets)} relation files under {out}")


def cmd_index(cfg: RunConfig, args) -> None:
    corpus_dir = cfg.get("corpus_dir")
    corpus_file = cfg.get("corpus_file")
    if bool(corpus_dir) == bool(corpus_file):
        raise ConfigurationError("set exactly one of corpus_dir / corpus_file")
    if corpus_dir:
        docs = read_corpus_dir(cfg.path(corpus_dir))
    else:
        with open(cfg.path(corpus_file), "r", encoding="utf-8") as fh:
            docs = list(read_corpus_stream(fh))
    store = build_index(docs)
    out = cfg.output_dir()
    out.mkdir(parents=True, exist_ok=True)
    target = out / "index.asyx"
    save_index(store, target)
    meta = out / "index.meta"
    with open(meta, "w", encoding="utf-8", newline="\n") as fh:
        for line in _metadata(
            cfg,
            "index",
            extra=[
                f"paragraphs={len(store)}",
                f"vocabulary={len(store.postings)}",
                f"truncated={store.truncated_count}",
            ],
        ):
            fh.write(f"# {line}\n")
    print(f"wrote {target} ({len(store)} paragraphs, {len(store.postings)} words)")


def cmd_cond_evoc(cfg: RunConfig, args) -> None:
    out = cfg.output_dir() / "cond"
    out.mkdir(parents=True, exist_ok=True)
    from .evocation_data import conditionals

    for name, _ in _datasets(cfg):
        dataset = _load_ingested(cfg, name)
        clean = sorted(clean_pair_filter(dataset))
        table = conditionals(dataset, clean)
        target = out / f"{name}.tsv"
        header = _metadata(
            cfg,
            "cond-evoc",
            inputs=[(name, _ingested_path(cfg, name))],
            extra=[f"pairs={len(clean)}"],
        )
        write_conditional_tsv(table, target, header_lines=header)
        print(f"wrote {target}")


def _evaluation_pairs(cfg: RunConfig) -> list[tuple[str, str]]:
    seen: set[tuple[str, str]] = set()
    for name in _relations_from(cfg):
        for ps in _read_pair_dir(cfg, name).values():
            for a, b in ps.pairs:
                seen.add((a, b) if a <= b else (b, a))
    return sorted(seen)


def cmd_cond_static(cfg: RunConfig, args) -> None:
    singles = cfg.named_paths("vectors")
    duals = cfg.named_path_pairs("dual_vectors")
    if not singles and not duals:
        raise ConfigurationError("no vectors/dual_vectors configured")
    policy = cfg.require("support_policy")
    if policy != "pair-vocab":
        raise ConfigurationError(f"unknown support_policy {policy!r}")
    pairs = _evaluation_pairs(cfg)
    vocab = pair_vocabulary(pairs)
    out = cfg.output_dir() / "cond"
    out.mkdir(parents=True, exist_ok=True)

    tables = [(name, load_vectors(path, name=name), [(name, path)]) for name, path in singles]
    tables += [
        (name, load_dual_vectors(wp, cp, name=name), [(f"{name}:word", wp), (f"{name}:context", cp)])
        for name, wp, cp in duals
    ]
    for name, table, inputs in tables:
        support = vocab & table.vocabulary()
        conditioner = SoftmaxConditionals(table, support)
        cond = conditioner.table_for_pairs(pairs, resource_id=name)
        target = out / f"{name}.tsv"
        header = _metadata(
            cfg,
            "cond-static",
            inputs=inputs,
            extra=[
                f"support_policy={policy} support={len(support)}",
                f"pairs_covered={len(cond) // 2} of {len(pairs)}",
            ],
        )
        write_conditional_tsv(cond, target, header_lines=header)
        print(f"wrote {target}")


class _FileResultsChannel:
    """Channel that replays scores consumed from a results file."""

    def __init__(self, results: list[ScoreResult], model_id: str):
        self._by_id = {}
        for r in results:
            if r.task_id in self._by_id:
                raise ScorerProtocolError(f"duplicate result id {r.task_id!r} in file")
            self._by_id[r.task_id] = r
        self.model_id = model_id

    def score_batch(self, tasks):
        return [self._by_id[t.task_id] for t in tasks if t.task_id in self._by_id]


def cmd_cond_lm(cfg: RunConfig, args) -> None:
    lm_name = cfg.require("lm_name")
    index_path = _need(cfg.output_dir() / "index.asyx", "index")
    store = load_index(index_path)
    pair_sets = []
    for name in _relations_from(cfg):
        pair_sets.extend(_read_pair_dir(cfg, name).values())
    cap = cfg.get_int("cap")
    seed = cfg.get_int("seed")

    if args.emit_tasks:
        pairs = collect_pairs(pair_sets)
        tasks = []
        for a, b in pairs:
            contexts = contexts_for_pair(store, a, b, cap=cap, seed=_pair_seed(seed, a, b))
            tasks.extend(emit_tasks(contexts, (a, b)))
        target = Path(args.emit_tasks)
        target.parent.mkdir(parents=True, exist_ok=True)
        header = _metadata(
            cfg, "cond-lm", inputs=[("index", index_path)], extra=[f"tasks={len(tasks)}"]
        )
        write_task_file(tasks, target, header_lines=header)
        print(f"wrote {len(tasks)} tasks to {target}")
        return

    if args.consume_scores:
        results = read_result_file(Path(args.consume_scores))
        channel = _FileResultsChannel(results, model_id=cfg.require("scorer"))
        probe = False
    else:
        channel = make_scorer(cfg.require("scorer"))
        probe = True

    checkpoint = cfg.output_dir() / "checkpoints" / f"{lm_name}.ckpt"
    try:
        table, factor_log = lm_conditional_table(
            pair_sets,
            store,
            channel,
            cap=cap,
            seed=seed,
            floor=cfg.get_float("prob_floor"),
            retries=cfg.get_int("scorer_retries"),
            checkpoint_path=checkpoint,
            resource_id=lm_name,
            probe=probe,
        )
    finally:
        close = getattr(channel, "close", None)
        if close is not None:
            close()

    out = cfg.output_dir() / "cond"
    out.mkdir(parents=True, exist_ok=True)
    n_ok = sum(1 for r in factor_log if r.status == "ok")
    n_dry = sum(1 for r in factor_log if r.status == "no_context")
    n_refused = sum(1 for r in factor_log if r.status == "refused")
    stats = [f"pairs ok={n_ok} no_context={n_dry} refused={n_refused}"]
    if n_refused:
        refused = [r.pair for r in factor_log if r.status == "refused"]
        stats.append(
            "refused pairs: " + ", ".join(f"{a}/{b}" for a, b in refused[:20])
        )
    header = _metadata(cfg, "cond-lm", inputs=[("index", index_path)], extra=stats)
    write_conditional_tsv(table, out / f"{lm_name}.tsv", header_lines=header)
    factors_dir = cfg.output_dir() / "factors"
    factors_dir.mkdir(parents=True, exist_ok=True)
    write_factor_log(factor_log, factors_dir / f"{lm_name}.tsv", header_lines=header)
    print(f"wrote {out / (lm_name + '.tsv')} ({n_ok} pairs scored)")


def _effective_relation_pairs(cfg: RunConfig) -> dict[str, list[tuple[str, str]]]:
    names = _relations_from(cfg)
    per_dataset = [_read_pair_dir(cfg, name) for name in names]
    first = per_dataset[0]
    merged: dict[str, list[tuple[str, str]]] = {}
    for relation, ps in first.items():
        pairs = list(ps.pairs)
        for other in per_dataset[1:]:
            if relation not in other:
                pairs = []
                break
            keep = set(other[relation].pairs)
            pairs = [p for p in pairs if p in keep]
        if pairs:
            merged[relation] = pairs
    if not merged:
        raise ValidationError("no relation survives the dataset intersection")
    return merged


def cmd_report(cfg: RunConfig, args) -> None:
    compare = cfg.name_pairs("compare")
    if not compare:
        raise ConfigurationError("config key 'compare' must list i:j resource pairs")
    relation_pairs = _effective_relation_pairs(cfg)
    alar_names = cfg.get_names("alar")
    involved = sorted(
        {r for pair in compare for r in pair} | set(alar_names)
    )
    tables = {name: _load_cond(cfg, name) for name in involved}
    slog = cfg.get("alar_signed_log_scale")
    report = assemble_report(
        relation_pairs,
        tables,
        compare,
        gammas=cfg.get_floats("gammas"),
        alar_resources=alar_names or None,
        slog_scale=float(slog) if slog else None,
    )
    out = cfg.output_dir() / "report"
    out.mkdir(parents=True, exist_ok=True)
    inputs = [(name, _cond_path(cfg, name)) for name in involved]
    header = _metadata(cfg, "report", inputs=inputs)
    write_report_tsv(report, out / "metrics.tsv", header_lines=header)
    with open(out / "metrics.txt", "w", encoding="utf-8", newline="\n") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        fh.write(format_report_text(report))
    print(f"wrote {out / 'metrics.tsv'}")

    bin_gamma = cfg.get_float("bin_gamma")
    bin_size = cfg.get_int("bin_size")
    for i, j in compare:
        for res, other in ((i, j), (j, i)):
            factors_path = cfg.output_dir() / "factors" / f"{res}.tsv"
            if not factors_path.exists():
                continue
            factor_log = [r for r in read_factor_log(factors_path) if r.status == "ok"]
            all_pairs = [r.pair for r in factor_log]
            map_res, missing_res = lenient_lar_map(tables[res], all_pairs)
            map_other, missing_other = lenient_lar_map(tables[other], all_pairs)
            covered = {
                p for p in all_pairs
                if map_res.get(*p) is not None and map_other.get(*p) is not None
            }

            def agreement(pair: tuple[str, str]) -> float:
                s1 = direction_sign(map_res.get(*pair), bin_gamma)
                s2 = direction_sign(map_other.get(*pair), bin_gamma)
                return 1.0 if s1 == s2 else 0.0

            for factor_name, value_of in (
                ("population", lambda r: float(r.population)),
                ("chardist", lambda r: r.mean_char_distance),
            ):
                entries = [
                    (r.pair, value_of(r)) for r in factor_log if r.pair in covered
                ]
                if not entries:
                    continue
                bins = bin_analysis(entries, agreement, bin_size)
                target = out / f"bins_{factor_name}_{res}-{other}.csv"
                bin_header = _metadata(
                    cfg,
                    "report",
                    inputs=[("factors", factors_path)],
                    extra=[
                        f"factor={factor_name} gamma={bin_gamma:g} bin_size={bin_size}",
                        f"pairs={len(entries)} skipped={len(all_pairs) - len(entries)}",
                    ],
                )
                write_bin_csv(bins, target, header_lines=bin_header)
                print(f"wrote {target}")


def cmd_simeval(cfg: RunConfig, args) -> None:
    golds = cfg.named_paths("sim_gold")
    if not golds:
        raise ConfigurationError("config key 'sim_gold' must list name:path entries")
    names = cfg.get_names("sim_scores")
    if not names:
        raise ConfigurationError("config key 'sim_scores' must list resource names")

    vector_paths = dict(cfg.named_paths("vectors"))
    dual_paths = {n: (w, c) for n, w, c in cfg.named_path_pairs("dual_vectors")}

    rows = []
    inputs: list[tuple[str, Path]] = []
    for gold_name, gold_path in golds:
        if not gold_path.exists():
            raise ValidationError(f"gold file not found: {gold_path}")
        inputs.append((gold_name, gold_path))
        gold = read_similarity_gold(gold_path)
        for name in names:
            if name in vector_paths or name in dual_paths:
                if name in vector_paths:
                    table = load_vectors(vector_paths[name], name=name)
                else:
                    table = load_dual_vectors(*dual_paths[name], name=name)
                scores = {
                    (a, b): cosine(table, a, b)
                    for a, b in gold
                    if a in table and b in table
                }
            else:
                cond = _load_cond(cfg, name)
                scores = {}
                for a, b in gold:
                    p_ba, p_ab = cond.get(a, b), cond.get(b, a)
                    if p_ba is not None and p_ab is not None:
                        scores[(a, b)] = geometric_mean_similarity(p_ba, p_ab)
            result = similarity_eval(scores, gold)
            rows.append((gold_name, name, result))

    out = cfg.output_dir() / "report"
    out.mkdir(parents=True, exist_ok=True)
    target = out / "similarity.tsv"
    header = _metadata(cfg, "simeval", inputs=inputs)
    with open(target, "w", encoding="utf-8", newline="\n") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        fh.write("gold\tresource\tspearman\tp_value\tn_shared\tn_excluded\n")
        for gold_name, name, r in rows:
            fh.write(
                f"{gold_name}\t{name}\t{r.rho:.17g}\t{r.p_value:.17g}"
                f"\t{r.n_shared}\t{r.n_excluded}\n"
            )
    print(f"wrote {target}")


# ---------------------------------------------------------------------------
# argument handling


_HANDLERS = {
    "ingest": cmd_ingest,
    "annotate": cmd_annotate,
    "index": cmd_index,
    "cond-evoc": cmd_cond_evoc,
    "cond-static": cmd_cond_static,
    "cond-lm": cmd_cond_lm,
    "report": cmd_report,
    "simeval": cmd_simeval,
}


def _parse_overrides(rest: list[str]) -> list[tuple[str, str]]:
    overrides = []
    k = 0
    while k < len(rest):
        flag = rest[k]
        if not flag.startswith("--") or k + 1 >= len(rest):
            raise ConfigurationError(
                f"overrides must come as --key value pairs, got {rest[k:]!r}"
            )
        overrides.append((flag[2:].replace("-", "_"), rest[k + 1]))
        k += 2
    return overrides


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="asymgauge",
        description="Directional word-relatedness pipeline.",
    )
    parser.add_argument("--version", action="version", version=f"asymgauge {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, help=f"{name} stage")
        p.add_argument("--config", required=True, help="path to key=value config file")
        if name == "cond-lm":
            p.add_argument(
                "--emit-tasks",
                metavar="PATH",
                help="write scoring tasks to PATH and stop (no scorer needed)",
            )
            p.add_argument(
                "--consume-scores",
                metavar="PATH",
                help="read scored results from PATH instead of running a scorer",
            )
        else:
            p.set_defaults(emit_tasks=None, consume_scores=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args, rest = parser.parse_known_args(argv)
        overrides = _parse_overrides(rest)
        if args.emit_tasks and args.consume_scores:
            raise ConfigurationError("--emit-tasks and --consume-scores are exclusive")
        cfg = load_config(args.config, overrides)
        _HANDLERS[args.command](cfg, args)
        return 0
    except ValidationError as exc:
        # covers config, parse, precondition, domain, stale checkpoint
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DependencyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ScorerChannelError, ScorerProtocolError, IncompleteBatchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except AsymGaugeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        return 0
    except Exception:  # pragma: no cover - defensive
        import traceback

        traceback.print_exc()
        return 5


if __name__ == "__main__":
    sys.exit(main())
