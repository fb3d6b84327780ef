"""Command-line interface: profile, decorate, tag, generate, evaluate, sweep."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, fields
from pathlib import Path

from .alignment import EmptyReferenceError
from .error_profile import ProfileError, count_errors, estimate_profile, load_profile, save_profile
from .evaluation.lexicon import LexiconError, load_lexicon
from .evaluation.report import format_table, merge_external_scores, write_json
from .evaluation.similarity import METRICS, IdMismatchError, similarity_matrix
from .evaluation.sweep import noise_sweep
from .generator.client import HttpChatClient
from .generator.pipeline import ConfigError, GenerationConfig, config_hash, generate_corpus, select_examples
from .tagging import TagSyntaxError, apply_plan, decorate_example_pair, derive_seed, parse_tagged, sample_error_plan
from .transcript import CorpusError, Dialogue, Turn, dump_jsonl, load_corpus, load_paired_corpus, save_corpus, tokenize

logger = logging.getLogger("asrnoise")

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_ENDPOINT = 0, 1, 2, 3


class EndpointUnreachable(RuntimeError):
    pass


@dataclass
class RunConfig:
    seed: int = 0
    out_dir: str = "out"
    fallback: bool = True
    endpoint: str | None = None
    api_key_env: str = "ASRNOISE_API_KEY"
    model: str = ""
    temperature: float = 0.7
    max_tokens: int = 256
    response_path: str = "choices.0.message.content"
    timeout: float = 60.0
    concurrency: int = 1
    retries: int = 2
    examples_k: int = 4
    example_strategy: str = "random"
    multiplicity: int = 1
    profile: str | None = None
    examples: str | None = None
    lexicon: str | None = None

    def validate(self) -> None:
        if self.retries < 0:
            raise ConfigError("retries must be >= 0")
        if self.concurrency < 1:
            raise ConfigError("concurrency must be >= 1")
        if self.multiplicity < 1:
            raise ConfigError("multiplicity must be >= 1")
        if self.examples_k < 1:
            raise ConfigError("examples-k must be >= 1")
        if not self.endpoint and not self.fallback:
            raise ConfigError("--fallback is required when no --endpoint is configured")
        if self.example_strategy not in ("first", "random"):
            raise ConfigError(f"unknown example strategy {self.example_strategy!r}")

    def settings(self) -> dict:
        """Everything that affects outputs; paths and secrets are left out of the hash."""
        skip = {"out_dir", "profile", "examples", "lexicon", "api_key_env"}
        return {f.name: getattr(self, f.name) for f in fields(self) if f.name not in skip}

    @property
    def hash(self) -> str:
        return config_hash(self.settings())

    def provenance(self) -> dict:
        return {"seed": self.seed, "config_hash": self.hash}

    def generation(self, lexicon=None) -> GenerationConfig:
        return GenerationConfig(
            master_seed=self.seed,
            examples_k=self.examples_k,
            example_strategy=self.example_strategy,
            multiplicity=self.multiplicity,
            retries=self.retries,
            fallback=self.fallback,
            concurrency=self.concurrency,
            lexicon=lexicon,
        )

    def client(self):
        if not self.endpoint:
            return None
        return HttpChatClient(
            self.endpoint,
            model=self.model,
            api_key_env=self.api_key_env,
            temperature=self.temperature,
            max_tokens=self.max_tokens,
            response_path=self.response_path,
            timeout=self.timeout,
        )


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(key: str, value):
    kind = _FIELD_TYPES[key]
    if value is None:
        return None
    if kind == "bool":
        if isinstance(value, str):
            return value.strip().lower() in ("1", "true", "yes", "on")
        return bool(value)
    if kind == "int":
        return int(value)
    if kind == "float":
        return float(value)
    return str(value)


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, then the config file, then explicit flags."""
    values: dict = {}
    if getattr(args, "config", None):
        try:
            data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a flat JSON object")
        for key, value in data.items():
            key = key.replace("-", "_")
            if key not in _FIELD_TYPES:
                raise ConfigError(f"unknown config key {key!r}")
            if isinstance(value, (dict, list)):
                raise ConfigError(f"config key {key!r} must be a scalar")
            values[key] = value
    for key in _FIELD_TYPES:
        if key in vars(args):
            values[key] = getattr(args, key)
    try:
        config = RunConfig(**{k: _coerce(k, v) for k, v in values.items()})
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config value: {exc}") from None
    config.validate()
    return config


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _shared() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    g = p.add_argument_group("shared options")
    g.add_argument("--seed", type=int, help="master seed for all randomness (default 0)")
    g.add_argument("--config", help="flat JSON file of option values; flags override it")
    g.add_argument("--out-dir", dest="out_dir", help="directory for output artifacts (default ./out)")
    g.add_argument(
        "--fallback", action=argparse.BooleanOptionalAction,
        help="use the rule-based corruptor when the model fails or no endpoint is set (default on)",
    )
    g.add_argument("--endpoint", help="chat-completion URL of the noise-generating model")
    g.add_argument("--api-key-env", dest="api_key_env", help="environment variable holding the bearer token")
    g.add_argument("--model", help="model name sent with each request")
    g.add_argument("--temperature", type=float, help="sampling temperature (default 0.7)")
    g.add_argument("--max-tokens", dest="max_tokens", type=int, help="response length bound (default 256)")
    g.add_argument("--response-path", dest="response_path", help="dotted JSON path of the response text")
    g.add_argument("--timeout", type=float, help="request timeout in seconds (default 60)")
    g.add_argument("--concurrency", type=int, help="maximum in-flight model requests (default 1)")
    g.add_argument("--retries", type=int, help="retries per utterance before fallback (default 2)")
    g.add_argument("--examples-k", dest="examples_k", type=int, help="number of in-context examples (default 4)")
    g.add_argument(
        "--example-strategy", dest="example_strategy", choices=("first", "random"),
        help="how in-context examples are picked (default random)",
    )
    g.add_argument("--multiplicity", type=int, help="synthetic dialogues per clean dialogue (default 1)")
    g.add_argument("--lexicon", help="entity term list, one term per line (default: bundled list)")
    g.add_argument("-v", "--verbose", action="store_true", default=False, help="debug logging")
    return p


def build_parser() -> argparse.ArgumentParser:
    shared = _shared()
    parser = _Parser(prog="asrnoise", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("profile", parents=[shared], help="estimate an ASR error profile from paired transcripts")
    p.add_argument("paired", help="paired corpus JSONL, or reference corpus when --hypothesis is given")
    p.add_argument("--hypothesis", help="hypothesis corpus joined to the reference on id")
    p.add_argument("--label", default="", help="source label stored in the profile (e.g. the ASR model)")
    p.add_argument("-o", "--output", help="profile path (default OUT_DIR/profile.json)")

    p = sub.add_parser("decorate", parents=[shared], help="turn paired utterances into tagged in-context examples")
    p.add_argument("paired")
    p.add_argument("--hypothesis")
    p.add_argument("-o", "--output", help="examples path (default OUT_DIR/examples.jsonl)")

    p = sub.add_parser("tag", parents=[shared], help="sample error plans and write tagged clean utterances")
    p.add_argument("clean", help="clean corpus JSONL")
    p.add_argument("--profile", default=argparse.SUPPRESS, help="profile JSON")

    p = sub.add_parser("generate", parents=[shared], help="generate a synthetic noisy corpus")
    p.add_argument("clean", help="clean corpus JSONL")
    p.add_argument("--profile", default=argparse.SUPPRESS, help="profile JSON")
    p.add_argument("--examples", default=argparse.SUPPRESS, help="decorated examples JSONL (required with --endpoint)")

    p = sub.add_parser("evaluate", parents=[shared], help="similarity matrices between ASR and synthetic corpora")
    p.add_argument("--reference", required=True, help="clean reference corpus JSONL")
    p.add_argument("--asr", action="append", required=True, metavar="LABEL=PATH", help="ASR corpus (repeatable)")
    p.add_argument(
        "--synthetic", action="append", default=[], metavar="LABEL=PATH", help="synthetic corpus (repeatable)"
    )
    p.add_argument("--metric", action="append", choices=METRICS, help="metric(s) to compute (default: all)")
    p.add_argument("--external-scores", help="JSONL of externally computed per-pair scores to merge")

    p = sub.add_parser("sweep", parents=[shared], help="realized noise and quality versus tag rate")
    p.add_argument("clean", help="clean corpus JSONL")
    p.add_argument("--profile", default=argparse.SUPPRESS, help="base profile JSON")
    p.add_argument("--examples", default=argparse.SUPPRESS, help="decorated examples JSONL")
    p.add_argument("--scales", default="0,0.5,1,1.5", help="comma-separated WER multipliers")
    return parser


def _out(config: RunConfig) -> Path:
    path = Path(config.out_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _labeled(items) -> dict[str, list[Dialogue]]:
    out = {}
    for item in items:
        if "=" not in item:
            raise ConfigError(f"expected LABEL=PATH, got {item!r}")
        label, path = item.split("=", 1)
        if label in out:
            raise ConfigError(f"duplicate corpus label {label!r}")
        out[label] = load_corpus(path)
    return out


def _need(value, flag: str):
    if not value:
        raise ConfigError(f"{flag} is required")
    return value


def load_examples(path) -> list[tuple]:
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                pairs.append((parse_tagged(rec["input"]), parse_tagged(rec["response"])))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise CorpusError(f"malformed example: {exc}", lineno, str(path)) from None
    return pairs


def cmd_profile(args, config: RunConfig) -> int:
    pairs = load_paired_corpus(args.paired, args.hypothesis)
    profile = estimate_profile(pairs, args.label)
    whole = count_errors([(r, Dialogue(h.id, (Turn("other", h.text),))) for r, h in pairs])
    path = Path(args.output) if args.output else _out(config) / "profile.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    save_profile(profile, path)
    record = json.loads(path.read_text(encoding="utf-8"))
    record["provenance"] = config.provenance()
    record["wer_whole_dialogue"] = whole.wer
    write_json(record, path)
    shares = " ".join(f"{k.value[0].upper()} {p:.3f}" for k, p in profile.conditional.items())
    print(f"{args.label or 'profile'}: WER {profile.wer:.4f} over {profile.token_count} tokens ({shares}) -> {path}")
    return EXIT_OK


def cmd_decorate(args, config: RunConfig) -> int:
    pairs = load_paired_corpus(args.paired, args.hypothesis)
    pool = []
    for ref, hyp in pairs:
        if len(ref.turns) != len(hyp.turns):
            continue
        for i, (r, h) in enumerate(zip(ref.turns, hyp.turns)):
            pool.append((ref.id, i, r, h))
    if config.examples_k > len(pool):
        raise CorpusError(f"insufficient pairs: {len(pool)} aligned utterances for {config.examples_k} examples")
    chosen = select_examples(pool, config.examples_k, config.example_strategy, config.seed)
    records = []
    for did, i, r, h in chosen:
        clean, noisy = decorate_example_pair(r, h)
        records.append(
            {
                "input": clean.render(),
                "response": noisy.render(),
                "deleted": [list(x) for x in clean.deleted_tokens],
                "source": {"id": did, "turn_index": i},
                "provenance": config.provenance(),
            }
        )
    path = Path(args.output) if args.output else _out(config) / "examples.jsonl"
    path.parent.mkdir(parents=True, exist_ok=True)
    dump_jsonl(records, path)
    print(f"wrote {len(records)} examples -> {path}")
    return EXIT_OK


def cmd_tag(args, config: RunConfig) -> int:
    clean = load_corpus(args.clean)
    profile = load_profile(_need(config.profile, "--profile"))
    records = []
    for d in clean:
        for i, turn in enumerate(d.turns):
            tokens = tokenize(turn.text)
            plan = sample_error_plan(tokens.tokens, profile, derive_seed(config.seed, d.id, i, 0))
            tagged = apply_plan(tokens, plan)
            records.append(
                {
                    "id": d.id,
                    "turn_index": i,
                    "speaker": turn.speaker,
                    "tagged": tagged.render(),
                    "deleted": [list(x) for x in tagged.deleted_tokens],
                    "plan": plan.to_dict(),
                    "provenance": config.provenance(),
                }
            )
    path = _out(config) / "tagged.jsonl"
    dump_jsonl(records, path)
    print(f"tagged {len(records)} utterances -> {path}")
    return EXIT_OK


def cmd_generate(args, config: RunConfig) -> int:
    clean = load_corpus(args.clean)
    profile = load_profile(_need(config.profile, "--profile"))
    examples = load_examples(config.examples) if config.examples else []
    lexicon = load_lexicon(config.lexicon)
    client = config.client()
    synthetic, records, summary = generate_corpus(clean, examples, profile, config.generation(lexicon), client)
    summary["config_hash"] = config.hash
    summary["run_config"] = config.settings()
    out = _out(config)
    save_corpus(synthetic, out / "synthetic.jsonl", meta=config.provenance())
    dump_jsonl(({**r.to_dict(), "provenance": config.provenance()} for r in records), out / "records.jsonl")
    write_json(summary, out / "summary.json")
    (out / "summary.txt").write_text(_summary_text(summary), encoding="utf-8")
    print(_summary_text(summary), end="")
    if client is not None and not config.fallback and summary["llm_attempts"] and (
        summary["transport_failures"] == summary["llm_attempts"]
    ):
        raise EndpointUnreachable(f"every request to {config.endpoint} failed")
    return EXIT_OK


def _summary_text(summary: dict) -> str:
    rows = [["dialogues", summary["dialogues"]], ["turns", summary["turns"]]]
    rows += [[f"verdict {k}", v] for k, v in summary["verdicts"].items()]
    rows.append(["target WER", summary["target_profile"]["wer"]])
    if "realized" in summary:
        rows.append(["realized WER", summary["realized"]["wer"]])
        rows.append(["realized WER (whole dialogue)", summary["realized"]["wer_whole_dialogue"]])
    rows.append(["seed", summary["master_seed"]])
    rows.append(["config hash", summary["config_hash"]])
    return format_table(["quantity", "value"], rows)


def cmd_evaluate(args, config: RunConfig) -> int:
    reference = load_corpus(args.reference)
    asr = _labeled(args.asr)
    synthetic = _labeled(args.synthetic)
    lexicon = load_lexicon(config.lexicon)
    out = _out(config)
    report = {"provenance": config.provenance(), "matrices": {}}
    text = []
    for metric in args.metric or METRICS:
        matrix = similarity_matrix(synthetic, asr, reference, metric, lexicon)
        report["matrices"][metric] = {**matrix.to_dict(), "diagonal_dominant": matrix.diagonal_dominant()}
        (out / f"similarity_{metric}.csv").write_text(matrix.to_csv(), encoding="utf-8")
        rows = [[label] + row for label, row in zip(matrix.row_labels, matrix.cells)]
        text.append(f"{metric} ({'higher' if matrix.higher_is_better else 'lower'} is more similar)\n")
        text.append(format_table(["asr \\ synthetic"] + matrix.col_labels, rows))
        text.append("\n")
    if args.external_scores:
        report["external"] = merge_external_scores(args.external_scores)
    write_json(report, out / "evaluation.json")
    (out / "evaluation.txt").write_text("".join(text), encoding="utf-8")
    print("".join(text), end="")
    return EXIT_OK


def cmd_sweep(args, config: RunConfig) -> int:
    clean = load_corpus(args.clean)
    profile = load_profile(_need(config.profile, "--profile"))
    try:
        scales = [float(s) for s in args.scales.split(",") if s.strip()]
    except ValueError:
        raise ConfigError(f"invalid --scales {args.scales!r}") from None
    if not scales or any(s < 0 for s in scales):
        raise ConfigError("--scales must be nonnegative numbers")
    examples = load_examples(config.examples) if config.examples else []
    lexicon = load_lexicon(config.lexicon)
    rows = noise_sweep(clean, profile, scales, config.generation(lexicon), examples, config.client(), lexicon)
    out = _out(config)
    write_json({"provenance": config.provenance(), "base_profile": profile.to_dict(),
                "rows": [r.to_dict() for r in rows]}, out / "sweep.json")
    table = format_table(
        ["scale", "wer param", "realized WER", "Rouge-L F", "entity F1"],
        [[r.scale, r.wer_parameter, r.realized_wer, r.rouge_l_f1, r.entity_f1] for r in rows],
    )
    (out / "sweep.txt").write_text(table, encoding="utf-8")
    print(table, end="")
    return EXIT_OK


COMMANDS = {
    "profile": cmd_profile,
    "decorate": cmd_decorate,
    "tag": cmd_tag,
    "generate": cmd_generate,
    "evaluate": cmd_evaluate,
    "sweep": cmd_sweep,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if getattr(args, "verbose", False) else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = resolve_config(args)
        return COMMANDS[args.command](args, config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EndpointUnreachable as exc:
        print(f"endpoint error: {exc}", file=sys.stderr)
        return EXIT_ENDPOINT
    except (CorpusError, ProfileError, TagSyntaxError, IdMismatchError, LexiconError, EmptyReferenceError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
