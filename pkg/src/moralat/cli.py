"""Batch command-line front-end.

Subcommands: decode, score, f0-label, gen-fixture, dump-lattice.
Exit codes: 0 success, 1 decode failure, 2 input error.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .ctc import PosteriorMatrix, load_posterior_file
from .errors import EmptyLatticeError, FormatError, MoralatError, TokenizeError
from .f0 import DEFAULT_FRAME_RATE, DEFAULT_WINDOW, classify_utterance, load_f0_track
from .fixtures import write_fixture_set
from .fst_io import save_fst
from .fusion import (
    DEFAULT_MIX,
    DEFAULT_PRUNE,
    DecodeConfig,
    FusionTrace,
    run_fusion,
    shortest_path,
    text_lattice,
)
from .lexicon import LexiconFst, build_lexicon, load_dict_entries
from .metrics import cer, corpus_aggregate, mler
from .symbols import SymbolTable
from .tokens import MoraToken, render_pa, tokenize_pa

EXIT_OK = 0
EXIT_DECODE = 1
EXIT_INPUT = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="moralat",
        description="Lattice-fusion decoding and scoring for pitch-accent mora "
        "transcription.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    decode = sub.add_parser("decode", help="decode posterior files to mora lines")
    src = decode.add_mutually_exclusive_group(required=True)
    src.add_argument("--pa-posteriors", metavar="FILE", help="single-utterance grid")
    src.add_argument("--manifest", metavar="FILE", help="id<TAB>pa_file<TAB>tt_file")
    tt = decode.add_mutually_exclusive_group()
    tt.add_argument("--tt-posteriors", metavar="FILE")
    tt.add_argument("--tt-text", metavar="FILE", help="plain transcript, single path")
    decode.add_argument("--lexicon", metavar="FILE")
    decode.add_argument("--mode", choices=("pa-only", "cond", "fuse"), default="fuse")
    decode.add_argument("--mix", type=float, default=DEFAULT_MIX)
    decode.add_argument("--prune", type=float, default=DEFAULT_PRUNE)
    decode.add_argument("--dump-lattice", metavar="DIR")
    decode.add_argument("--jobs", type=int, default=1)
    decode.add_argument("--keep-going", action="store_true")
    decode.set_defaults(func=cmd_decode)

    score = sub.add_parser("score", help="score line-aligned reference/hypothesis files")
    score.add_argument("--ref", required=True, metavar="FILE")
    score.add_argument("--hyp", required=True, metavar="FILE")
    score.add_argument(
        "--metric", choices=("mler", "mler-noaccent", "cer"), default="mler"
    )
    score.add_argument("--figures", metavar="DIR", help="render report figures here")
    score.set_defaults(func=cmd_score)

    f0label = sub.add_parser("f0-label", help="emit one pitch-class id per frame")
    f0label.add_argument("--track", required=True, metavar="FILE")
    f0label.add_argument("--frame-rate", type=float, default=DEFAULT_FRAME_RATE)
    f0label.add_argument("--window", type=float, default=DEFAULT_WINDOW)
    f0label.add_argument("--figure", metavar="FILE", help="render contour + classes")
    f0label.set_defaults(func=cmd_f0_label)

    gen = sub.add_parser("gen-fixture", help="write seeded synthetic test inputs")
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--out", required=True, metavar="DIR")
    gen.add_argument("--frames", type=int, default=4)
    gen.add_argument("--labels", type=int, default=3)
    gen.add_argument("--utterances", type=int, default=3)
    gen.set_defaults(func=cmd_gen_fixture)

    dump = sub.add_parser("dump-lattice", help="write every pipeline lattice as text")
    dump.add_argument("--pa-posteriors", required=True, metavar="FILE")
    tt2 = dump.add_mutually_exclusive_group()
    tt2.add_argument("--tt-posteriors", metavar="FILE")
    tt2.add_argument("--tt-text", metavar="FILE")
    dump.add_argument("--lexicon", metavar="FILE")
    dump.add_argument("--mix", type=float, default=DEFAULT_MIX)
    dump.add_argument("--prune", type=float, default=DEFAULT_PRUNE)
    dump.add_argument("--out", required=True, metavar="DIR")
    dump.set_defaults(func=cmd_dump_lattice)
    return parser


def _load_lexicon(
    path: str | None, isyms: SymbolTable | None, osyms: SymbolTable
) -> LexiconFst | None:
    if path is None:
        return None
    entries = load_dict_entries(path)
    if not entries:
        raise FormatError("no usable dictionary entries", path)
    return build_lexicon(entries, isyms=isyms, osyms=osyms)


def _decode_one(
    mode: str,
    y_pa: PosteriorMatrix,
    y_tt: PosteriorMatrix | None,
    tt_text: str | None,
    lexicon: LexiconFst | None,
    cfg: DecodeConfig,
    dump_dir: Path | None,
    tt_syms: SymbolTable | None,
) -> str:
    tt_lat = None
    if tt_text is not None and lexicon is not None:
        tt_lat = text_lattice(tt_text, lexicon.isyms)
    elif tt_text is not None:
        tt_lat = text_lattice(tt_text, tt_syms if tt_syms is not None else SymbolTable())
    trace = run_fusion(y_pa, lexicon, cfg, y_tt=y_tt, tt_lattice=tt_lat)
    if dump_dir is not None:
        _dump_trace(trace, dump_dir, y_pa, y_tt, lexicon)
    if mode == "pa-only":
        lattice = trace.pa_lattice
    elif mode == "cond":
        if trace.reweighted is None or trace.reweighted.is_empty():
            raise EmptyLatticeError("explicit conditioning found no dictionary path")
        lattice = trace.reweighted
    else:
        lattice = trace.fused
    ids, _ = shortest_path(lattice)
    return render_pa([MoraToken.parse(y_pa.labels.symbol(i)) for i in ids])


def _dump_trace(
    trace: FusionTrace,
    out_dir: Path,
    y_pa: PosteriorMatrix,
    y_tt: PosteriorMatrix | None,
    lexicon: LexiconFst | None,
) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    pa_syms = y_pa.labels
    tt_syms = y_tt.labels if y_tt is not None else (lexicon.isyms if lexicon else None)
    pron_syms = lexicon.osyms if lexicon is not None else pa_syms
    stages = [
        ("pa_confnet", trace.pa_confnet, pa_syms),
        ("tt_confnet", trace.tt_confnet, tt_syms),
        ("pa_lattice", trace.pa_lattice, pa_syms),
        ("tt_lattice", trace.tt_lattice, tt_syms),
        ("pron_lattice", trace.pron_lattice, pron_syms),
        ("reweighted_pron", trace.reweighted, pa_syms),
        ("fused", trace.fused, pa_syms),
    ]
    for name, fst, syms in stages:
        if fst is None:
            continue
        save_fst(fst, out_dir / f"{name}.fst.txt", isyms=syms, osyms=syms)
    pa_syms.write(out_dir / "pa.syms")
    if tt_syms is not None:
        tt_syms.write(out_dir / "tt.syms")


def _read_manifest(path: str) -> list[tuple[str, Path, Path | None]]:
    base = Path(path).parent
    rows: list[tuple[str, Path, Path | None]] = []
    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, 1):
            line = raw.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) not in (2, 3):
                raise FormatError(
                    "expected 'id<TAB>pa_file[<TAB>tt_file]'", path, lineno
                )
            utt_id, pa_file = fields[0], base / fields[1]
            tt_file = None
            if len(fields) == 3 and fields[2] not in ("", "-"):
                tt_file = base / fields[2]
            rows.append((utt_id, pa_file, tt_file))
    if not rows:
        raise FormatError("empty manifest", path)
    return rows


def cmd_decode(args) -> int:
    cfg = DecodeConfig(mix=args.mix, prune_threshold=args.prune)
    if args.mode in ("cond", "fuse") and args.manifest is None:
        if args.tt_posteriors is None and args.tt_text is None:
            raise FormatError(f"mode {args.mode} needs --tt-posteriors or --tt-text")
    if args.mode in ("cond", "fuse") and args.lexicon is None:
        raise FormatError(f"mode {args.mode} needs --lexicon")
    dump_dir = Path(args.dump_lattice) if args.dump_lattice else None

    if args.pa_posteriors:
        y_pa = load_posterior_file(args.pa_posteriors)
        y_tt = load_posterior_file(args.tt_posteriors) if args.tt_posteriors else None
        tt_text = None
        if args.tt_text:
            tt_text = Path(args.tt_text).read_text(encoding="utf-8").strip()
        lexicon = _load_lexicon(
            args.lexicon, y_tt.labels if y_tt is not None else None, y_pa.labels
        )
        line = _decode_one(
            args.mode, y_pa, y_tt, tt_text, lexicon, cfg, dump_dir, None
        )
        print(line)
        return EXIT_OK

    rows = _read_manifest(args.manifest)

    def work(row):
        utt_id, pa_file, tt_file = row
        y_pa = load_posterior_file(pa_file)
        y_tt = load_posterior_file(tt_file) if tt_file is not None else None
        lexicon = _load_lexicon(
            args.lexicon, y_tt.labels if y_tt is not None else None, y_pa.labels
        )
        utt_dump = dump_dir / utt_id if dump_dir is not None else None
        return _decode_one(args.mode, y_pa, y_tt, None, lexicon, cfg, utt_dump, None)

    def safe(row):
        try:
            return work(row)
        except Exception as exc:  # collected per utterance, reported below
            return exc

    jobs = max(1, args.jobs)
    if jobs == 1:
        produced = [safe(row) for row in rows]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            produced = list(pool.map(safe, rows))

    failures = [
        (utt_id, result)
        for (utt_id, _, _), result in zip(rows, produced)
        if isinstance(result, Exception)
    ]
    if failures and not args.keep_going:
        raise failures[0][1]
    # outputs buffered and emitted in input order
    for (utt_id, _, _), result in zip(rows, produced):
        if isinstance(result, Exception):
            print(f"{utt_id}\t{result}", file=sys.stderr)
        else:
            print(f"{utt_id}\t{result}")
    return EXIT_OK


def cmd_score(args) -> int:
    ref_lines = Path(args.ref).read_text(encoding="utf-8").splitlines()
    hyp_lines = Path(args.hyp).read_text(encoding="utf-8").splitlines()
    if len(ref_lines) != len(hyp_lines):
        raise FormatError(
            f"line count mismatch: {len(ref_lines)} references, {len(hyp_lines)} hypotheses"
        )
    if not ref_lines:
        raise FormatError("empty reference file", args.ref)
    results = []
    for lineno, (ref, hyp) in enumerate(zip(ref_lines, hyp_lines), 1):
        try:
            if args.metric == "cer":
                results.append(cer(ref, hyp))
            else:
                results.append(
                    mler(
                        tokenize_pa(ref),
                        tokenize_pa(hyp),
                        count_accent=args.metric == "mler",
                    )
                )
        except (TokenizeError, ValueError) as exc:
            raise FormatError(str(exc), args.ref, lineno) from None
    print("utt\tsub\tins\tdel\tref_len\trate")
    for i, r in enumerate(results, 1):
        print(
            f"{i}\t{r.substitutions}\t{r.insertions}\t{r.deletions}\t"
            f"{r.ref_len}\t{r.error_rate:.6f}"
        )
    total_sub = sum(r.substitutions for r in results)
    total_ins = sum(r.insertions for r in results)
    total_del = sum(r.deletions for r in results)
    total_len = sum(r.ref_len for r in results)
    print(
        f"ALL\t{total_sub}\t{total_ins}\t{total_del}\t{total_len}\t"
        f"{corpus_aggregate(results):.6f}"
    )
    if args.figures:
        from .report import render_score_figures

        for path in render_score_figures(results, args.figures):
            print(f"wrote {path}", file=sys.stderr)
    return EXIT_OK


def cmd_f0_label(args) -> int:
    track = load_f0_track(args.track)
    if args.frame_rate <= 0:
        raise FormatError("--frame-rate must be positive")
    classes = classify_utterance(track, args.frame_rate, args.window)
    for c in classes:
        print(c)
    if args.figure:
        from .report import render_f0_figure

        path = render_f0_figure(track, classes, args.frame_rate, args.figure)
        print(f"wrote {path}", file=sys.stderr)
    return EXIT_OK


def cmd_gen_fixture(args) -> int:
    manifest = write_fixture_set(
        args.out,
        seed=args.seed,
        frames=args.frames,
        labels=args.labels,
        utterances=args.utterances,
    )
    print(manifest)
    return EXIT_OK


def cmd_dump_lattice(args) -> int:
    y_pa = load_posterior_file(args.pa_posteriors)
    y_tt = load_posterior_file(args.tt_posteriors) if args.tt_posteriors else None
    tt_text = None
    if args.tt_text:
        tt_text = Path(args.tt_text).read_text(encoding="utf-8").strip()
    lexicon = _load_lexicon(
        args.lexicon, y_tt.labels if y_tt is not None else None, y_pa.labels
    )
    cfg = DecodeConfig(mix=args.mix, prune_threshold=args.prune)
    tt_lat = None
    if tt_text is not None:
        syms = lexicon.isyms if lexicon is not None else SymbolTable()
        tt_lat = text_lattice(tt_text, syms)
    trace = run_fusion(y_pa, lexicon, cfg, y_tt=y_tt, tt_lattice=tt_lat)
    _dump_trace(trace, Path(args.out), y_pa, y_tt, lexicon)
    print(args.out)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FormatError, TokenizeError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"moralat: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except MoralatError as exc:
        print(f"moralat: decode error: {exc}", file=sys.stderr)
        return EXIT_DECODE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
