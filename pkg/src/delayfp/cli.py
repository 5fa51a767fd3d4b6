"""Command line interface: ``delayfp <command> ...``."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import fields
from pathlib import Path

from .assignment import SchemeParams
from .attacks import collude_average, collude_minmax, crop, time_shift
from .audio_io import Signal, read_wav, write_wav
from .codebook import DEFAULT_EPSILON, Codebook, generate_codebook
from .detector import ThresholdPolicy, detect
from .embedder import SCHEMES, EmbedSpec, embed_stream
from .harness import ExperimentConfig, emit_report, run_experiment

log = logging.getLogger("delayfp")

COLLUSIONS = ("average", "min", "max", "minmax-midpoint")


def _scheme_args(p):
    p.add_argument("--scheme", choices=SCHEMES, default="improved")
    p.add_argument("-P", "--users-per-group", type=int, default=4)
    p.add_argument("--delta-d", type=int, default=20, help="delay spacing in samples")
    p.add_argument("--alpha", type=float, default=0.05)


def _params(args, codebook: Codebook) -> SchemeParams:
    return SchemeParams(codebook.M, args.users_per_group, codebook.n, args.delta_d, args.alpha)


def cmd_codebook_gen(args):
    cb = generate_codebook(args.groups, args.length, args.seed, args.epsilon)
    cb.save(args.output)
    log.info("wrote %d codes (n=%d, sync delay %d) to %s", cb.M, cb.n, cb.sync.base_delay, args.output)


def cmd_embed(args):
    cb = Codebook.load(args.codebook)
    sig = read_wav(args.input, mixdown=args.mixdown)
    spec = EmbedSpec(args.user, args.scheme, _params(args, cb), cb)
    write_wav(Signal(embed_stream(sig.samples, spec), sig.sample_rate), args.output)


def cmd_attack(args):
    sigs = [read_wav(p) for p in args.inputs]
    rate = sigs[0].sample_rate
    if args.kind in ("crop", "shift"):
        if len(sigs) != 1:
            raise SystemExit(f"{args.kind} takes exactly one input file")
        fn = crop if args.kind == "crop" else time_shift
        out = fn(sigs[0].samples, args.amount, args.offset)
    elif args.kind == "average":
        out = collude_average([s.samples for s in sigs])
    else:
        out = collude_minmax([s.samples for s in sigs], args.kind)
    write_wav(Signal(out, rate), args.output)


def cmd_detect(args):
    cb = Codebook.load(args.codebook)
    sig = read_wav(args.input, mixdown=args.mixdown)
    policy = ThresholdPolicy(args.kappa, args.floor_abs, args.tol)
    report = detect(sig.samples, cb, _params(args, cb), args.scheme, policy)
    text = report.to_json() + "\n" if args.format == "json" else "\n".join(report.rows()) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    log.info("traced users: %s", report.traced_users or "none")


def cmd_experiment_run(args):
    overrides = {f.name: getattr(args, f.name) for f in fields(ExperimentConfig)
                 if getattr(args, f.name) is not None}
    if args.config:
        base = ExperimentConfig.from_file(args.config).to_dict()
        base.update(overrides)
        config = ExperimentConfig.from_mapping(base)
    else:
        config = ExperimentConfig.from_mapping(overrides)
    report = run_experiment(config)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    emit_report(report, out / "rows.csv", "rows")
    emit_report(report, out / "summary.json", "structured")
    for scheme, rate in report.rates.items():
        print(f"{scheme}: correct detection rate {rate:.2f} ({config.metric})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="delayfp", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    cb = sub.add_parser("codebook", help="codebook management")
    cb_sub = cb.add_subparsers(dest="action", required=True)
    gen = cb_sub.add_parser("gen", help="generate a codebook file")
    gen.add_argument("-M", "--groups", type=int, default=16)
    gen.add_argument("-n", "--length", type=int, default=1024)
    gen.add_argument("--seed", type=int, default=42)
    gen.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    gen.add_argument("-o", "--output", required=True)
    gen.set_defaults(func=cmd_codebook_gen)

    emb = sub.add_parser("embed", help="fingerprint a WAV file for one user")
    emb.add_argument("--codebook", required=True)
    emb.add_argument("--user", type=int, required=True)
    _scheme_args(emb)
    emb.add_argument("--mixdown", action="store_true", help="average multichannel input")
    emb.add_argument("input")
    emb.add_argument("output")
    emb.set_defaults(func=cmd_embed)

    att = sub.add_parser("attack", help="desynchronize or collude WAV copies")
    att.add_argument("--kind", choices=("crop", "shift") + COLLUSIONS, required=True)
    att.add_argument("--amount", type=int, default=1, help="samples cropped or inserted")
    att.add_argument("--offset", type=int, default=0, help="attack position (0 = head)")
    att.add_argument("-o", "--output", required=True)
    att.add_argument("inputs", nargs="+")
    att.set_defaults(func=cmd_attack)

    det = sub.add_parser("detect", help="trace users in a WAV file")
    det.add_argument("--codebook", required=True)
    _scheme_args(det)
    det.add_argument("--kappa", type=float, default=5.0)
    det.add_argument("--floor-abs", type=float, default=0.15)
    det.add_argument("--tol", type=int, default=2)
    det.add_argument("--format", choices=("rows", "json"), default="rows")
    det.add_argument("--mixdown", action="store_true")
    det.add_argument("-o", "--output")
    det.add_argument("input")
    det.set_defaults(func=cmd_detect)

    exp = sub.add_parser("experiment", help="detection-rate experiments")
    exp_sub = exp.add_subparsers(dest="action", required=True)
    run = exp_sub.add_parser("run", help="run one experiment configuration")
    run.add_argument("--config", help="INI file with an [experiment] section")
    run.add_argument("--out-dir", default="results")
    for f in fields(ExperimentConfig):
        run.add_argument("--" + f.name.replace("_", "-"), dest=f.name, default=None, metavar="VALUE")
    run.set_defaults(func=cmd_experiment_run)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    args.func(args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
