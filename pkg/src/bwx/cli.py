"""Command-line interface.

Subcommands: ``prepare`` (make a band-limited companion file), ``sr`` (run
the reconstruction pipeline), ``eval`` (score a truth/estimate pair),
``phase-study`` (oracle-magnitude phase comparison over a clip set) and
``spec export``/``spec import`` for BWXSPEC spectrogram files.

Exit codes: 0 success, 1 usage error, 2 I/O error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .dsp import BandLayout, ComplexSpectrogram, StftConfig, istft, stft
from .errors import BwxError, FileFormatError, NumericalError, PipelineError
from .magnitude import BandReplicationSpec, ImportSpec, OracleSpec
from .phase import GlaConfig, GlaInit
from .pipeline import (
    FlipPhaseSpec,
    GlaPhaseSpec,
    ReferencePhaseSpec,
    ResidualBand,
    SrJobSpec,
    evaluate_batch,
    run_phase_study,
    super_resolve,
)
from .prep import LowpassMode, LowpassSpec, make_pair
from .specio import SpecKind, spec_read, spec_write
from .wavio import SampleDepth, wav_read, wav_write

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_NUMERICAL = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); the contract wants 1
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="bwx", description="Music bandwidth extension toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("prepare", help="write a low-passed companion file")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output", required=True)
    p.add_argument("--cutoff-hz", type=float, default=4000.0)
    p.add_argument("--filter", choices=["brickwall", "fir"], default="brickwall")
    p.add_argument("--taps", type=int, default=511)

    p = sub.add_parser("sr", help="reconstruct high-band content")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output", required=True)
    p.add_argument("--mag", required=True, help="oracle:<path> | sbr | import:<path>")
    p.add_argument("--phase", required=True, help="flip | gla | ref:<path>")
    p.add_argument("--gla-iters", type=int, default=100)
    p.add_argument("--gla-init", choices=["zero", "flip"], default="zero")
    p.add_argument("--frame", type=int, default=2048)
    p.add_argument("--hop", type=int, default=256)
    p.add_argument("--lo-hz", type=float, default=4000.0)
    p.add_argument("--hi-hz", type=float, default=8000.0)
    p.add_argument("--residual", choices=["pass", "zero"], default="pass")
    p.add_argument("--trace", default=None, help="write the GLA residual trace CSV here")

    p = sub.add_parser("eval", help="score an estimate against ground truth")
    p.add_argument("--truth", required=True)
    p.add_argument("--est", required=True)
    p.add_argument("--lo-hz", type=float, default=4000.0)
    p.add_argument("--hi-hz", type=float, default=8000.0)
    p.add_argument("--out", dest="output", required=True)

    p = sub.add_parser("phase-study", help="compare phase strategies with oracle magnitudes")
    p.add_argument("--clips", required=True, help="directory of wav files or comma-separated list")
    p.add_argument("--out", dest="output", required=True)
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("spec", help="BWXSPEC spectrogram files")
    spec_sub = p.add_subparsers(dest="spec_command", required=True, parser_class=_Parser)

    pe = spec_sub.add_parser("export", help="write a wav's spectrogram as BWXSPEC")
    pe.add_argument("--in", dest="input", required=True)
    pe.add_argument("--out", dest="output", required=True)
    pe.add_argument("--kind", choices=["magnitude", "complex"], default="magnitude")
    pe.add_argument("--frame", type=int, default=2048)
    pe.add_argument("--hop", type=int, default=256)

    pi = spec_sub.add_parser("import", help="resynthesise a complex BWXSPEC file as wav")
    pi.add_argument("--in", dest="input", required=True)
    pi.add_argument("--out", dest="output", required=True)
    return parser


def _parse_mag(text: str):
    if text == "sbr":
        return BandReplicationSpec()
    if text.startswith("oracle:") and len(text) > 7:
        return OracleSpec(text[7:])
    if text.startswith("import:") and len(text) > 7:
        return ImportSpec(text[7:])
    raise UsageError(f"--mag must be oracle:<path>, sbr or import:<path>, got {text!r}")


def _parse_phase(text: str, layout: BandLayout, iters: int, init: str):
    if text == "flip":
        return FlipPhaseSpec()
    if text == "gla":
        gla_init = GlaInit.ZERO_PHASE if init == "zero" else GlaInit.FLIP_PHASE
        return GlaPhaseSpec(GlaConfig(layout=layout, iterations=iters, init=gla_init))
    if text.startswith("ref:") and len(text) > 4:
        return ReferencePhaseSpec(text[4:])
    raise UsageError(f"--phase must be flip, gla or ref:<path>, got {text!r}")


def _collect_clips(arg: str) -> list[str]:
    path = Path(arg)
    if path.is_dir():
        clips = sorted(str(p) for p in path.glob("*.wav"))
        if not clips:
            raise UsageError(f"no .wav files in directory {arg}")
        return clips
    return [part for part in arg.split(",") if part]


def _cmd_prepare(args) -> int:
    mode = LowpassMode.BRICKWALL if args.filter == "brickwall" else LowpassMode.FIR_SINC
    spec = LowpassSpec(mode=mode, cutoff_hz=args.cutoff_hz, taps=args.taps)
    make_pair(args.input, args.output, spec)
    print(f"wrote {args.output}")
    return EXIT_OK


def _cmd_sr(args) -> int:
    cfg = StftConfig(frame_len=args.frame, hop=args.hop)
    sample_rate = wav_read(args.input)[0][0].sample_rate
    layout = BandLayout.from_frequencies(args.lo_hz, args.hi_hz, sample_rate, cfg)
    phase = _parse_phase(args.phase, layout, args.gla_iters, args.gla_init)
    if args.trace is not None and not isinstance(phase, GlaPhaseSpec):
        raise UsageError("--trace is only meaningful with --phase gla")
    job = SrJobSpec(
        input_path=args.input,
        output_path=args.output,
        predictor=_parse_mag(args.mag),
        phase=phase,
        stft=cfg,
        layout=layout,
        residual_band=ResidualBand.PASSTHROUGH if args.residual == "pass" else ResidualBand.ZERO,
    )
    super_resolve(job, trace_path=args.trace)
    print(f"wrote {args.output}")
    return EXIT_OK


def _cmd_eval(args) -> int:
    cfg = StftConfig()
    sample_rate = wav_read(args.truth)[0][0].sample_rate
    layout = BandLayout.from_frequencies(args.lo_hz, args.hi_hz, sample_rate, cfg)
    rows = evaluate_batch([(args.truth, args.est)], layout, args.output, cfg)
    for row in rows:
        print(row)
    return EXIT_OK


def _cmd_phase_study(args) -> int:
    clips = _collect_clips(args.clips)
    result = run_phase_study(clips, args.output, jobs=args.jobs)
    for method, report in result.means.items():
        print(
            f"mean {method}: lsd_hf={report.lsd_hf:.4f} dB "
            f"lsd_full={report.lsd_full:.4f} dB snr={report.snr:.4f} dB"
        )
    if result.snr_anomaly:
        print("flag: LR baseline SNR >= GLA SNR (time-domain SNR undervalues this task)")
    return EXIT_OK


def _cmd_spec(args) -> int:
    if args.spec_command == "export":
        cfg = StftConfig(frame_len=args.frame, hop=args.hop)
        channels, _ = wav_read(args.input)
        spectrogram = stft(channels[0], cfg)
        if args.kind == "magnitude":
            spec_write(
                args.output,
                np.abs(spectrogram.data),
                SpecKind.MAGNITUDE,
                spectrogram.sample_rate,
                cfg.frame_len,
                cfg.hop,
            )
        else:
            spec_write(
                args.output,
                spectrogram.data,
                SpecKind.COMPLEX,
                spectrogram.sample_rate,
                cfg.frame_len,
                cfg.hop,
            )
        print(f"wrote {args.output}")
        return EXIT_OK

    data, header = spec_read(args.input)
    print(
        f"{args.input}: {header.frames}x{header.bins} {header.kind.name.lower()} "
        f"@ {header.sample_rate} Hz, frame {header.frame_len}, hop {header.hop}"
    )
    if header.kind is not SpecKind.COMPLEX:
        raise UsageError("only complex BWXSPEC files can be resynthesised to wav")
    cfg = StftConfig(frame_len=header.frame_len, hop=header.hop)
    wave = istft(
        ComplexSpectrogram(data.astype(np.complex128), cfg, header.sample_rate)
    )
    wav_write(args.output, wave, SampleDepth.FLOAT32)
    print(f"wrote {args.output}")
    return EXIT_OK


_COMMANDS = {
    "prepare": _cmd_prepare,
    "sr": _cmd_sr,
    "eval": _cmd_eval,
    "phase-study": _cmd_phase_study,
    "spec": _cmd_spec,
}


def _classify(exc: BaseException) -> int:
    if isinstance(exc, PipelineError):
        return _classify(exc.cause)
    if isinstance(exc, NumericalError):
        return EXIT_NUMERICAL
    if isinstance(exc, (FileFormatError, OSError)):
        return EXIT_IO
    return EXIT_USAGE


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BwxError, ValueError, OSError) as exc:
        code = _classify(exc)
        label = {EXIT_IO: "i/o error", EXIT_NUMERICAL: "numerical error"}.get(code, "error")
        print(f"{label}: {exc}", file=sys.stderr)
        return code


def entry() -> None:
    sys.exit(main())
