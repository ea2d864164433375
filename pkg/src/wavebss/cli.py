"""Command-line front end: ``wavebss {mix,separate,evaluate,demo}``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .corruption import NoiseSpec, add_gaussian_noise, add_salt_pepper, stage_seed
from .infomax import InfomaxParams
from .metrics import global_matrix, match_sources, performance_index, snr_db
from .model import (DimensionError, MixingModel, NumericalError, images_to_signals, mix,
                    signals_to_images)
from .pgmio import FormatError, read_matrix_csv, read_pgm, write_matrix_csv, write_pgm
from .pipeline import PipelineConfig, separate
from .textures import texture_pair
from .wavelet import WaveletSpec

SCHEMA_VERSION = 1
DEFAULT_MIXING = np.array([[1.0, 0.4], [0.4, 1.0]])
EXPERIMENTS = {
    "noise-free": "none",
    "awgn15": "gaussian:15",
    "gauss-8-sp40": "both:-8:0.4",
}

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class _Artifacts:
    """Collects written files; removes them if the command fails midway."""

    def __init__(self, out_dir: str):
        self.out_dir = out_dir
        self.written: list = []

    def path(self, name: str) -> str:
        self.written.append(name)
        return os.path.join(self.out_dir, name)

    def rollback(self):
        for name in self.written:
            try:
                os.remove(os.path.join(self.out_dir, name))
            except FileNotFoundError:
                pass


# -- helpers -----------------------------------------------------------------

def load_mixing(value: str) -> np.ndarray:
    """CSV path, or inline rows such as ``"1,0.4;0.4,1"``."""
    if os.path.exists(value):
        return MixingModel(read_matrix_csv(value)).A
    if "," in value or ";" in value:
        try:
            rows = [[float(v) for v in row.split(",")] for row in value.split(";")]
        except ValueError:
            raise ValueError(f"cannot parse inline mixing matrix {value!r}") from None
        return MixingModel(np.array(rows)).A
    raise FileNotFoundError(value)


def load_images(paths: Sequence[str]) -> list:
    for p in paths:
        if not os.path.exists(p):
            raise FileNotFoundError(p)
    return [read_pgm(p) for p in paths]


def crop_for_depth(images: list, depth: int) -> list:
    """Crop rows from the bottom (top-left anchored) until ``T`` is divisible by ``2^depth``."""
    step = 2 ** depth
    out = []
    for im in images:
        h = im.height
        while h > 0 and (im.width * h) % step:
            h -= 1
        if h == 0:
            raise DimensionError(f"cannot crop {im.width}x{im.height} to a multiple of {step} pixels")
        out.append(type(im).from_array(im.pixels[:h]) if h != im.height else im)
    return out


def make_mixtures(images: list, A: np.ndarray, noise: NoiseSpec, seed: int):
    """Mix, corrupt and render mixture images. Returns ``(clean, noisy_or_None)``.

    Gaussian noise is added to the real-valued mixtures; salt-and-pepper to the
    rendered mixture images. Rendering shares one affine rescale across all
    channels so the effective mixing matrix is a scalar multiple of ``A``.
    """
    S = images_to_signals(images)
    X = mix(S, A)
    w, h = images[0].width, images[0].height
    clean = signals_to_images(X, w, h, joint=True)
    if noise.kind == "none":
        return clean, None
    Xn = X
    if noise.gaussian:
        Xn = add_gaussian_noise(X, noise.snr_db, stage_seed(seed, "noise.gaussian"))
    noisy = signals_to_images(Xn, w, h, joint=True)
    if noise.salt_pepper:
        noisy = [add_salt_pepper(im, noise.density, stage_seed(seed, f"noise.salt_pepper.{i}"))
                 for i, im in enumerate(noisy)]
    return clean, noisy


def _json_dump(path: str, obj: dict) -> None:
    with open(path, "w", newline="\n") as f:
        json.dump(obj, f, indent=2)
        f.write("\n")


def _matching_dict(m) -> Optional[dict]:
    if m is None:
        return None
    return {"permutation": list(m.permutation), "signs": list(m.signs),
            "correlations": list(m.correlations)}


# -- commands ----------------------------------------------------------------

def cmd_mix(images: Sequence[str], mixing: Optional[str], out: str,
            noise: str = "none", seed: int = 0) -> dict:
    imgs = load_images(images)
    A = load_mixing(mixing) if mixing else DEFAULT_MIXING
    spec = NoiseSpec.parse(noise, seed=seed)
    clean, noisy = make_mixtures(imgs, A, spec, seed)
    os.makedirs(out, exist_ok=True)
    arts = _Artifacts(out)
    try:
        for i, im in enumerate(clean):
            write_pgm(arts.path(f"mixture_{i}.pgm"), im)
        for i, im in enumerate(noisy or []):
            write_pgm(arts.path(f"noisy_{i}.pgm"), im)
        write_matrix_csv(arts.path("A.csv"), A)
    except Exception:
        arts.rollback()
        raise
    return {"mixing": A.tolist(), "noise": spec.to_dict(), "seed": seed,
            "artifacts": list(arts.written)}


def cmd_separate(mixtures: Sequence[str], out: str, mixing: Optional[str] = None,
                 sources: Optional[Sequence[str]] = None, wavelet: str = "db4",
                 depth: int = 2, mu: float = 2e-5, epochs: int = 200,
                 mode: str = "stochastic", pi: str = "amari", seed: int = 0,
                 config_echo: Optional[dict] = None, extra_report: Optional[dict] = None,
                 prior_artifacts: Sequence[str] = ()) -> dict:
    spec = WaveletSpec(wavelet, depth)
    imgs = crop_for_depth(load_images(mixtures), depth)
    X = images_to_signals(imgs)
    A = load_mixing(mixing) if mixing else None
    S = None
    if sources:
        S = images_to_signals(crop_for_depth(load_images(sources), depth))
        if S.shape != X.shape:
            raise DimensionError(f"sources {S.shape} and mixtures {X.shape} differ in shape")
    config = PipelineConfig(
        wavelet=spec,
        infomax=InfomaxParams(mu=mu, max_epochs=epochs, mode=mode,
                              seed=stage_seed(seed, "infomax")),
        pi_variant=pi,
    )
    res = separate(X, config, A=A, S=S)

    trace = res.diagnostics["infomax_trace"]
    report = {
        "schema_version": SCHEMA_VERSION,
        "config": config_echo or {
            "mixtures": list(mixtures), "mixing": mixing, "sources": list(sources or []),
            "wavelet": {"family": spec.family, "depth": spec.depth, "boundary": spec.boundary},
            "infomax": {"mu": mu, "max_epochs": epochs, "mode": mode,
                        "seed": config.infomax.seed, "conv_tol": config.infomax.conv_tol},
            "pi_variant": pi, "seed": seed,
            "image_size": [imgs[0].width, imgs[0].height],
        },
        "whitening": res.diagnostics["whitening"],
        "jad": res.diagnostics["jad"],
        "infomax": dict(res.diagnostics["infomax"], seed=config.infomax.seed,
                        cost=trace.cost, rel_change=trace.rel_change),
    }
    if A is not None:
        report["pi_variant"] = pi
        report["pi_initial"] = res.pi_initial
        report["pi_final"] = res.pi_final
    if S is not None:
        report["matching"] = _matching_dict(res.matching)
    report.update(extra_report or {})

    w, h = imgs[0].width, imgs[0].height
    os.makedirs(out, exist_ok=True)
    arts = _Artifacts(out)
    try:
        for i, im in enumerate(signals_to_images(res.Y, w, h, sign_fix=True)):
            write_pgm(arts.path(f"separated_{i}.pgm"), im)
        write_matrix_csv(arts.path("B_initial.csv"), res.B_initial)
        write_matrix_csv(arts.path("B_final.csv"), res.B_final)
        report["artifacts"] = list(prior_artifacts) + list(arts.written) + ["report.json"]
        report["timing"] = res.diagnostics["timing"]
        _json_dump(arts.path("report.json"), report)
    except Exception:
        arts.rollback()
        raise
    return report


def cmd_evaluate(outputs: Sequence[str] = (), sources: Sequence[str] = (),
                 mixing: Optional[str] = None, separation: Optional[str] = None,
                 pi: str = "amari", out: Optional[str] = None) -> dict:
    report: dict = {"schema_version": SCHEMA_VERSION}
    if (mixing is None) != (separation is None):
        raise UsageError("--mixing and --separation must be given together")
    if mixing is not None:
        A = load_mixing(mixing)
        if not os.path.exists(separation):
            raise FileNotFoundError(separation)
        B = read_matrix_csv(separation)
        report["pi_variant"] = pi
        report["pi"] = performance_index(global_matrix(B, A), pi)
    if outputs or sources:
        if not (outputs and sources):
            raise UsageError("--outputs and --sources must be given together")
        Y = images_to_signals(load_images(outputs))
        S = images_to_signals(load_images(sources))
        if Y.shape != S.shape:
            raise DimensionError(f"outputs {Y.shape} and sources {S.shape} differ in shape")
        report["matching"] = _matching_dict(match_sources(Y, S))
    if len(report) == 1:
        raise UsageError("nothing to evaluate: give --mixing/--separation and/or --outputs/--sources")
    if out:
        os.makedirs(out, exist_ok=True)
        _json_dump(os.path.join(out, "evaluation.json"), report)
    return report


def cmd_demo(experiment: str, out: str, seed: int = 0, images: Optional[Sequence[str]] = None,
             size: int = 128, mixing: Optional[str] = None, **separate_kwargs) -> dict:
    if experiment not in EXPERIMENTS:
        raise UsageError(f"unknown experiment {experiment!r}; choose from {sorted(EXPERIMENTS)}")
    depth = separate_kwargs.get("depth", 2)
    if images:
        imgs = crop_for_depth(load_images(images), depth)
    else:
        imgs = texture_pair(size, seed=stage_seed(seed, "textures") % 2 ** 31)
    os.makedirs(out, exist_ok=True)
    sources = [os.path.join(out, f"source_{i}.pgm") for i in range(len(imgs))]
    for path, im in zip(sources, imgs):
        write_pgm(path, im)

    noise = EXPERIMENTS[experiment]
    A = load_mixing(mixing) if mixing else DEFAULT_MIXING
    inline = ";".join(",".join(repr(float(v)) for v in row) for row in A)
    mix_report = cmd_mix(sources, inline, out, noise=noise, seed=seed)
    prefix = "mixture" if noise == "none" else "noisy"
    mixtures = [os.path.join(out, f"{prefix}_{i}.pgm") for i in range(len(imgs))]

    extra = {}
    if noise != "none":
        clean = images_to_signals(load_images(
            [os.path.join(out, f"mixture_{i}.pgm") for i in range(len(imgs))]))
        noisy = images_to_signals(load_images(mixtures))
        extra["measured_snr_db"] = snr_db(clean, noisy).tolist()
    echo = {
        "experiment": experiment, "seed": seed, "noise": mix_report["noise"],
        "mixing": mix_report["mixing"], "user_images": bool(images),
        "sources": [os.path.basename(p) for p in sources],
        "mixtures": [os.path.basename(p) for p in mixtures],
        "separate": dict(sorted(separate_kwargs.items())),
    }
    return cmd_separate(mixtures, out, mixing=os.path.join(out, "A.csv"), sources=sources,
                        seed=seed, config_echo=echo, extra_report=extra,
                        prior_artifacts=[os.path.basename(p) for p in sources]
                        + mix_report["artifacts"], **separate_kwargs)


# -- argument parsing --------------------------------------------------------

def _add_separation_flags(p):
    p.add_argument("--wavelet", choices=["haar", "db4"], default="db4")
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--mu", type=float, default=2e-5)
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--mode", choices=["stochastic", "batch"], default="stochastic")
    p.add_argument("--pi", choices=["paper", "amari"], default="amari")


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wavebss", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("mix", help="mix source images with a known matrix")
    p.add_argument("images", nargs="+")
    p.add_argument("--mixing", help="CSV file or inline rows '1,0.4;0.4,1'")
    p.add_argument("--noise", default="none")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("separate", help="recover sources from mixture images")
    p.add_argument("mixtures", nargs="+")
    p.add_argument("--mixing", help="true mixing matrix, enables the performance index")
    p.add_argument("--sources", nargs="+", help="true source images, enables matching")
    _add_separation_flags(p)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("evaluate", help="score a separation against ground truth")
    p.add_argument("--outputs", nargs="+", default=[])
    p.add_argument("--sources", nargs="+", default=[])
    p.add_argument("--mixing")
    p.add_argument("--separation", help="separation matrix B (CSV)")
    p.add_argument("--pi", choices=["paper", "amari"], default="amari")
    p.add_argument("--out")

    p = sub.add_parser("demo", help="run one of the reference experiments end to end")
    p.add_argument("experiment", choices=sorted(EXPERIMENTS))
    p.add_argument("--images", nargs=2, help="two source images (default: synthetic textures)")
    p.add_argument("--size", type=int, default=128)
    p.add_argument("--mixing")
    _add_separation_flags(p)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--out", required=True)
    return parser


def _print_report(report: dict) -> None:
    for key in ("pi_variant", "pi", "pi_initial", "pi_final"):
        if key in report:
            print(f"{key}: {report[key]}")
    if "jad" in report:
        print(f"jad sweeps: {report['jad']['sweeps']}  off_final: {report['jad']['off_final']}")
    if "infomax" in report:
        print(f"infomax epochs_run: {report['infomax']['epochs_run']}")
    if report.get("matching"):
        m = report["matching"]
        print(f"matching permutation: {m['permutation']} signs: {m['signs']} "
              f"correlations: {m['correlations']}")
    if "measured_snr_db" in report:
        print(f"measured_snr_db: {report['measured_snr_db']}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        if args.command == "mix":
            report = cmd_mix(args.images, args.mixing, args.out, args.noise, args.seed)
            print("wrote " + ", ".join(report["artifacts"]))
        elif args.command == "separate":
            report = cmd_separate(args.mixtures, args.out, mixing=args.mixing,
                                  sources=args.sources, wavelet=args.wavelet,
                                  depth=args.depth, mu=args.mu, epochs=args.epochs,
                                  mode=args.mode, pi=args.pi, seed=args.seed)
            _print_report(report)
        elif args.command == "evaluate":
            _print_report(cmd_evaluate(args.outputs, args.sources, args.mixing,
                                       args.separation, args.pi, args.out))
        else:
            report = cmd_demo(args.experiment, args.out, seed=args.seed, images=args.images,
                              size=args.size, mixing=args.mixing, wavelet=args.wavelet,
                              depth=args.depth, mu=args.mu, epochs=args.epochs,
                              mode=args.mode, pi=args.pi)
            _print_report(report)
    except UsageError as exc:
        print(f"wavebss: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"wavebss: error: no such file: {exc.filename or exc.args[0]}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"wavebss: numerical failure in stage '{exc.stage or 'unknown'}': {exc}",
              file=sys.stderr)
        return EXIT_NUMERIC
    except (FormatError, DimensionError, ValueError, OSError) as exc:
        print(f"wavebss: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


def run() -> None:
    """Console-script entry point."""
    sys.exit(main())


if __name__ == "__main__":
    run()
