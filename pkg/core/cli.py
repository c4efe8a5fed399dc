"""
Command line interface: ``ofbm synth|analyze|estimate|mc|normality``

Exit status: 0 on success, 1 on I/O errors, 2 on OfbmID errors (invalid
parameters, short paths, ...), 3 when a Monte Carlo experiment had failed runs.
"""

import argparse
import json
import logging
import os
import sys

from core.errors import OfbmError
from core.models.base import jsonable
from core.models.definitions import ESTIMATORS, THETA_NAMES
from core.models.montecarlo import RunRecords
from core.models.path import Path
from core.models.spectrum import SampleSpectrum
from core.models.theta import Theta
from core.tools.config import load_settings
from core.tools.stats import MIN_NORMALITY_SAMPLES

logger = logging.getLogger("ofbm")

EXIT_IO = 1
EXIT_MODEL = 2
EXIT_FAILED_RUNS = 3


def parse_theta(text):
    """Parse ``h1,h2,rho_x,sigma_x1,sigma_x2,beta,gamma``."""
    values = [float(v) for v in text.split(",")]
    if len(values) != len(THETA_NAMES):
        raise argparse.ArgumentTypeError(
            f"theta takes {len(THETA_NAMES)} comma separated values ({','.join(THETA_NAMES)})"
        )
    return Theta(*values)


def parse_freeze(text):
    """Parse ``name=value``."""
    name, sep, value = text.partition("=")
    if not sep or name not in THETA_NAMES:
        raise argparse.ArgumentTypeError(f"expected name=value with name in {THETA_NAMES}")
    return name, float(value)


def _theta_from_args(args):
    if args.theta is not None:
        return args.theta
    from core.experiments import experiment_grid

    return experiment_grid([args.setting])[args.setting]


def cmd_synth(args):
    from core.tools.synthesis import SynthesisConfig, synthesize

    settings = load_settings(args.config, {"embedding_factor": args.embedding_factor})
    config = SynthesisConfig(
        _theta_from_args(args), args.n, args.seed, settings["embedding_factor"]
    )
    path = synthesize(config)
    path.to_csv(args.out)
    logger.info(f"wrote a path of {path.n} samples to {args.out}")
    return 0


def _analysis_config(settings):
    from core.tools.wavelet import AnalysisConfig

    return AnalysisConfig(
        n_psi=settings["n_psi"],
        j1=settings["j1"],
        j2=settings["j2"],
        boundary=settings["boundary"],
    )


def cmd_analyze(args):
    from core.tools.wavelet import analyze

    settings = load_settings(
        args.config,
        {"n_psi": args.n_psi, "j1": args.j1, "j2": args.j2, "boundary": args.boundary},
    )
    path = Path.from_csv(args.path)
    spectrum = analyze(path, _analysis_config(settings))
    spectrum.meta["settings"] = {
        k: settings[k] for k in ("n_psi", "j1", "j2", "boundary")
    }
    spectrum.to_csv(args.out)
    logger.info(f"wrote octaves {spectrum.js.tolist()} to {args.out}")
    return 0


def _dump_bounds(result, spectrum, fn):
    from core.solver.bounds import bound_terms

    if not result.candidates:
        logger.warning("no candidate region to dump bounds for")
        return
    best = min(result.candidates, key=lambda r: (r.upper, r.box.key()))
    terms = bound_terms(best.box, spectrum)
    doc = {
        "box": best.box.as_dict(),
        "lower": float(best.lower),
        "upper": float(best.upper),
        "terms": terms.to_dict(orient="records"),
    }
    with open(fn, "w") as f:
        json.dump(jsonable(doc), f, indent=2)
    logger.info(f"wrote bound decomposition to {fn}")


def cmd_estimate(args):
    from core.solver.bnb import BnbConfig
    from estimators import run_estimator

    settings = load_settings(
        args.config,
        {
            "delta": args.delta,
            "delta_relax": args.delta_relax,
            "max_iters": args.max_iters,
            "weights": args.weights,
        },
    )
    spectrum = SampleSpectrum.from_csv(args.spectrum)
    bnb_config = BnbConfig(
        delta=settings["delta"],
        delta_relax=settings["delta_relax"],
        max_iters=settings["max_iters"],
        frozen=dict(args.freeze or []),
        threads=args.threads,
        trace=args.trace is not None,
        sigma_max=args.sigma_max,
    )
    result = run_estimator(args.method, spectrum, bnb_config, settings["weights"])
    text = result.to_json(args.out)
    if args.out is None:
        print(text)
    else:
        logger.info(f"wrote {result.method} estimate to {args.out}")
    if args.trace is not None:
        if result.trace is None:
            logger.warning(f"method {args.method} records no region trace")
        else:
            result.trace.to_csv(args.trace, index=False, float_format="%.17g")
    if args.dump_bounds is not None:
        if ESTIMATORS[args.method]["kind"] != "solver":
            logger.warning(f"method {args.method} has no interval bounds")
        else:
            _dump_bounds(result, spectrum, args.dump_bounds)
    return 0


def cmd_mc(args):
    from core.experiments import ExperimentPlan, run_mc

    settings = load_settings(
        args.config,
        {
            "replications": args.replications,
            "n_list": args.n_list,
            "methods": args.methods,
            "seed_base": args.seed,
            "threads": args.threads,
            "delta": args.delta,
            "delta_relax": args.delta_relax,
            "max_iters": args.max_iters,
            "restrict": args.restrict,
            "scale_delta": "true" if args.scale_delta else None,
        },
    )
    plan = ExperimentPlan.from_settings(settings, labels=args.settings)
    records, summary = run_mc(plan, args.out_dir)
    logger.info(
        f"{len(records.data)} runs ({records.failed} failed), summary in "
        f"{os.path.join(args.out_dir, 'summary.csv')}"
    )
    return EXIT_FAILED_RUNS if records.failed else 0


def cmd_normality(args):
    from core.experiments import normality_table

    records = RunRecords.from_csv(args.runs)
    table = normality_table(records, args.min_samples)
    table.to_csv(args.out)
    logger.info(f"wrote {len(table.data)} divergences to {args.out}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ofbm", description="Bivariate Operator fractional Brownian motion identification"
    )
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="warnings only")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_config(p):
        p.add_argument("--config", help="key,value CSV settings file")
        return p

    p = with_config(sub.add_parser("synth", help="synthesize a sample path"))
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--theta", type=parse_theta, help=",".join(THETA_NAMES))
    which.add_argument("--setting", help="label of a packaged parameter setting")
    p.add_argument("--n", type=int, required=True, help="path length (power of two)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--embedding-factor", type=int)
    p.add_argument("--out", required=True, help="output path CSV")
    p.set_defaults(func=cmd_synth)

    p = with_config(sub.add_parser("analyze", help="wavelet spectrum of a path"))
    p.add_argument("path", help="path CSV")
    p.add_argument("--n-psi", type=int)
    p.add_argument("--j1", type=int)
    p.add_argument("--j2", type=int)
    p.add_argument("--boundary", choices=("truncate", "periodization"))
    p.add_argument("--out", required=True, help="output spectrum CSV")
    p.set_defaults(func=cmd_analyze)

    p = with_config(sub.add_parser("estimate", help="estimate parameters from a spectrum"))
    p.add_argument("spectrum", help="spectrum CSV")
    p.add_argument("--method", choices=sorted(ESTIMATORS), default="m")
    p.add_argument("--delta", help="precision: one value or 7 separated by ';'")
    p.add_argument("--delta-relax", type=int)
    p.add_argument("--max-iters", type=int)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--freeze", type=parse_freeze, action="append", help="name=value")
    p.add_argument("--sigma-max", type=float)
    p.add_argument("--weights", choices=("ols", "kj"))
    p.add_argument("--out", help="result JSON (stdout when omitted)")
    p.add_argument("--trace", help="region trace CSV")
    p.add_argument("--dump-bounds", help="bound decomposition JSON of the best region")
    p.set_defaults(func=cmd_estimate)

    p = with_config(sub.add_parser("mc", help="Monte Carlo experiment"))
    p.add_argument("--out-dir", required=True)
    p.add_argument("--settings", nargs="+", help="labels of the packaged settings")
    p.add_argument("--replications", type=int)
    p.add_argument("--n-list", help="sizes separated by ';'")
    p.add_argument("--methods", help="registry keys separated by ';'")
    p.add_argument("--seed", type=int, help="seed of replication 0")
    p.add_argument("--threads", type=int, help="worker processes")
    p.add_argument("--delta")
    p.add_argument("--delta-relax", type=int)
    p.add_argument("--max-iters", type=int)
    p.add_argument("--restrict", help="free coordinates separated by ';'")
    p.add_argument("--scale-delta", action="store_true")
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("normality", help="KL divergence of estimates to a Gaussian fit")
    p.add_argument("runs", help="runs.csv of a Monte Carlo experiment")
    p.add_argument("--min-samples", type=int, default=MIN_NORMALITY_SAMPLES)
    p.add_argument("--out", required=True, help="output CSV")
    p.set_defaults(func=cmd_normality)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format="%(asctime)s %(name)s %(levelname)s: %(message)s")
    try:
        return args.func(args)
    except OfbmError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_MODEL
    except (IOError, NameError) as e:
        logger.error(str(e))
        return EXIT_IO
    except ValueError as e:
        # malformed settings
        logger.error(str(e))
        return EXIT_MODEL


if __name__ == "__main__":
    sys.exit(main())
