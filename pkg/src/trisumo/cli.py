"""Command line interface.

    trisumo train    --config run.json [--out DIR]
    trisumo evaluate --checkpoint PATH --episodes N --seed S
    trisumo rollout  --checkpoint PATH --seed S --out PATH
    trisumo plot     --metrics PATH --out PATH
    trisumo serve    [--host H] [--port P]

Exit codes: 0 success, 1 usage errors, 2 I/O or file-format errors.
Verbosity comes from the TRISUMO_LOG environment variable.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from .errors import TrisumoError
from .harness.config import load_config
from .harness.evaluation import evaluate_checkpoint, rollout_checkpoint
from .harness.plotting import plot_metrics
from .harness.training import train
from .logs import configure_logging


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; the CLI contract reserves 2 for
    # I/O and format problems, so usage errors are remapped to 1.
    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _cmd_train(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    if args.out is not None:
        cfg = dataclasses.replace(cfg, output_dir=args.out)
    result = train(cfg)
    print(f"metrics: {result.metrics_path}")
    print(f"checkpoint: {result.checkpoint_path}")
    print(f"final window win rate: {result.final_window_win_rate}")
    return 0


def _cmd_evaluate(args: argparse.Namespace) -> int:
    report = evaluate_checkpoint(args.checkpoint, args.episodes, args.seed)
    print(
        json.dumps(
            {
                "win_rate": report.win_rate,
                "lose_rate": report.lose_rate,
                "draw_rate": report.draw_rate,
                "mean_steps_to_win": report.mean_steps_to_win,
            }
        )
    )
    return 0


def _cmd_rollout(args: argparse.Namespace) -> int:
    result = rollout_checkpoint(args.checkpoint, args.seed, args.out)
    print(f"wrote {result.out_path} ({result.steps} steps, {result.outcome.value})")
    return 0


def _cmd_plot(args: argparse.Namespace) -> int:
    plot_metrics(args.metrics, args.out)
    print(f"wrote {args.out}")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="trisumo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_train = sub.add_parser("train", help="run a training schedule from a JSON config")
    p_train.add_argument("--config", required=True, help="path to the JSON run config")
    p_train.add_argument("--out", help="output directory (overrides config output_dir)")
    p_train.set_defaults(func=_cmd_train)

    p_eval = sub.add_parser("evaluate", help="greedy evaluation of a checkpoint")
    p_eval.add_argument("--checkpoint", required=True)
    p_eval.add_argument("--episodes", type=int, default=50)
    p_eval.add_argument("--seed", type=int, default=0)
    p_eval.set_defaults(func=_cmd_evaluate)

    p_roll = sub.add_parser("rollout", help="write one greedy episode trace as CSV")
    p_roll.add_argument("--checkpoint", required=True)
    p_roll.add_argument("--seed", type=int, default=0)
    p_roll.add_argument("--out", required=True)
    p_roll.set_defaults(func=_cmd_rollout)

    p_plot = sub.add_parser("plot", help="render training curves from a metrics CSV")
    p_plot.add_argument("--metrics", required=True)
    p_plot.add_argument("--out", required=True)
    p_plot.set_defaults(func=_cmd_plot)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        configure_logging()
        args = build_parser().parse_args(argv)
        return args.func(args)
    except TrisumoError as e:
        print(f"trisumo: error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"trisumo: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
