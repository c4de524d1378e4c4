"""Command-line entry points.

    vqclab gen-data    --seed S --out DIR
    vqclab train       --arch simple --circuit FILE --epochs N ... --seed S
    vqclab render      --circuit FILE [--n-inputs K] [--q-out M]
    vqclab trajectory  --run DIR
    vqclab agent       --arch simple --budget N --seed S --out DIR
                       (--scripted FILE | --endpoint URL --model M --api-key-env VAR)
    vqclab serve       --address HOST:PORT --data-dir DIR [--token T]
"""

from __future__ import annotations

import argparse
import json
import sys

from .agent.loop import run_agent_loop
from .agent.runlog import load_run_log
from .agent.types import EndpointConfig, RunConfig
from .circuit import CircuitError, parse_circuit, render_ascii, unroll_and_validate
from .dataset import generate_splits, write_split_files
from .train_tools import ToolError, ToolRequest, execute_tool_request

_ARCH_ALIASES = {"simple": "simple", "quanv": "quanv", "full": "full_quantum",
                 "full_quantum": "full_quantum"}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vqclab",
                                     description="circuit-design lab tools")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="write the train/val/test CSV files")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("train", help="run one training request")
    p.add_argument("--arch", choices=sorted(_ARCH_ALIASES), required=True)
    p.add_argument("--circuit", required=True, help="circuit document file")
    p.add_argument("--epochs", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--weights-shape", type=int, nargs="+")
    p.add_argument("--q-enc-size", type=int)
    p.add_argument("--q-out-size", type=int)
    p.add_argument("--kernel-size", type=int)
    p.add_argument("--stride", type=int)
    p.add_argument("--vqc-output-dim", type=int)

    p = sub.add_parser("render", help="print a circuit as an ASCII diagram")
    p.add_argument("--circuit", required=True)
    p.add_argument("--n-inputs", type=int, default=21)
    p.add_argument("--q-out", type=int, default=None,
                   help="expected measurement count (omit to skip the check)")

    p = sub.add_parser("trajectory", help="emit a run's metrics as CSV")
    p.add_argument("--run", required=True, help="run directory")

    p = sub.add_parser("agent", help="run the design loop headless")
    p.add_argument("--arch", choices=sorted(_ARCH_ALIASES), required=True)
    p.add_argument("--budget", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--prompt", default="Design circuits for this task; start "
                                       "simple and improve from the metrics.")
    p.add_argument("--out", required=True, help="directory for the run log")
    p.add_argument("--scripted", help="playlist file for the scripted endpoint")
    p.add_argument("--endpoint", help="chat endpoint base URL")
    p.add_argument("--model", default="")
    p.add_argument("--api-key-env", default="")
    p.add_argument("--temperature", type=float, default=0.0)
    p.add_argument("--max-repair-attempts", type=int, default=3)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--address", default="127.0.0.1:8000")
    p.add_argument("--data-dir", required=True)
    p.add_argument("--token", default=None)

    return parser


def _cmd_gen_data(args) -> int:
    paths = write_split_files(generate_splits(args.seed), args.out)
    for path in paths:
        print(path)
    return 0


def _cmd_train(args) -> int:
    with open(args.circuit, encoding="utf-8") as fh:
        document = fh.read()
    request = ToolRequest(
        variant=_ARCH_ALIASES[args.arch],
        circuit_document=document,
        epochs=args.epochs,
        weights_shape=tuple(args.weights_shape) if args.weights_shape else None,
        q_enc_size=args.q_enc_size,
        q_out_size=args.q_out_size,
        kernel_size=args.kernel_size,
        stride=args.stride,
        vqc_output_dim=args.vqc_output_dim,
    )
    splits = generate_splits(args.seed)
    outcome = execute_tool_request(request, splits, args.seed)
    if isinstance(outcome, ToolError):
        print(json.dumps({"error": outcome.to_dict()}, indent=2))
        return 1
    print(json.dumps(outcome.to_dict(), indent=2))
    return 0


def _cmd_render(args) -> int:
    with open(args.circuit, encoding="utf-8") as fh:
        document = fh.read()
    try:
        fc = unroll_and_validate(parse_circuit(document), args.n_inputs, args.q_out)
    except CircuitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(render_ascii(fc))
    return 0


def trajectory_csv(view) -> str:
    """CSV behind the two trajectory charts, one row per iteration."""
    lines = ["iteration,status,test_RMSE,n_trainable_params_VQC,"
             "n_gates_in_VQC,circuit_depth"]
    for record in view.iteration_records():
        if record.ok:
            r = record.result
            lines.append(f"{record.index},ok,{r['test_RMSE']!r},"
                         f"{r['n_trainable_params_VQC']},{r['n_gates_in_VQC']},"
                         f"{r['circuit_depth']}")
        else:
            lines.append(f"{record.index},error,,,,")
    return "\n".join(lines) + "\n"


def _cmd_trajectory(args) -> int:
    view = load_run_log(args.run)
    sys.stdout.write(trajectory_csv(view))
    return 0


def _cmd_agent(args) -> int:
    if bool(args.scripted) == bool(args.endpoint):
        print("error: give exactly one of --scripted or --endpoint",
              file=sys.stderr)
        return 2
    if args.scripted:
        with open(args.scripted, encoding="utf-8") as fh:
            turns = json.load(fh)
        endpoint = EndpointConfig(kind="scripted", turns=tuple(turns))
    else:
        endpoint = EndpointConfig(kind="http", base_url=args.endpoint,
                                  model=args.model, api_key_env=args.api_key_env,
                                  temperature=args.temperature)
    config = RunConfig(architecture=_ARCH_ALIASES[args.arch], budget=args.budget,
                       prompt=args.prompt, endpoint=endpoint,
                       master_seed=args.seed,
                       max_repair_attempts=args.max_repair_attempts)
    view = run_agent_loop(config, log_dir=args.out)
    print(json.dumps(view.summary(), indent=2))
    return 0 if view.status != "aborted" else 1


def _cmd_serve(args) -> int:
    from .service import serve

    print(f"serving on {args.address}, data in {args.data_dir}")
    serve(args.address, args.data_dir, token=args.token)
    return 0


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handlers = {"gen-data": _cmd_gen_data, "train": _cmd_train,
                "render": _cmd_render, "trajectory": _cmd_trajectory,
                "agent": _cmd_agent, "serve": _cmd_serve}
    return handlers[args.command](args)


def main():  # console-script entry point
    raise SystemExit(cli_main())


if __name__ == "__main__":
    main()
