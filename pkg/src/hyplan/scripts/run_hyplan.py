def main(argv=None):
    """
    Run a hyplan command.

    Failures print a JSON object with the error class, message and details to
    stderr, also written as error.json to the output directory when there is
    one, and exit with status 2 (1 for unexpected errors).
    """
    import argparse
    import logging
    import sys

    import numpy as np

    from hyplan.hyplan_exception import HyplanException
    from hyplan.scripts import commands

    parser = argparse.ArgumentParser(prog="hyplan", description="Electricity, heat and hydrogen capacity-expansion planner")
    parser.add_argument("--verbose", action="store_true", help="Log at DEBUG level")
    parser.add_argument("--seed", type=int, help="Seed for numpy's global random generator")
    subparsers = parser.add_subparsers(dest="command", required=True)

    solver = argparse.ArgumentParser(add_help=False)
    solver.add_argument("--tolerance", type=float, help="Solver feasibility and optimality tolerance")
    solver.add_argument("--max-iterations", type=int, help="Simplex iteration cap")
    solver.add_argument("--node-cap", type=int, help="Branch-and-bound node cap for binary commitment")
    solver.add_argument("--max-integer-variables", type=int, help="Refuse MILPs with more integer variables")
    solver.add_argument("--no-scaling", dest="scaling", action="store_const", const=False, help="Solve without geometric scaling")
    solver.add_argument("--solver-log", choices=["plain", "gzip"], default="plain", help="Compression of the per-solve log")

    scenario = argparse.ArgumentParser(add_help=False)
    scenario.add_argument("--scenario", required=True, help="Scenario YAML file (searched along HYPLAN_CONFIG_PATH)")
    scenario.add_argument("--out", required=True, help="Output directory")

    prep = subparsers.add_parser("prep", help="Capacity factors and heat demand from weather files")
    prep.add_argument("--weather", required=True, help="Directory of per-region weather CSVs or cell directories")
    prep.add_argument("--params", help="YAML file of prep parameters")
    prep.add_argument("--out", required=True, help="Output directory")

    plan = subparsers.add_parser("plan", parents=[scenario, solver], help="Solve one capacity plan")
    plan.add_argument("--mode", choices=["min-cost", "min-co2", "cost-under-cap"], help="Objective mode (default: the scenario's)")
    plan.add_argument("--epsilon", type=float, help="Emission cap in tons for cost-under-cap")

    pareto = subparsers.add_parser("pareto", parents=[scenario, solver], help="Cost / CO2 frontier")
    pareto.add_argument("--points", type=int, help="Number of frontier points, anchors included")
    pareto.add_argument("--workers", type=int, help="Processes solving interior points")

    pipelines = subparsers.add_parser("pipelines", help="Size hydrogen pipelines for a finished plan run")
    pipelines.add_argument("--run", required=True, help="Directory of a plan run")
    pipelines.add_argument("--out", help="Output directory (default: <run>/pipelines)")

    validate = subparsers.add_parser("validate", parents=[scenario, solver], help="Clustered relaxation against exact commitment")
    validate.add_argument("--hours", type=int, help="Horizon of the validation instance")
    validate.add_argument("--modules", type=int, help="Modules per committed fleet")

    sweep = subparsers.add_parser("sweep", parents=[scenario, solver], help="Re-solve with parameters scaled up and down")
    sweep.add_argument("--param", action="append", required=True, help="<kind or technology id>.<field>, repeatable")
    sweep.add_argument("--delta", type=float, default=0.3, help="Relative change applied both ways")
    sweep.add_argument("--mode", choices=["min-cost", "min-co2", "cost-under-cap"], help="Objective mode (default: the scenario's)")

    report = subparsers.add_parser("report", help="SVG heatmaps and tables for a finished plan run")
    report.add_argument("--run", required=True, help="Directory of a plan run")

    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    if args.seed is not None:
        np.random.seed(args.seed)

    solver_overrides = {}
    solve_log = None
    if hasattr(args, "solver_log"):
        solver_overrides = {
            "tolerance": args.tolerance,
            "max_iterations": args.max_iterations,
            "node_cap": args.node_cap,
            "max_integer_variables": args.max_integer_variables,
            "scaling": args.scaling,
        }
        solve_log = "gzip" if args.solver_log == "gzip" else None
    out_dir = getattr(args, "out", None) or getattr(args, "run", None)

    try:
        if args.command == "prep":
            commands.cmd_prep(args.weather, args.out, args.params)
        elif args.command == "plan":
            commands.cmd_plan(args.scenario, args.out, args.mode, args.epsilon, solver_overrides, solve_log)
        elif args.command == "pareto":
            commands.cmd_pareto(args.scenario, args.out, args.points, args.workers, solver_overrides, solve_log)
        elif args.command == "pipelines":
            commands.cmd_pipelines(args.run, args.out)
        elif args.command == "validate":
            commands.cmd_validate(args.scenario, args.out, args.hours, args.modules, solver_overrides, solve_log)
        elif args.command == "sweep":
            commands.cmd_sweep(args.scenario, args.out, args.param, args.delta, args.mode, solver_overrides, solve_log)
        elif args.command == "report":
            commands.cmd_report(args.run)
    except HyplanException as error:
        _report_error(error, error.message, error.details, out_dir)
        sys.exit(2)
    except Exception as error:
        logging.getLogger("hyplan").exception("Unexpected failure")
        _report_error(error, str(error), {}, out_dir)
        sys.exit(1)


def _report_error(error, message, details, out_dir):
    import json
    import pathlib
    import sys

    payload = json.dumps({"error": type(error).__name__, "message": message, "details": details}, default=str, sort_keys=True)
    if out_dir is not None and pathlib.Path(out_dir).is_dir():
        (pathlib.Path(out_dir) / "error.json").write_text(payload + "\n")
    print(payload, file=sys.stderr)


if __name__ == "__main__":
    main()
