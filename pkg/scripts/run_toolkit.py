from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from typing import List, Optional

from pydantic import ValidationError

from api.toolkit_runner import load_config, run
from core.errors import EXIT_SCHEMA, SchemaError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Run one ahmass verification command from a JSON config."
    )
    parser.add_argument("--config", required=True, help="Path to the run config JSON.")
    parser.add_argument("--out", default=None, help="Output directory (overrides config.output).")
    parser.add_argument(
        "--quad-order",
        type=int,
        default=None,
        help="Polar quadrature order; the azimuthal order becomes twice this.",
    )
    parser.add_argument("--tol", type=float, default=None, help="Analytic tolerance tier.")
    parser.add_argument("--seed", type=int, default=None, help="Base random seed.")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config).with_overrides(
            out=args.out, quad_order=args.quad_order, tol=args.tol, seed=args.seed
        )
    except (SchemaError, ValidationError) as exc:
        print(json.dumps({"exit_code": EXIT_SCHEMA, "error": str(exc)}, ensure_ascii=True))
        return EXIT_SCHEMA
    report = run(config)
    print(json.dumps(asdict(report), indent=2, ensure_ascii=True))
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
