#!/usr/bin/env python3
"""
QuadTorsion System Evaluation
Runs the golden checks and prints a pass/fail matrix
"""

import argparse
import sys
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

from src.analysis.evaluator import SystemEvaluator
from src.core.config import setup_logging


def main() -> int:
    parser = argparse.ArgumentParser(description="QuadTorsion golden checks")
    parser.add_argument("--quick", action="store_true", help="Skip smallest-field and density checks.")
    parser.add_argument("--t", type=int, default=None, help="Density scan size.")
    parser.add_argument("--json", type=str, default=None, help="Write the matrix to this JSON file.")
    args = parser.parse_args()

    setup_logging(level="WARNING")
    evaluator = SystemEvaluator(include_slow=not args.quick, density_t=args.t)
    passed = evaluator.evaluate_system()

    if args.json:
        Path(args.json).write_text(evaluator.to_json())
        print(f"💾 Results saved to: {args.json}")
    return 0 if passed else 1


if __name__ == "__main__":
    sys.exit(main())
