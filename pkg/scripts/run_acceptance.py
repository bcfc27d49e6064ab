#!/usr/bin/env python3
"""
Acceptance Runner

Runs the fixed fixtures (octahedral, circular, random trees and the
composite gluing instance) through the verify pipeline and writes a JSON
summary with per-phase timings.

Usage:
    python scripts/run_acceptance.py
    python scripts/run_acceptance.py --output acceptance.json --trees 5 --seed 7
    python scripts/run_acceptance.py --skip-composite
"""

import argparse
import json
import logging
import random
import sys
from pathlib import Path
from typing import Any, Dict, List, Tuple

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from code.splitspan.config import Config  # noqa: E402
from code.splitspan.formats.exporters import splits_to_text  # noqa: E402
from code.splitspan.orchestrator import Orchestrator  # noqa: E402
from code.splitspan.splits import WeightedSplitSystem  # noqa: E402
from code.splitspan.workloads import SplitSystemGenerator  # noqa: E402

# Setup logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)


def fixtures(trees: int, seed: int, composite: bool) -> List[Tuple[str, WeightedSplitSystem]]:
    rng = random.Random(seed)
    out = [
        ("octahedral", SplitSystemGenerator.octahedral()),
        ("circular-2", SplitSystemGenerator.circular(2)),
        ("circular-3", SplitSystemGenerator.circular(3)),
    ]
    for i in range(trees):
        out.append((f"tree-{i}", SplitSystemGenerator.random_tree(rng.randint(3, 8), rng)))
    if composite:
        out.append(("composite", SplitSystemGenerator.composite()))
    return out


def run(name: str, system: WeightedSplitSystem) -> Dict[str, Any]:
    cap = max(system.n, Config().oracle_cap)
    orchestrator = Orchestrator(Config(oracle_cap=cap, allow_large_oracle=True))
    parsed = orchestrator.load(text=splits_to_text(system), kind="splits")
    tightspan = orchestrator.tightspan(parsed)
    verify = orchestrator.verify(parsed)
    logger.info(f"{name}: {tightspan.summary.splitlines()[0]} -> {'PASS' if verify.ok else 'FAIL'}")
    return {
        "name": name,
        "taxa": system.n,
        "splits": len(system),
        "summary": tightspan.summary.splitlines()[0],
        "passed": verify.ok,
        "report": verify.data,
    }


def main():
    """Main entry point for the acceptance runner"""
    parser = argparse.ArgumentParser(description='split-span acceptance runner')
    parser.add_argument('--output', type=str, default='acceptance.json',
                        help='Where to write the JSON summary (default: acceptance.json)')
    parser.add_argument('--trees', type=int, default=5,
                        help='Number of random tree fixtures (default: 5)')
    parser.add_argument('--seed', type=int, default=0,
                        help='Seed for the random fixtures (default: 0)')
    parser.add_argument('--skip-composite', action='store_true',
                        help='Skip the ten-taxon composite instance')

    args = parser.parse_args()

    try:
        results = [run(name, system) for name, system in fixtures(args.trees, args.seed, not args.skip_composite)]
        output = Path(args.output)
        output.parent.mkdir(exist_ok=True, parents=True)
        with open(output, 'w') as f:
            json.dump({"results": results}, f, indent=2)
        logger.info(f"Summary saved to: {output}")

        failed = [r["name"] for r in results if not r["passed"]]
        if failed:
            logger.error(f"Failed fixtures: {', '.join(failed)}")
            return 1
        return 0

    except Exception as e:
        logger.error(f"Failed: {e}", exc_info=True)
        return 1


if __name__ == '__main__':
    sys.exit(main())
