"""Run the 3-state example end to end and write its envelope trace.

    python3 scripts/run_example.py --samples 10000 --trace example_trace.csv
"""
import argparse
from dataclasses import dataclass

from overshoot.canon import Plant
from overshoot.cli import cmd_example, write_trace_csv
from overshoot.fixtures import EXAMPLE_A, EXAMPLE_B, EXAMPLE_LAMBDA
from overshoot.synth import synthesize_gain
from overshoot.verify import certificate_envelope


@dataclass(frozen=True)
class ExampleConfig:
    samples: int = 10_000
    trace: str | None = None


def run(cfg: ExampleConfig) -> int:
    code = cmd_example(cfg.samples)
    if cfg.trace:
        cert = synthesize_gain(Plant(EXAMPLE_A, EXAMPLE_B), EXAMPLE_LAMBDA)
        write_trace_csv(cfg.trace, certificate_envelope(cert, base_samples=cfg.samples).samples)
        print(f"trace written to {cfg.trace}")
    return code


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=ExampleConfig.samples)
    ap.add_argument("--trace", default=None)
    args = ap.parse_args()
    raise SystemExit(run(ExampleConfig(args.samples, args.trace)))
