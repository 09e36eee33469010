"""How the certified bound and the measured overshoot grow with lambda.

For each fixture plant and lambda, prints M_1 lam^L next to the sampled
sup ||e^{Ft}|| e^{lam t}, and the log-log slope of both between successive
lambdas. The certified bound grows like lam^L; the measured peak usually
grows much more slowly.

    python3 scripts/lambda_sweep.py --plants example chain_4 --lambdas 1 2 5 10 20 50
"""
import argparse
import math
from dataclasses import dataclass, field

from overshoot.canon import Plant
from overshoot.fixtures import FIXTURE_PLANTS
from overshoot.synth import synthesize_gain
from overshoot.verify import certificate_envelope


@dataclass(frozen=True)
class SweepConfig:
    plants: tuple[str, ...] = ("example", "double_integrator", "unstable_3x2", "chain_4")
    lambdas: tuple[float, ...] = (1.0, 2.0, 5.0, 10.0, 20.0, 50.0)
    samples: int = 3000


@dataclass
class SweepRow:
    plant: str
    lam: float
    bound: float
    sup: float
    slopes: tuple[float, float] = field(default=(math.nan, math.nan))


def sweep(cfg: SweepConfig) -> list[SweepRow]:
    rows = []
    for name in cfg.plants:
        entry = FIXTURE_PLANTS[name]
        plant = Plant(entry["A"], entry["B"])
        prev = None
        for lam in cfg.lambdas:
            cert = synthesize_gain(plant, lam)
            rep = certificate_envelope(cert, base_samples=cfg.samples)
            row = SweepRow(name, lam, rep.certified_bound, rep.sup_ratio)
            if prev is not None:
                dl = math.log(lam / prev.lam)
                row.slopes = (math.log(row.bound / prev.bound) / dl, math.log(row.sup / prev.sup) / dl)
            rows.append(row)
            prev = row
    return rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--plants", nargs="+", default=list(SweepConfig.plants), choices=sorted(FIXTURE_PLANTS))
    ap.add_argument("--lambdas", nargs="+", type=float, default=list(SweepConfig.lambdas))
    ap.add_argument("--samples", type=int, default=SweepConfig.samples)
    args = ap.parse_args()
    cfg = SweepConfig(tuple(args.plants), tuple(args.lambdas), args.samples)

    print(f"{'plant':<18}{'lambda':>8}{'M_1 lam^L':>14}{'sup ratio':>14}{'slope bound':>13}{'slope sup':>11}")
    for r in sweep(cfg):
        print(f"{r.plant:<18}{r.lam:>8g}{r.bound:>14.4e}{r.sup:>14.4e}{r.slopes[0]:>13.2f}{r.slopes[1]:>11.2f}")


if __name__ == "__main__":
    main()
