"""Monte Carlo sweep driver and CLI.

Runs the configured detector chains over an SNR grid, one shared channel
realization per (snr, trial) cell, and writes per-(chain, snr) metrics as
CSV or JSON. Error counting conventions:

* bit errors come from Gray labels of the decided grid points; a declared
  error (naive remap, estimate discarded) contributes half an error per
  bit, tracked in doubled integer units so accumulation stays exact;
* a declared error always counts as one symbol-vector error;
* node counts sum every tree search a chain ran (nearest-plane passes
  count one node per level).

With --emit-bounds every relaxed search is additionally checked against
its radius guarantee and node-count ceiling; any violation flips the exit
code to 3.
"""

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Optional

from .bounds import babai_radius, relaxed_complexity_upper_bound
from .channel import draw, trial_rng
from .constellation import bit_distance, build
from .errors import ConfigError, IoError, LatdetError
from .remap import Prepared, parse_chain, run_chain

_FORMATS = ("csv", "json")

_COLUMNS = ("chain", "snr_db", "trials", "bits", "bit_errors", "ber",
            "sym_vec_errors", "avg_nodes", "out_of_lattice_rate",
            "stage2_rate")
_BOUND_COLUMNS = ("bound_violations", "babai_violations")


@dataclass(frozen=True)
class SweepConfig:
    m: int
    qam_order: int
    snr_grid_db: tuple
    trials: int
    seed: int
    chains: tuple
    emit_bounds: bool = False
    delta: float = 0.75
    output_path: Optional[str] = None
    format: str = "csv"

    def __post_init__(self):
        if self.m < 1:
            raise ConfigError("m must be at least 1")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        grid = tuple(float(v) for v in self.snr_grid_db)
        if not grid:
            raise ConfigError("the SNR grid is empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("the SNR grid must be strictly increasing")
        if not self.chains:
            raise ConfigError("at least one chain is required")
        if self.format not in _FORMATS:
            raise ConfigError(f"format must be one of {_FORMATS}")
        object.__setattr__(self, "snr_grid_db", grid)
        object.__setattr__(self, "chains", tuple(self.chains))


@dataclass
class CellMetrics:
    """Accumulators for one (chain, snr) cell.

    bit2 holds doubled bit errors so the half-per-bit convention for
    declared errors stays integer-exact.
    """

    chain: str
    snr_db: float
    trials: int = 0
    bits: int = 0
    bit2: int = 0
    sym_vec_errors: int = 0
    node_sum: int = 0
    out_count: int = 0
    stage2_count: int = 0
    bound_violations: int = 0
    babai_violations: int = 0

    @property
    def bit_errors(self):
        return self.bit2 // 2 if self.bit2 % 2 == 0 else self.bit2 / 2

    @property
    def ber(self):
        return self.bit2 / (2.0 * self.bits) if self.bits else 0.0

    @property
    def avg_nodes(self):
        return self.node_sum / self.trials if self.trials else 0.0

    @property
    def out_of_lattice_rate(self):
        return self.out_count / self.trials if self.trials else 0.0

    @property
    def stage2_rate(self):
        return self.stage2_count / self.trials if self.trials else 0.0


@dataclass
class SweepMetrics:
    config: SweepConfig
    cells: list = field(default_factory=list)

    def cell(self, chain_label, snr_db):
        for c in self.cells:
            if c.chain == chain_label and c.snr_db == snr_db:
                return c
        raise KeyError((chain_label, snr_db))

    @property
    def total_violations(self):
        return sum(c.bound_violations + c.babai_violations for c in self.cells)


def run_sweep(cfg: SweepConfig, progress=None) -> SweepMetrics:
    """Run the full sweep; progress (if given) is called once per SNR point."""
    cst = build(cfg.qam_order)
    bits_per_vec = cfg.m * cst.bits_per_symbol
    grid = cfg.snr_grid_db
    cells = [[CellMetrics(chain=spec.label, snr_db=s) for s in grid]
             for spec in cfg.chains]
    for si, snr_db in enumerate(grid):
        for trial in range(cfg.trials):
            rng = trial_rng(cfg.seed, si, trial)
            inst = draw(rng, cfg.m, cst, snr_db)
            cache = Prepared(inst, cst, cfg.delta)
            basis_checks = {}
            for ci, spec in enumerate(cfg.chains):
                out = run_chain(spec, inst, cst, cache=cache)
                cell = cells[ci][si]
                cell.trials += 1
                cell.bits += bits_per_vec
                cell.node_sum += out.total_nodes
                if out.declared_error:
                    cell.bit2 += bits_per_vec
                    cell.sym_vec_errors += 1
                else:
                    nbit = bit_distance(out.estimate_grid, inst.sent_grid, cst)
                    cell.bit2 += 2 * nbit
                    if nbit or not _same_vector(out.estimate_grid,
                                                inst.sent_grid):
                        cell.sym_vec_errors += 1
                if out.out_of_lattice:
                    cell.out_count += 1
                if out.stage2_invoked:
                    cell.stage2_count += 1
                if cfg.emit_bounds and spec.domain == "relaxed":
                    _check_bounds(spec, cache, basis_checks, cell)
        if progress is not None:
            progress(snr_db)
    metrics = SweepMetrics(config=cfg)
    for ci in range(len(cfg.chains)):
        metrics.cells.extend(cells[ci])
    return metrics


def _same_vector(a, b):
    return a.shape == b.shape and bool((a == b).all())


def _check_bounds(spec, cache: Prepared, memo, cell: CellMetrics):
    basis = "lll" if spec.preprocessing == "sqrd+lll" else "sqrd"
    if basis not in memo:
        r_mat = cache.factors(basis)[1]
        memo[basis] = (babai_radius(r_mat),
                       math.ceil(relaxed_complexity_upper_bound(r_mat)))
    beta, ceiling = memo[basis]
    res = cache.search(spec.search, "relaxed", basis)
    if res.first_leaf_distance > beta * (1.0 + 1e-9) + 1e-9:
        cell.babai_violations += 1
    if spec.search == "sesd" and res.nodes_visited > ceiling:
        cell.bound_violations += 1


def _fmt(v):
    if isinstance(v, str):
        return v
    if isinstance(v, int):
        return str(v)
    return f"{v:.12g}"


def _rows(metrics: SweepMetrics):
    cols = _COLUMNS + (_BOUND_COLUMNS if metrics.config.emit_bounds else ())
    for c in metrics.cells:
        row = {
            "chain": c.chain,
            "snr_db": c.snr_db,
            "trials": c.trials,
            "bits": c.bits,
            "bit_errors": c.bit_errors,
            "ber": c.ber,
            "sym_vec_errors": c.sym_vec_errors,
            "avg_nodes": c.avg_nodes,
            "out_of_lattice_rate": c.out_of_lattice_rate,
            "stage2_rate": c.stage2_rate,
            "bound_violations": c.bound_violations,
            "babai_violations": c.babai_violations,
        }
        yield cols, {k: row[k] for k in cols}


def emit(metrics: SweepMetrics, fmt, path=None):
    """Serialize the metrics to path (or stdout) in csv or json form."""
    if fmt not in _FORMATS:
        raise ConfigError(f"format must be one of {_FORMATS}")
    if fmt == "csv":
        lines = []
        header = None
        for cols, row in _rows(metrics):
            if header is None:
                header = cols
                lines.append(",".join(cols))
            lines.append(",".join(_fmt(row[k]) for k in cols))
        text = "\n".join(lines) + "\n"
    else:
        out = []
        for cols, row in _rows(metrics):
            jr = {}
            for k in cols:
                v = row[k]
                jr[k] = float(f"{v:.12g}") if isinstance(v, float) else v
            out.append(jr)
        text = json.dumps(out, indent=2) + "\n"
    if path is None:
        sys.stdout.write(text)
        return None
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as e:
        raise IoError(f"cannot write {path}: {e}") from e
    return path


def _parse_snr(text):
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return (float(parts[0]),)
        if len(parts) == 3:
            start, stop, step = (float(p) for p in parts)
        else:
            raise ConfigError(f"bad SNR grid {text!r}; use start:stop:step")
    except ValueError as e:
        raise ConfigError(f"bad SNR grid {text!r}: {e}") from e
    if step <= 0:
        raise ConfigError("SNR step must be positive")
    if stop < start:
        raise ConfigError("SNR stop is below start")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(start + i * step for i in range(n))


def build_config(args) -> SweepConfig:
    chains = tuple(parse_chain(c) for c in (args.chain or ()))
    return SweepConfig(
        m=args.m,
        qam_order=args.qam,
        snr_grid_db=_parse_snr(args.snr),
        trials=args.trials,
        seed=args.seed,
        chains=chains,
        emit_bounds=args.emit_bounds,
        delta=args.delta,
        output_path=args.out,
        format=args.format,
    )


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="latdet",
        description="Monte Carlo BER / node-count sweeps for lattice "
                    "detection chains.")
    ap.add_argument("--m", type=int, default=4, help="antennas per side")
    ap.add_argument("--qam", type=int, default=16, help="QAM order (4/16/64)")
    ap.add_argument("--snr", default="0:24:3",
                    help="SNR grid in dB: start:stop:step or a single value")
    ap.add_argument("--trials", type=int, default=100000,
                    help="channel realizations per SNR point")
    ap.add_argument("--seed", type=int, default=1, help="master RNG seed")
    ap.add_argument("--chain", action="append", metavar="SPEC",
                    help="detector chain, repeatable (e.g. sesd, rsesd:naive,"
                         " lll+sesd:cvr, lll+sic:naive)")
    ap.add_argument("--delta", type=float, default=0.75,
                    help="LLL reduction parameter")
    ap.add_argument("--emit-bounds", action="store_true",
                    help="check per-trial bound guarantees and append their "
                         "violation counts to the output")
    ap.add_argument("--out", default=None, help="output path (default stdout)")
    ap.add_argument("--format", choices=_FORMATS, default="csv")
    return ap


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        cfg = build_config(args)
        metrics = run_sweep(
            cfg, progress=lambda s: print(f"snr {s:g} dB done", file=sys.stderr))
        emit(metrics, cfg.format, cfg.output_path)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except LatdetError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    if metrics.total_violations:
        print(f"{metrics.total_violations} bound violations", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
