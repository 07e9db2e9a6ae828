"""Command-line front end: ``gram``, ``classify`` and ``inspect``.

Settings come from built-in defaults, then an optional JSON ``--config``
file, then explicit flags. Exit codes: 0 ok, 2 I/O, 3 configuration,
4 internal error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ConfigError, DatasetError, EmptyRepresentation, LCSKernelError
from .evaluation import C_GRID, LAMBDA_GRID, cross_validate
from .graph import Dataset, load_tudataset
from .kernel import (
    GramMatrix,
    KernelParams,
    default_workers,
    distance_matrix,
    load_gram,
    read_gram_header,
    save_gram,
)
from .paths import all_pairs_shortest_paths
from .representation import FlcsParams, build_basic, build_fast
from .transport import OTSettings

logger = logging.getLogger("lcskernel")

EXIT_OK, EXIT_IO, EXIT_CONFIG, EXIT_INTERNAL = 0, 2, 3, 4

RHO_GRID = (0.6, 0.8, 1.0)
S_GRID = (0.0, 0.2, 0.5, 0.8)


@dataclass
class RunConfig:
    dataset: str | None = None
    name: str | None = None
    variant: str = "blcs"
    rho: float | None = None
    s: float | None = None
    lam: float | None = None
    lambda_grid: tuple[float, ...] = LAMBDA_GRID
    rho_grid: tuple[float, ...] | None = None
    s_grid: tuple[float, ...] | None = None
    c_grid: tuple[float, ...] = C_GRID
    epsilon: float = 0.01
    tol: float = 1e-9
    max_iter: int = 10_000
    exact_max_size: int = OTSettings.exact_max_size
    workers: int | None = None
    seed: int = 0
    folds: int = 10
    repeats: int = 10
    inner_folds: int = 5
    out: str | None = None
    cache_dir: str | None = None
    no_cache: bool = False
    with_timing: bool = False
    graph_id: int | None = None

    @property
    def dataset_name(self) -> str:
        return self.name or Path(self.dataset).name

    @property
    def ot(self) -> OTSettings:
        return OTSettings(self.epsilon, self.tol, self.max_iter, self.exact_max_size)

    def validate(self) -> "RunConfig":
        """Check every setting before any work starts; raises ConfigError."""
        if not self.dataset:
            raise ConfigError("--dataset is required")
        self.variant = str(self.variant).lower()
        if self.variant not in ("blcs", "flcs"):
            raise ConfigError(f"unknown variant {self.variant!r}")
        flcs_only = {"rho": self.rho, "s": self.s, "rho_grid": self.rho_grid, "s_grid": self.s_grid}
        if self.variant == "blcs":
            given = [k for k, v in flcs_only.items() if v is not None]
            if given:
                raise ConfigError(f"{', '.join(given)} only apply to the flcs variant")
        for rho in self.rhos():
            for s in self.ss():
                FlcsParams(rho, s)
        for lam in self.lambdas():
            KernelParams(lam=lam)
        self.ot  # noqa: B018  (validates the OT settings)
        if any(not c > 0 for c in self.c_grid) or not self.c_grid:
            raise ConfigError("C grid values must be > 0")
        if self.folds < 2 or self.inner_folds < 2 or self.repeats < 1:
            raise ConfigError("folds and inner folds must be >= 2, repeats >= 1")
        if self.workers is not None and self.workers < 1:
            raise ConfigError("--workers must be >= 1")
        return self

    def rhos(self) -> tuple[float, ...]:
        if self.variant != "flcs":
            return ()
        if self.rho is not None:
            return (self.rho,)
        return tuple(self.rho_grid or RHO_GRID)

    def ss(self) -> tuple[float, ...]:
        if self.variant != "flcs":
            return ()
        if self.s is not None:
            return (self.s,)
        return tuple(self.s_grid or S_GRID)

    def lambdas(self) -> tuple[float, ...]:
        return (self.lam,) if self.lam is not None else tuple(self.lambda_grid)

    def flcs_settings(self) -> list[FlcsParams | None]:
        if self.variant == "blcs":
            return [None]
        return [FlcsParams(r, s) for r in self.rhos() for s in self.ss()]


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dataset", help="directory holding <NAME>_A.txt and friends")
    p.add_argument("--name", help="file prefix inside the directory (default: directory name)")
    p.add_argument("--config", help="JSON file with settings; flags override it")
    p.add_argument("--variant", choices=["blcs", "flcs"], type=str.lower)
    p.add_argument("--rho", type=float, help="removing ratio (flcs)")
    p.add_argument("--s", type=float, help="merging radius (flcs)")
    p.add_argument("--epsilon", type=float, help="Sinkhorn regularization")
    p.add_argument("--exact-max-size", type=int, help="largest n1*n2 solved exactly")
    p.add_argument("--workers", type=int, help="worker processes (default: available cores)")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lcskernel", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gram", help="compute and write a Gram matrix")
    _common(g)
    g.add_argument("--lambda", dest="lam", type=float, help="kernel width (default 1)")
    g.add_argument("--out", help="output CSV path")

    c = sub.add_parser("classify", help="10x10-fold SVM accuracy with nested grid search")
    _common(c)
    c.add_argument("--lambda", dest="lam", type=float, help="fix lambda instead of searching")
    c.add_argument("--lambda-grid", type=_floats)
    c.add_argument("--rho-grid", type=_floats)
    c.add_argument("--s-grid", type=_floats)
    c.add_argument("--c-grid", type=_floats)
    c.add_argument("--seed", type=int)
    c.add_argument("--folds", type=int)
    c.add_argument("--repeats", type=int)
    c.add_argument("--inner-folds", type=int)
    c.add_argument("--out", help="output JSON path")
    c.add_argument("--cache-dir", help="directory of reusable Gram files")
    c.add_argument("--no-cache", action="store_true", default=None)
    c.add_argument("--with-timing", action="store_true", default=None,
                   help="include wall-clock timings in the JSON report")

    i = sub.add_parser("inspect", help="representation statistics of one graph")
    _common(i)
    i.add_argument("--graph-id", type=int, required=True)
    i.add_argument("--rho-grid", type=_floats)
    i.add_argument("--s-grid", type=_floats)
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, then the JSON config file, then explicit flags."""
    names = {f.name for f in fields(RunConfig)}
    values: dict = {}
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                loaded = json.load(fh)
        except OSError as exc:
            raise DatasetError(f"cannot read config {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {args.config} is not valid JSON: {exc}") from exc
        if "lambda" in loaded:
            loaded["lam"] = loaded.pop("lambda")
        unknown = set(loaded) - names
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        values.update(loaded)
    for k, v in vars(args).items():
        if k in names and v is not None:
            values[k] = v
    for k in ("lambda_grid", "rho_grid", "s_grid", "c_grid"):
        if values.get(k) is not None:
            values[k] = tuple(float(x) for x in values[k])
    return RunConfig(**values).validate()


def _load(cfg: RunConfig, class_labels: bool = True) -> Dataset:
    return load_tudataset(cfg.dataset, cfg.dataset_name, require_class_labels=class_labels)


def _workers(cfg: RunConfig) -> int:
    return cfg.workers or default_workers()


# --- gram ------------------------------------------------------------------

def cmd_gram(cfg: RunConfig) -> int:
    params = KernelParams(cfg.variant, cfg.lam if cfg.lam is not None else 1.0,
                          cfg.flcs_settings()[0], cfg.ot)
    dataset = _load(cfg, class_labels=False)
    out = Path(cfg.out or f"{dataset.name}_{cfg.variant}_gram.csv")
    dm = distance_matrix(dataset, params, _workers(cfg))
    dm.dataset = dataset.name
    gram = dm.gram()
    save_gram(gram, out)
    n = gram.values.shape[0]
    print(f"{dataset.name}: {n}x{n} {cfg.variant} Gram matrix written to {out} "
          f"in {gram.seconds:.2f} s")
    if gram.excluded:
        print(f"excluded graphs (no shortest paths): {gram.excluded}")
    if gram.warnings:
        print(f"{len(gram.warnings)} entries from non-converged Sinkhorn runs")
    eig = gram.min_eigenvalue()
    if eig is not None:
        print(f"smallest eigenvalue: {eig:.6g}")
    return EXIT_OK


# --- classify --------------------------------------------------------------

def _cache_path(cache_dir: Path, name: str, params: KernelParams) -> Path:
    stem = f"{name}_{params.variant}"
    if params.flcs is not None:
        stem += f"_rho{params.flcs.removing_ratio:g}_s{params.flcs.merging_radius:g}"
    return cache_dir / f"{stem}_lam{params.lam:g}.csv"


def _cached(path: Path, params: KernelParams, dataset: Dataset) -> GramMatrix | None:
    """The Gram file at ``path`` if its header matches ``params`` and ``dataset``."""
    if not path.is_file():
        return None
    try:
        header = read_gram_header(path)
    except (ValueError, OSError):
        return None
    if (
        header.get("params") != json.loads(json.dumps(params.to_dict()))
        or header.get("dataset") != dataset.name
        or len(header.get("graph_ids", [])) + len(header.get("excluded", [])) != len(dataset)
    ):
        return None
    return load_gram(path)


def _grams_for(cfg: RunConfig, dataset: Dataset, flcs: FlcsParams | None, cache_dir: Path | None,
               timing: dict) -> dict[float, GramMatrix]:
    """Gram matrices over the lambda grid for one representation setting."""
    lams = cfg.lambdas()
    wanted = {lam: KernelParams(cfg.variant, lam, flcs, cfg.ot) for lam in lams}
    grams: dict[float, GramMatrix] = {}
    if cache_dir is not None:
        for lam, params in wanted.items():
            g = _cached(_cache_path(cache_dir, dataset.name, params), params, dataset)
            if g is not None:
                grams[lam] = g
    if len(grams) == len(lams):
        logger.info("reusing cached Gram matrices for %s", flcs)
        return grams
    dm = distance_matrix(dataset, wanted[lams[0]], _workers(cfg))
    dm.dataset = dataset.name
    timing["gram"] = timing.get("gram", 0.0) + dm.seconds
    for lam in lams:
        grams[lam] = dm.gram(lam)
        if cache_dir is not None:
            save_gram(grams[lam], _cache_path(cache_dir, dataset.name, wanted[lam]))
    return grams


def cmd_classify(cfg: RunConfig) -> int:
    dataset = _load(cfg)
    out = Path(cfg.out or f"{dataset.name}_{cfg.variant}_cv.json")
    cache_dir = None if cfg.no_cache else Path(cfg.cache_dir or out.parent / "gram_cache")
    timing: dict[str, float] = {}
    keyed: dict = {}
    for flcs in cfg.flcs_settings():
        for lam, g in _grams_for(cfg, dataset, flcs, cache_dir, timing).items():
            key = lam if flcs is None else (flcs.removing_ratio, flcs.merging_radius, lam)
            keyed[key] = g
    ids = {tuple(g.graph_ids) for g in keyed.values()}
    if len(ids) != 1:
        raise LCSKernelError("Gram matrices disagree on the retained graphs")
    kept = list(next(iter(ids)))
    labels = np.asarray([dataset.class_labels[i] for i in kept])
    report = cross_validate(
        keyed, labels, cfg.c_grid, cfg.folds, cfg.repeats, cfg.seed, cfg.inner_folds,
        _workers(cfg),
    )
    report.dataset = dataset.name
    report.variant = cfg.variant
    report.timing = {**timing, **report.timing}
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(report.to_json(timing=cfg.with_timing) + "\n")
    print(report.summary())
    return EXIT_OK


# --- inspect ---------------------------------------------------------------

def cmd_inspect(cfg: RunConfig) -> int:
    dataset = _load(cfg, class_labels=False)
    gid = cfg.graph_id
    if gid is None or not 0 <= gid < len(dataset):
        raise ConfigError(f"graph id {gid} out of range 0..{len(dataset) - 1}")
    graph = dataset[gid]
    pairs = len(all_pairs_shortest_paths(graph))
    print(f"{dataset.name} graph {gid}: {graph.n_vertices} vertices, {graph.n_edges} edges, "
          f"{pairs} ordered reachable pairs")
    try:
        basic = build_basic(graph, dataset.has_edge_labels)
    except EmptyRepresentation as exc:
        print(f"EmptyRepresentation: {exc}")
        return EXIT_OK
    print(f"blcs: {len(basic)} sequences, total mass {basic.total_mass}")
    print("length histogram: " + ", ".join(f"{k}:{v}" for k, v in basic.length_histogram().items()))
    rhos = tuple(cfg.rho_grid or RHO_GRID)
    ss = tuple(cfg.s_grid or S_GRID)
    print("retained centers (rows rho, columns s)")
    print("rho\\s " + " ".join(f"{s:>6g}" for s in ss))
    for rho in rhos:
        counts = [len(build_fast(graph, FlcsParams(rho, s), dataset.has_edge_labels)) for s in ss]
        print(f"{rho:<5g} " + " ".join(f"{c:>6d}" for c in counts))
    return EXIT_OK


COMMANDS = {"gram": cmd_gram, "classify": cmd_classify, "inspect": cmd_inspect}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
    )
    try:
        if args.command == "inspect":
            # the sweep grids apply to inspect regardless of variant
            grids = (args.rho_grid, args.s_grid)
            args.rho_grid = args.s_grid = None
            cfg = load_config(args)
            cfg = replace(cfg, rho_grid=grids[0], s_grid=grids[1])
        else:
            cfg = load_config(args)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DatasetError, OSError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except Exception as exc:  # noqa: BLE001
        logger.debug("internal error", exc_info=True)
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
