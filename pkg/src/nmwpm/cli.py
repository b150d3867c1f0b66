"""File-driven command line: one seed in, reproducible artifacts out.

Every subcommand reads a plain ``key=value`` config (unknown keys are
errors), resolves defaults and ``--override`` flags, runs, and drops a
``manifest.txt`` next to its outputs.  The manifest is itself a valid
config file holding every resolved key, so

    nmwpm <command> --config manifest.txt --out elsewhere

replays the run bitwise on the same platform.  All file writes go
through a write-temp-then-rename step.

Exit codes: 0 success, 2 config error, 3 runtime failure.
"""

import argparse
import contextlib
import os
import sys
from pathlib import Path

import numpy as np

import nmwpm
from nmwpm.bench import (STREAM_DATA, STREAM_SHOTS, BaselineDecoder,
                         NeuralDecoder, estimate_threshold, export_histogram,
                         run_ler, write_histogram_csv, write_results_csv)
from nmwpm.graph import build_graph
from nmwpm.ground_truth import (GroundTruthTimeout, correction_from_paths,
                                default_paths, generate_shot,
                                ground_truth_full, is_logical_error,
                                record_from_ground_truth, write_dataset)
from nmwpm.lattice import ROTATED, TORIC, CodeLattice, build_rotated, build_toric
from nmwpm.noise import (DEPOLARIZING, INDEPENDENT, NoiseModel, Syndrome,
                         extract_syndrome, sample_error)
from nmwpm.qwp import QwpConfig, QwpParams, predict_edges
from nmwpm.training import TrainConfig, resolved_p_range, train


class ConfigError(Exception):
    """Anything wrong with keys, values, or files named by the config."""


# --- config parsing -------------------------------------------------------------

REQUIRED = object()


def parse_config_text(text: str) -> dict[str, str]:
    """key=value lines; '#' comments and blank lines ignored."""
    out: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value.strip()
    return out


def _int(s: str) -> int:
    return int(s)


def _float(s: str) -> float:
    return float(s)


def _floats(s: str) -> tuple[float, ...]:
    return tuple(float(x) for x in s.split(","))


def _ints(s: str) -> tuple[int, ...]:
    return tuple(int(x) for x in s.split(","))


def _str(s: str) -> str:
    return s


def _choice(*options: str):
    def parse(s: str) -> str:
        if s not in options:
            raise ValueError(f"must be one of {', '.join(options)}")
        return s
    return parse


_QWP = QwpConfig()

_BASE = {
    "code": (_choice(TORIC, ROTATED), REQUIRED),
    "noise": (_choice(INDEPENDENT, DEPOLARIZING), REQUIRED),
    "seed": (_int, "0"),
    "threads": (_int, str(os.cpu_count() or 1)),
}

_MODEL = {
    "d_hidden": (_int, str(_QWP.d_hidden)),
    "L_layers": (_int, str(_QWP.L_layers)),
    "K": (_int, str(_QWP.K)),
    "L_enc": (_int, str(_QWP.L_enc)),
    "d_pe": (_int, str(_QWP.d_pe)),
}

SCHEMAS: dict[str, dict] = {
    "gen-data": {**_BASE, "L": (_int, REQUIRED), "p": (_float, REQUIRED),
                 "shots": (_int, REQUIRED), "gt_budget_s": (_float, "0.1")},
    "train": {**_BASE, **_MODEL, "L": (_int, REQUIRED),
              "batch_size": (_int, "32"), "lr_init": (_float, "9e-05"),
              "lr_min": (_float, "1e-05"), "batches_per_epoch": (_int, "500"),
              "epochs": (_int, "200"), "entropy_weight": (_float, "0.01"),
              "p_range": (_floats, ""), "gt_budget_s": (_float, "0.1")},
    "bench": {**_BASE, **_MODEL, "L_grid": (_ints, REQUIRED),
              "p_grid": (_floats, REQUIRED), "shots": (_int, REQUIRED),
              "decoder": (_choice("mwpm_manhattan", "nmwpm", "both"),
                          "mwpm_manhattan"),
              "checkpoint": (_str, "")},
    "threshold": {**_BASE, **_MODEL, "L_grid": (_ints, REQUIRED),
                  "p_grid": (_floats, REQUIRED), "shots": (_int, REQUIRED),
                  "decoder": (_choice("mwpm_manhattan", "nmwpm"),
                              "mwpm_manhattan"),
                  "checkpoint": (_str, "")},
    "hist": {**_BASE, **_MODEL, "L": (_int, REQUIRED), "p": (_float, REQUIRED),
             "shots": (_int, REQUIRED), "bins": (_int, "20"),
             "checkpoint": (_str, REQUIRED)},
    "decode": {**_BASE, **_MODEL, "L": (_int, REQUIRED),
               "syndrome": (_str, REQUIRED), "checkpoint": (_str, "")},
    "gt-audit": {**_BASE, "L": (_int, REQUIRED), "p": (_float, REQUIRED),
                 "shots": (_int, REQUIRED), "gt_budget_s": (_float, "0.1")},
}


def resolve_config(command: str, file_mapping: dict[str, str],
                   overrides: dict[str, str], seed_flag, threads_flag
                   ) -> tuple[dict, dict[str, str]]:
    """Merge defaults < config file < overrides < flags.

    Returns (parsed values, raw strings); the raw form becomes the
    manifest.  Unknown or missing keys and unparseable values are
    ConfigErrors.
    """
    schema = SCHEMAS[command]
    raw = {k: d for k, (_, d) in schema.items() if d is not REQUIRED}
    for source_name, mapping in (("config file", file_mapping),
                                 ("override", overrides)):
        unknown = sorted(set(mapping) - set(schema))
        if unknown:
            raise ConfigError(
                f"unknown {source_name} keys for {command}: "
                f"{', '.join(unknown)}")
        raw.update(mapping)
    if seed_flag is not None:
        raw["seed"] = str(seed_flag)
    if threads_flag is not None:
        raw["threads"] = str(threads_flag)
    missing = sorted(k for k, (_, d) in schema.items()
                     if d is REQUIRED and k not in raw)
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}")
    parsed = {}
    for key, value in raw.items():
        if value == "":
            parsed[key] = None
            continue
        try:
            parsed[key] = schema[key][0](value)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {value!r} ({exc})") from exc
    _post_validate(parsed)
    return parsed, raw


_RANGE_CHECKS = {
    "L": lambda v: v >= 2,
    "shots": lambda v: v >= 1,
    "threads": lambda v: v >= 1,
    "bins": lambda v: v >= 2,
    "gt_budget_s": lambda v: v > 0,
    "p": lambda v: 0.0 <= v <= 1.0,
    "p_grid": lambda v: len(v) > 0 and all(0.0 <= p <= 1.0 for p in v),
    "L_grid": lambda v: len(v) > 0 and all(L >= 2 for L in v),
}


def _post_validate(parsed: dict) -> None:
    for key, ok in _RANGE_CHECKS.items():
        if parsed.get(key) is not None and not ok(parsed[key]):
            raise ConfigError(f"value out of range for {key}: {parsed[key]!r}")


# --- artifact helpers -----------------------------------------------------------

@contextlib.contextmanager
def atomic_path(final):
    """Yield a temp path in the target directory, rename on success."""
    final = Path(final)
    tmp = final.with_name(f".{final.name}.tmp{os.getpid()}")
    try:
        yield tmp
        os.replace(tmp, final)
    finally:
        tmp.unlink(missing_ok=True)


def write_manifest(out_dir: Path, command: str, raw: dict[str, str]) -> None:
    lines = [f"# nmwpm {nmwpm.__version__} manifest", f"# command: {command}"]
    lines += [f"{k}={raw[k]}" for k in sorted(raw)]
    with atomic_path(out_dir / "manifest.txt") as tmp:
        tmp.write_text("\n".join(lines) + "\n")


def _atomic_text(path, text: str) -> None:
    with atomic_path(path) as tmp:
        tmp.write_text(text)


def _lattice(cfg: dict, L=None) -> CodeLattice:
    L = cfg["L"] if L is None else L
    return build_toric(L) if cfg["code"] == TORIC else build_rotated(L)


def _model_config(cfg: dict) -> QwpConfig:
    try:
        return QwpConfig(d_hidden=cfg["d_hidden"], L_layers=cfg["L_layers"],
                         K=cfg["K"], L_enc=cfg["L_enc"], d_pe=cfg["d_pe"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _load_params(cfg: dict, lattice: CodeLattice) -> QwpParams:
    path = cfg.get("checkpoint")
    if not path:
        raise ConfigError("this run needs a checkpoint= path")
    if not Path(path).exists():
        raise ConfigError(f"checkpoint not found: {path}")
    return QwpParams.load(path, _model_config(cfg), lattice)


def _decoder(tag: str, cfg: dict, lattice: CodeLattice):
    if tag == "mwpm_manhattan":
        return BaselineDecoder()
    return NeuralDecoder(_load_params(cfg, lattice))


# --- subcommand bodies ----------------------------------------------------------

def cmd_gen_data(cfg: dict, raw: dict, out: Path) -> None:
    lattice = _lattice(cfg)
    model = NoiseModel(cfg["noise"], cfg["p"])
    records, timeouts = [], 0
    for k in range(cfg["shots"]):
        try:
            shot, gt = generate_shot(lattice, model,
                                     (cfg["seed"], STREAM_DATA, k),
                                     cfg["gt_budget_s"])
        except GroundTruthTimeout:
            timeouts += 1
            continue
        records.append(record_from_ground_truth(k, shot.syndrome, gt, lattice))
    with atomic_path(out / "dataset.bin") as tmp:
        n = write_dataset(tmp, lattice, model, records)
    print(f"wrote {n} labeled shots ({timeouts} timeouts) "
          f"-> {out / 'dataset.bin'}")


def cmd_train(cfg: dict, raw: dict, out: Path) -> None:
    train_keys = ("batch_size", "lr_init", "lr_min", "batches_per_epoch",
                  "epochs", "entropy_weight", "seed")
    try:
        tc = TrainConfig(**{k: cfg[k] for k in train_keys},
                         p_range=cfg["p_range"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    lattice = _lattice(cfg)
    lo, hi = resolved_p_range(tc, cfg["noise"])
    raw["p_range"] = f"{lo!r},{hi!r}"   # manifest pins the range actually used
    params, metrics = train(tc, lattice, cfg["noise"], model=_model_config(cfg),
                            out_dir=out, gt_budget_s=cfg["gt_budget_s"])
    with atomic_path(out / "model.ckpt") as tmp:
        params.save(tmp)
    last = metrics[-1]
    print(f"trained {len(metrics)} epochs; final loss {last['loss']:.4f} "
          f"edge_acc {last['edge_acc']:.3f} -> {out / 'model.ckpt'}")


def _bench_results(cfg: dict, tags) -> list:
    if any(t == "nmwpm" for t in tags) and len(cfg["L_grid"]) != 1:
        raise ConfigError("a checkpoint binds one lattice; nmwpm runs need "
                          "a single-entry L_grid")
    results = []
    for tag in tags:
        for L in cfg["L_grid"]:
            lattice = _lattice(cfg, L)
            decoder = _decoder(tag, cfg, lattice)
            for p in cfg["p_grid"]:
                r = run_ler(decoder, lattice, cfg["noise"], p, cfg["shots"],
                            cfg["seed"], threads=cfg["threads"])
                print(f"{tag} L={L} p={p:g}: ler={r.ler:.6g}")
                results.append(r)
    return results


def cmd_bench(cfg: dict, raw: dict, out: Path) -> None:
    tags = {"both": ("mwpm_manhattan", "nmwpm")}.get(
        cfg["decoder"], (cfg["decoder"],))
    results = _bench_results(cfg, tags)
    with atomic_path(out / "results.csv") as tmp:
        write_results_csv(tmp, results)
    print(f"wrote {len(results)} rows -> {out / 'results.csv'}")


def cmd_threshold(cfg: dict, raw: dict, out: Path) -> None:
    if len(cfg["L_grid"]) < 2:
        raise ConfigError("threshold needs at least 2 distances in L_grid")
    if len(cfg["p_grid"]) < 4:
        raise ConfigError("threshold needs at least 4 p-points in p_grid")
    results = _bench_results(cfg, (cfg["decoder"],))
    estimate = estimate_threshold(results)
    with atomic_path(out / "results.csv") as tmp:
        write_results_csv(tmp, results)
    report = "\n".join([
        f"p_th={estimate.p_th!r}",
        f"spread={estimate.spread!r}",
        "crossings=" + ",".join(repr(c) for c in estimate.crossings),
        f"degenerate_pairs={estimate.degenerate_pairs}",
    ]) + "\n"
    _atomic_text(out / "threshold.txt", report)
    print(f"p_th={estimate.p_th:.6f} spread={estimate.spread:.6f} "
          f"({len(estimate.crossings)} crossings, "
          f"{estimate.degenerate_pairs} degenerate pairs)")


def cmd_hist(cfg: dict, raw: dict, out: Path) -> None:
    lattice = _lattice(cfg)
    params = _load_params(cfg, lattice)
    model = NoiseModel(cfg["noise"], cfg["p"])
    chunks = []
    for k in range(cfg["shots"]):
        frame = sample_error(model, lattice, (cfg["seed"], STREAM_SHOTS, k))
        syndrome = extract_syndrome(frame, lattice)
        if not syndrome.any():
            continue
        g = build_graph(syndrome, lattice, cfg["noise"], d_pe=params.config.d_pe)
        if len(g.directed_edges):
            chunks.append(predict_edges(g, params).values.reshape(-1))
    probs = np.concatenate(chunks) if chunks else np.empty(0)
    rows = export_histogram(probs, cfg["bins"])
    with atomic_path(out / "histogram.csv") as tmp:
        write_histogram_csv(tmp, rows)
    print(f"binned {probs.size} edge probabilities "
          f"-> {out / 'histogram.csv'}")


def read_syndrome_file(path, lattice: CodeLattice) -> Syndrome:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read syndrome file: {exc}") from exc
    bits_txt = "".join(text.split())
    if not set(bits_txt) <= {"0", "1"}:
        raise ConfigError("syndrome file must contain only 0/1 characters")
    if len(bits_txt) != lattice.n_stabs:
        raise ConfigError(f"syndrome has {len(bits_txt)} bits, lattice "
                          f"expects {lattice.n_stabs}")
    return Syndrome(np.frombuffer(bits_txt.encode(), dtype=np.uint8) - ord("0"))


def cmd_decode(cfg: dict, raw: dict, out: Path) -> None:
    lattice = _lattice(cfg)
    syndrome = read_syndrome_file(cfg["syndrome"], lattice)
    tag = "nmwpm" if cfg.get("checkpoint") else "mwpm_manhattan"
    matching = _decoder(tag, cfg, lattice).match(syndrome, lattice, cfg["noise"])
    correction = correction_from_paths(lattice,
                                       default_paths(lattice, matching))
    lines = [f"decoder={tag}", f"defects={len(syndrome.defects())}"]
    lines += [f"pair=({a}, {b})" for a, b in matching.pairs]
    for name, bits in (("x_qubits", correction.x_bits),
                       ("z_qubits", correction.z_bits)):
        lines.append(f"{name}=" + ",".join(str(q) for q in np.flatnonzero(bits)))
    text = "\n".join(lines) + "\n"
    _atomic_text(out / "decode.txt", text)
    print(text, end="")


def audit_shots(lattice: CodeLattice, model: NoiseModel, shots: int,
                seed: int, budget_s: float = 0.1) -> dict:
    """Ground-truth validity audit over fresh shots.

    Valid means: the stored correction zeroes the syndrome and commutes
    with every logical operator — checked against the realized path
    decisions (wrap/boundary flags), the same ones the dataset persists.
    """
    timeouts = residual = logical = 0
    for k in range(shots):
        frame = sample_error(model, lattice, (seed, STREAM_DATA, k))
        try:
            gt = ground_truth_full(frame, lattice, budget_s)
        except GroundTruthTimeout:
            timeouts += 1
            continue
        try:
            if is_logical_error(frame, gt.correction, lattice):
                logical += 1
        except ValueError:
            residual += 1
    audited = shots - timeouts
    valid = audited - residual - logical
    return {"shots": shots, "timeouts": timeouts,
            "timeout_rate": timeouts / shots if shots else 0.0,
            "audited": audited, "residual_failures": residual,
            "logical_failures": logical, "valid": valid,
            "validity_rate": valid / audited if audited else 1.0}


def cmd_gt_audit(cfg: dict, raw: dict, out: Path) -> None:
    lattice = _lattice(cfg)
    model = NoiseModel(cfg["noise"], cfg["p"])
    report = audit_shots(lattice, model, cfg["shots"], cfg["seed"],
                         cfg["gt_budget_s"])
    text = "".join(f"{k}={v!r}\n" for k, v in report.items())
    _atomic_text(out / "audit.txt", text)
    print(f"audited {report['audited']}/{report['shots']} shots: "
          f"validity_rate={report['validity_rate']:.6f} "
          f"timeout_rate={report['timeout_rate']:.6f}")


COMMANDS = {"gen-data": cmd_gen_data, "train": cmd_train, "bench": cmd_bench,
            "threshold": cmd_threshold, "hist": cmd_hist,
            "decode": cmd_decode, "gt-audit": cmd_gt_audit}


# --- entry point ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nmwpm",
        description="Surface-code decoding experiments, driven by "
                    "key=value configs.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="key=value config file")
        p.add_argument("--seed", type=int, help="master RNG seed "
                       "(overrides the config's seed key)")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--threads", type=int, help="worker thread cap "
                       "(default: available cores)")
        p.add_argument("--override", action="append", default=[],
                       metavar="KEY=VALUE", help="config override, repeatable")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        file_mapping = {}
        if args.config:
            try:
                file_mapping = parse_config_text(Path(args.config).read_text())
            except OSError as exc:
                raise ConfigError(f"cannot read config: {exc}") from exc
        overrides = {}
        for item in args.override:
            if "=" not in item:
                raise ConfigError(f"--override needs KEY=VALUE, got {item!r}")
            key, value = item.split("=", 1)
            overrides[key] = value
        cfg, raw = resolve_config(args.command, file_mapping, overrides,
                                  args.seed, args.threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        COMMANDS[args.command](cfg, raw, out)
        write_manifest(out, args.command, raw)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - map anything else to exit 3
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
