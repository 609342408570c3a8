"""Command-line front end.

Subcommands: measure, triangle, tetra, alpha-scan, roof, sample.  Exit codes
are 0 on success, 2 for bad input and 3 when a numerical contract fails
(NotATriangle, FaceInequalityViolation, NotApplicable, ...).
"""

from __future__ import annotations

import argparse
import csv
import io as _stdio
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .bipartite import as_measure, pure_functional
from .errors import InputError, NumericalContractError, StrategyError
from .geometry import (
    RefineConfig,
    alpha_estimate,
    bip_triangle_4,
    gamma_star_unordered,
    sample_seed,
    tetra_from_tripartitions,
    tetra_of_state,
    triangle_geom,
)
from .io import config_hash, dumps, read_state, state_to_dict, write_state
from .partitions import parse_partition
from .qstate import PureState, density_of, haar_random_pure, named_state, werner_state
from .quadripartite import (
    delta_bisep,
    e1234_2,
    e1234_3,
    edge_vector_4_bip,
    edge_vector_4_tri,
    eg1234_2,
    eg1234_3,
    f1234_2,
    f1234_3,
    roofed_eg1234_2,
    tilde_f1234_3,
)
from .roof import RoofConfig, roof_minimize
from .tripartite import e123, ef3, edge_vector_3, eg123, f123, roofed_composite, tau3

log = logging.getLogger("entgeom")

DEFAULT_SEED = 20240601
FAMILIES_3 = ("f123", "e123", "eg123")
FAMILIES_4 = ("f1234_2", "e1234_2", "eg1234_2", "f1234_3", "tilde_f1234_3", "e1234_3", "eg1234_3")

# RunConfig fields and their defaults; --config documents use the same keys
DEFAULTS = {
    "state": None,
    "dims": None,
    "measure": "tangle",
    "family": None,
    "variant": "ratio",
    "tri": "tau3",
    "gamma": 1.0,
    "cut": None,
    "samples": None,
    "seed": DEFAULT_SEED,
    "index": 0,
    "refine_iterations": 0,
    "out": None,
    "format": "json",
    "dump_ensemble": None,
    "roof": {},
}
ROOF_FLAGS = ("restarts", "ensemble_size", "max_iterations", "tolerance")


# ------------------------------------------------------------------ config


def _parse_dims(text) -> list[int]:
    if text is None:
        return None
    if isinstance(text, (list, tuple)):
        return [int(d) for d in text]
    try:
        return [int(d) for d in str(text).replace("x", ",").split(",") if d.strip()]
    except ValueError:
        raise InputError(f"--dims: expected comma-separated integers, got {text!r}") from None


def resolve_config(args: argparse.Namespace) -> dict:
    """Defaults, then the --config document, then explicit flags."""
    cfg = json.loads(json.dumps(DEFAULTS))
    if args.config:
        try:
            doc = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise InputError(f"cannot read config {args.config}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise InputError(f"{args.config}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
        if not isinstance(doc, dict):
            raise InputError(f"{args.config}: top level must be an object")
        unknown = set(doc) - set(DEFAULTS) - {"command"}
        if unknown:
            raise InputError(f"{args.config}: unknown field(s) {sorted(unknown)}")
        if doc.get("command", args.command) != args.command:
            raise InputError(f"{args.config}: field 'command' is {doc['command']!r}, invoked as {args.command!r}")
        for key, val in doc.items():
            if key == "roof":
                if not isinstance(val, dict):
                    raise InputError(f"{args.config}: field 'roof' must be an object")
                cfg["roof"].update(val)
            elif key != "command":
                cfg[key] = val
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if key != "roof" and val is not None:
            cfg[key] = val
    for key in ROOF_FLAGS:
        val = getattr(args, key, None)
        if val is not None:
            cfg["roof"][key] = val
    cfg["dims"] = _parse_dims(cfg["dims"])
    cfg["roof"].setdefault("seed", cfg["seed"])
    cfg["command"] = args.command
    return cfg


def roof_config(cfg: dict) -> RoofConfig:
    try:
        return RoofConfig.from_dict(cfg["roof"])
    except (TypeError, ValueError) as exc:
        raise InputError(f"roof settings: {exc}") from None


def load_state(source, dims=None, parties=None):
    """Named state, ``werner:p``, or a JSON state file."""
    if source is None:
        raise InputError("--state is required")
    text = str(source)
    low = text.lower()
    if low.startswith("werner:"):
        try:
            return werner_state(float(low.split(":", 1)[1]))
        except ValueError:
            raise InputError(f"bad Werner weight in {text!r}") from None
    if low in ("ghz", "w", "ghz4", "w4", "product", "product_zero"):
        if low.startswith("product") and dims is None:
            dims = [2] * (parties or 3)
        return named_state(low, dims)
    path = Path(text)
    if not path.exists():
        raise InputError(f"--state {text!r} is neither a named state (ghz, w, ghz4, w4, product, werner:p) nor a file")
    return read_state(path)


def _provenance(cfg: dict) -> dict:
    return {"tool": "entgeom", "version": __version__, "seed": cfg["seed"], "config_hash": config_hash(cfg)}


# ---------------------------------------------------------------- commands


def _measure3(state, cfg, rc) -> dict:
    d = as_measure(cfg["measure"])
    e = edge_vector_3(state, d, rc)
    out = {"edges": e.labelled(state.party_labels), "measure": d.name}
    if isinstance(state, PureState):
        out["measures"] = {
            "f123_ratio": f123(e, "ratio"),
            "f123_product": f123(e, "product"),
            "e123": e123(e),
            "eg123": eg123(e),
            "tau3": tau3(state),
            "ef3": ef3(state),
        }
        out["roof"] = False
    else:
        out["measures"] = {"f123_" + cfg["variant"]: f123(e, cfg["variant"]), "e123": e123(e)}
        if cfg["family"] == "eg123":
            res = roofed_composite(state, "eg123", d, rc)
            out["measures"]["eg123"] = res.value
            out["roof_metadata"] = res.metadata()
        out["roof"] = True
    fam = cfg["family"]
    if fam is not None:
        if fam not in FAMILIES_3:
            raise InputError(f"--family {fam!r} needs a four-party state; three-party families: {FAMILIES_3}")
        key = "f123_" + cfg["variant"] if fam == "f123" else fam
        out["family"] = fam
        out["value"] = out["measures"][key]
    return out


def _measure4(state, cfg, rc) -> dict:
    d = as_measure(cfg["measure"])
    variant = cfg["variant"]
    bip = edge_vector_4_bip(state, d, rc)
    tri = edge_vector_4_tri(state, cfg["tri"], d, variant, rc)
    out = {
        "measure": d.name,
        "tri": tri.tri_kind.value,
        "edges_bip": bip.as_dict(),
        "edges_tri": tri.as_dict(),
        "roof": not isinstance(state, PureState),
    }
    comp = {
        "f1234_2": f1234_2(bip, variant),
        "e1234_2": e1234_2(bip),
        "f1234_3": f1234_3(tri, variant),
        "e1234_3": e1234_3(tri),
    }
    if isinstance(state, PureState):
        dl = delta_bisep(state, d)
        out["delta"] = dl
        comp.update(
            {
                "eg1234_2": eg1234_2(bip),
                "tilde_f1234_3": tilde_f1234_3(tri, dl, variant),
                "eg1234_3": eg1234_3(tri, dl),
            }
        )
    elif cfg["family"] == "eg1234_2":
        res = roofed_eg1234_2(state, d, rc)
        comp["eg1234_2"] = res.value
        out["roof_metadata"] = res.metadata()
    out["measures"] = comp
    out["variant"] = variant
    fam = cfg["family"]
    if fam is not None:
        if fam not in FAMILIES_4:
            raise InputError(f"--family {fam!r} needs a three-party state; four-party families: {FAMILIES_4}")
        if fam not in comp:
            raise StrategyError(f"{fam} uses the biseparability indicator, which is evaluated on pure states only")
        out["family"] = fam
        out["value"] = comp[fam]
    return out


def cmd_measure(cfg: dict) -> dict:
    state = load_state(cfg["state"], cfg["dims"], parties=4 if cfg["family"] in FAMILIES_4 else 3)
    rc = roof_config(cfg)
    if state.num_parties == 3:
        return _measure3(state, cfg, rc)
    if state.num_parties == 4:
        return _measure4(state, cfg, rc)
    raise InputError(f"measure needs a 3- or 4-party state, got {state.num_parties} parties")


def cmd_triangle(cfg: dict) -> dict:
    state = load_state(cfg["state"], cfg["dims"])
    d = as_measure(cfg["measure"])
    g = float(cfg["gamma"])
    if not isinstance(state, PureState):
        raise InputError("triangle needs a pure state")
    if state.num_parties == 4:
        out = bip_triangle_4(state, d, g).as_dict()
        out["kind"] = "balanced_cut_triangle"
        return out
    if state.num_parties != 3:
        raise InputError(f"triangle needs 3 or 4 parties, got {state.num_parties}")
    e = edge_vector_3(state, d)
    out = triangle_geom(*(v**g for v in e.as_tuple())).as_dict()
    out.update({"kind": "edge_triangle", "gamma": g, "measure": d.name, "edge_values": e.labelled(state.party_labels)})
    try:
        out["gamma_star"] = gamma_star_unordered(e.as_tuple())
    except NumericalContractError as exc:
        out["gamma_star"] = None
        out["gamma_star_note"] = str(exc)
    return out


def cmd_tetra(cfg: dict) -> dict:
    state = load_state(cfg["state"], cfg["dims"], parties=4)
    if state.num_parties != 4:
        raise InputError(f"tetra needs a 4-party state, got {state.num_parties} parties")
    rc = roof_config(cfg)
    g = float(cfg["gamma"])
    if isinstance(state, PureState):
        geom = tetra_of_state(state, cfg["tri"], cfg["measure"], g, cfg["variant"], rc)
    else:
        e = edge_vector_4_tri(state, cfg["tri"], cfg["measure"], cfg["variant"], rc)
        geom = tetra_from_tripartitions(e, g)
    out = geom.as_dict()
    out["tri"] = cfg["tri"]
    return out


def cmd_alpha_scan(cfg: dict) -> dict:
    samples = cfg["samples"]
    if samples is None or int(samples) < 1:
        raise InputError(f"--samples must be a positive integer, got {samples}")
    dims = cfg["dims"] or [2, 2, 2]
    if len(dims) != 3:
        raise InputError(f"alpha-scan needs three parties, got dims {dims}")
    refine = None
    if int(cfg["refine_iterations"]) > 0:
        refine = RefineConfig(iterations=int(cfg["refine_iterations"]), seed=int(cfg["seed"]))
    est = alpha_estimate(dims, cfg["measure"], int(samples), int(cfg["seed"]), refine)
    prefix = Path(cfg["out"] or "alpha_scan")
    csv_path = prefix.with_suffix(".csv")
    witness_path = prefix.parent / (prefix.name + "_witness.json")
    buf = _stdio.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["seed", "gamma_star", "x", "y", "z"])
    for r in est.records:
        g = "" if r["gamma_star"] is None else repr(float(r["gamma_star"]))
        writer.writerow([r["seed"], g, repr(float(r["x"])), repr(float(r["y"])), repr(float(r["z"]))])
    csv_path.write_text(buf.getvalue())
    write_state(est.witness, witness_path)
    summary = est.summary()
    summary.update({"dims": dims, "measure": as_measure(cfg["measure"]).name, "csv_file": str(csv_path), "witness_file": str(witness_path)})
    cfg["_written"] = [str(csv_path), str(witness_path)]
    return summary


def _default_cut(obj) -> str:
    labels = obj.party_labels
    return labels[0] + "|" + "".join(labels[1:])


def cmd_roof(cfg: dict) -> dict:
    state = load_state(cfg["state"], cfg["dims"])
    rho = density_of(state) if isinstance(state, PureState) else state
    rc = roof_config(cfg)
    fam = cfg["family"]
    if fam in FAMILIES_3:
        res = roofed_composite(rho, fam, cfg["measure"], rc, cfg["variant"])
        what = {"functional": fam, "measure": as_measure(cfg["measure"]).name}
    elif fam == "eg1234_2":
        res = roofed_eg1234_2(rho, cfg["measure"], rc)
        what = {"functional": fam, "measure": as_measure(cfg["measure"]).name}
    elif fam is None:
        d = as_measure(cfg["measure"])
        cut = parse_partition(cfg["cut"] or _default_cut(rho), rho.party_labels)
        res = roof_minimize(rho, pure_functional(cut, d), rc)
        what = {"functional": d.name, "cut": str(cut)}
    else:
        raise InputError(f"--family {fam!r} has no roof form; use one of {FAMILIES_3 + ('eg1234_2',)}")
    out = {"value": res.value, "roof_config": rc.to_dict(), "optimizer": res.metadata(), **what}
    if cfg["dump_ensemble"]:
        ens = res.ensemble
        doc = {"weights": [float(w) for w in ens.weights], "members": [state_to_dict(m) for m in ens.members]}
        Path(cfg["dump_ensemble"]).write_text(dumps(doc) + "\n")
        out["ensemble_file"] = cfg["dump_ensemble"]
    return out


def cmd_sample(cfg: dict) -> dict:
    dims = cfg["dims"] or [2, 2, 2]
    idx = int(cfg["index"])
    s = sample_seed(int(cfg["seed"]), idx)
    state = haar_random_pure(dims, s)
    out = {"dims": dims, "index": idx, "sample_seed": s, "state": state_to_dict(state)}
    if cfg["out"]:
        write_state(state, cfg["out"])
        out = {k: v for k, v in out.items() if k != "state"}
        out["state_file"] = cfg["out"]
        cfg["_written"] = [cfg["out"]]
    return out


COMMANDS = {
    "measure": cmd_measure,
    "triangle": cmd_triangle,
    "tetra": cmd_tetra,
    "alpha-scan": cmd_alpha_scan,
    "roof": cmd_roof,
    "sample": cmd_sample,
}


# ------------------------------------------------------------------ output


def _flatten(prefix, obj, rows):
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, rows)
    elif isinstance(obj, (list, tuple)) and obj and isinstance(obj[0], (dict, list, tuple)):
        for i, v in enumerate(obj):
            _flatten(f"{prefix}.{i}", v, rows)
    else:
        rows.append((prefix, obj))


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return dumps(report) + "\n"
    rows = []
    _flatten("", json.loads(dumps(report)), rows)
    buf = _stdio.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])
    for k, v in rows:
        w.writerow([k, json.dumps(v) if isinstance(v, (list, dict)) else v])
    return buf.getvalue()


# -------------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--state", help="ghz, w, ghz4, w4, product, werner:p, or a JSON state file")
    common.add_argument("--dims", help="comma-separated local dimensions, e.g. 2,2,3")
    common.add_argument("--measure", help="bipartite measure: tangle, concurrence, eof, negativity")
    common.add_argument("--family", help="composite: " + ", ".join(FAMILIES_3 + FAMILIES_4))
    common.add_argument("--variant", choices=["ratio", "product"])
    common.add_argument("--tri", help="tripartite kind for four-party edges: tau3, ef3, eg123, e123, f123")
    common.add_argument("--gamma", type=float, help="edge exponent")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output path (alpha-scan: file prefix)")
    common.add_argument("--format", choices=["json", "csv"])
    common.add_argument("--config", help="JSON RunConfig document; explicit flags override it")
    common.add_argument("-v", "--verbose", action="store_true")
    roof = common.add_argument_group("convex roof")
    roof.add_argument("--restarts", type=int)
    roof.add_argument("--ensemble-size", type=int)
    roof.add_argument("--max-iterations", type=int)
    roof.add_argument("--tolerance", type=float)

    parser = argparse.ArgumentParser(prog="entgeom", description="Multipartite entanglement measures and their geometry.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("measure", parents=[common], help="edge vectors and composite measures")
    sub.add_parser("triangle", parents=[common], help="edge triangle (3 parties) or balanced-cut triangle (4 parties)")
    sub.add_parser("tetra", parents=[common], help="tetrahedron from the six tripartition values")
    p = sub.add_parser("alpha-scan", parents=[common], help="sample minimum of the saturation exponent")
    p.add_argument("--samples", type=int)
    p.add_argument("--refine-iterations", type=int)
    p = sub.add_parser("roof", parents=[common], help="convex-roof value of a mixed state")
    p.add_argument("--cut", help="bipartition such as A|BC (default: first party against the rest)")
    p.add_argument("--dump-ensemble", help="write the optimal decomposition to this JSON file")
    p = sub.add_parser("sample", parents=[common], help="Haar-random pure state, reproducible from seed and index")
    p.add_argument("--index", type=int)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        result = COMMANDS[args.command](cfg)
        written = cfg.pop("_written", [])
        report = {"command": args.command, "provenance": _provenance(cfg), "config": cfg, "result": result}
        text = render(report, cfg["format"])
        if cfg["out"] and args.command not in ("alpha-scan", "sample"):
            Path(cfg["out"]).write_text(text)
        elif args.command == "alpha-scan":
            summary_path = Path(cfg["out"] or "alpha_scan").with_suffix(".json")
            summary_path.write_text(text)
            written.append(str(summary_path))
            sys.stdout.write(text)
        else:
            sys.stdout.write(text)
        for path in written:
            log.info("wrote %s", path)
    except InputError as exc:
        print(f"entgeom: input error: {exc}", file=sys.stderr)
        return 2
    except NumericalContractError as exc:
        extra = ""
        if getattr(exc, "edges", None) is not None:
            extra = f" (edges: {list(exc.edges)})"
        print(f"entgeom: {type(exc).__name__}: {exc}{extra}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"entgeom: input error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
