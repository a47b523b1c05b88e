"""Batch command-line front end.

Subcommands:

* ``saliency`` - one image in, one saliency PGM (+ sidecar) out.
* ``eval``     - run a manifest of images x methods against fixation
  ground truth, writing per-image and aggregate AUC/NSS/timing rows plus
  ROC curves.
* ``transform`` - debug dump of raw wavelet coefficients.

Exit codes: 0 success, 1 processing failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import glob
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import WavesalError
from .evaluation import EvalScore, aggregate, nss, roc_auc
from .imagedata import SaliencyMap, load_fixations, load_image, write_map
from .pss import PssConfig, pss_map
from .saliency import SaliencyConfig, compute_map
from .wavelet import transform

_TRANSFORMS = ("dwt", "dwptbb", "qwt", "qwptbb")


class UsageError(Exception):
    pass


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _levels_ge2(text: str) -> int:
    value = _positive_int(text)
    if value < 2:
        raise argparse.ArgumentTypeError("must be >= 2")
    return value


def _sigma_value(text: str):
    if text == "auto":
        return "auto"
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number or 'auto': {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def _check_depth(image, levels: int) -> None:
    if 2**levels > min(image.data.shape):
        raise UsageError(
            f"--levels {levels} too deep for a "
            f"{image.width}x{image.height} image"
        )


def _resolve_sigma(sigma, image) -> float:
    return image.width / 32.0 if sigma == "auto" else float(sigma)


def cmd_saliency(args) -> int:
    image = load_image(args.image)
    _check_depth(image, args.levels)
    config = SaliencyConfig(
        mode=args.mode,
        scale_rule=args.scale_rule,
        levels=args.levels,
        transform_kind=args.transform,
        smoothing_sigma=_resolve_sigma(args.sigma, image),
    )
    smap, field = compute_map(image, config)
    stem = os.path.splitext(os.path.basename(args.image))[0]
    out_dir = args.out_dir or os.path.dirname(os.path.abspath(args.image))
    os.makedirs(out_dir, exist_ok=True)
    base = f"{stem}.{args.transform}.{args.scale_rule}"
    out_path = os.path.join(out_dir, base + ".pgm")
    write_map(smap, out_path)
    if args.dump_ggd:
        from .descriptors import fit_ggd_table, ggd_table_rows

        tree = transform(image, config.transform_kind, levels=config.levels)
        with open(os.path.join(out_dir, base + ".ggd.csv"), "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["depth", "band_id", "alpha", "beta"])
            for depth, band_id, alpha, beta in ggd_table_rows(fit_ggd_table(tree)):
                writer.writerow([depth, band_id, f"{alpha:.9g}", f"{beta:.9g}"])
    if args.dump_scales:
        with open(os.path.join(out_dir, base + ".scales.csv"), "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["x", "y", "s_p", "H", "MI"])
            for y in range(image.height):
                for x in range(image.width):
                    writer.writerow([
                        x, y, int(field.positions[y, x]),
                        f"{field.h_values[y, x]:.6f}",
                        f"{field.mi_values[y, x]:.6f}",
                    ])
    print(out_path)
    return 0


def cmd_transform(args) -> int:
    image = load_image(args.image)
    _check_depth(image, args.levels)
    tree = transform(image, args.transform, levels=args.levels)
    rows = []
    for node in tree.all_nodes():
        coeffs = node.coeffs
        dual = coeffs.ndim == 3
        for yy in range(coeffs.shape[0]):
            for xx in range(coeffs.shape[1]):
                vals = coeffs[yy, xx, :] if dual else [coeffs[yy, xx]]
                rows.append(
                    [node.depth, node.node_index, node.orientation, xx, yy]
                    + [f"{v:.12g}" for v in np.atleast_1d(vals)]
                )
    out = sys.stdout if args.out in (None, "-") else open(args.out, "w", newline="")
    try:
        writer = csv.writer(out, lineterminator="\n")
        header = ["depth", "node_index", "orientation", "x", "y", "c1"]
        if tree.transform_kind in ("QWT", "QWPTBB"):
            header += ["c2", "c3", "c4"]
        writer.writerow(header)
        writer.writerows(rows)
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


@dataclass(frozen=True)
class MethodSpec:
    kind: str  # wavelet | pss | external
    transform: str = ""
    scale_rule: str = ""
    mode: str = ""

    @property
    def tag(self) -> str:
        if self.kind == "wavelet":
            return f"{self.transform.lower()}.{self.scale_rule.lower()}.{self.mode}"
        return "pss" if self.kind == "pss" else "itt-external"

    def columns(self):
        if self.kind == "wavelet":
            return self.transform.upper(), self.mode, self.scale_rule.upper()
        return ("PSS", "", "") if self.kind == "pss" else ("ITT-external", "", "")


def _parse_method(text: str) -> MethodSpec:
    parts = [p.strip() for p in text.split(":")]
    head = parts[0].upper()
    if head == "PSS":
        return MethodSpec(kind="pss")
    if head == "ITT-EXTERNAL":
        return MethodSpec(kind="external")
    if head in ("DWT", "DWPTBB", "QWT", "QWPTBB"):
        rule = parts[1].upper() if len(parts) > 1 and parts[1] else "WSS"
        mode = parts[2].lower() if len(parts) > 2 and parts[2] else "observer"
        if rule not in ("WSS", "DIS") or mode not in ("observer", "searcher"):
            raise UsageError(f"bad method spec {text!r}")
        return MethodSpec(kind="wavelet", transform=head, scale_rule=rule, mode=mode)
    raise UsageError(f"unknown method {text!r}")


@dataclass
class Manifest:
    root: str
    image_glob: str
    fixation_dir: str
    output_dir: str
    methods: list
    levels: int = 4
    sigma: object = "auto"
    external_dir: str = ""


def _parse_manifest(path: str) -> Manifest:
    base = os.path.dirname(os.path.abspath(path))
    keys = {"dataset_root": base, "image_glob": "", "fixation_dir": "",
            "output_dir": "", "levels": "4", "sigma": "auto", "external_dir": ""}
    methods = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"{path}: line {lineno}: expected key=value")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key == "method":
                methods.append(_parse_method(value))
            elif key in keys:
                keys[key] = value
            else:
                raise UsageError(f"{path}: line {lineno}: unknown key {key!r}")
    if not methods:
        raise UsageError(f"{path}: no method lines")
    for required in ("image_glob", "fixation_dir", "output_dir"):
        if not keys[required]:
            raise UsageError(f"{path}: missing {required}=")
    root = keys["dataset_root"]
    if not os.path.isabs(root):
        root = os.path.join(base, root)
    try:
        levels = int(keys["levels"])
        sigma = keys["sigma"] if keys["sigma"] == "auto" else float(keys["sigma"])
    except ValueError:
        raise UsageError(f"{path}: levels/sigma must be numeric") from None
    if levels < 2:
        raise UsageError(f"{path}: levels must be >= 2")
    manifest = Manifest(
        root=root,
        image_glob=keys["image_glob"],
        fixation_dir=os.path.join(root, keys["fixation_dir"]),
        output_dir=os.path.join(root, keys["output_dir"]),
        methods=methods,
        levels=levels,
        sigma=sigma,
        external_dir=os.path.join(root, keys["external_dir"]) if keys["external_dir"] else "",
    )
    if not os.path.isdir(manifest.root):
        raise UsageError(f"dataset root {manifest.root!r} does not exist")
    if not os.path.isdir(manifest.fixation_dir):
        raise UsageError(f"fixation dir {manifest.fixation_dir!r} does not exist")
    if any(m.kind == "external" for m in methods):
        if not manifest.external_dir or not os.path.isdir(manifest.external_dir):
            raise UsageError("ITT-external method needs an existing external_dir=")
    return manifest


def _run_method(spec: MethodSpec, image, stem: str, manifest: Manifest):
    """Returns (SaliencyMap, compute-seconds)."""
    if spec.kind == "pss":
        start = time.perf_counter()
        smap = pss_map(image, PssConfig())
        return smap, time.perf_counter() - start
    if spec.kind == "external":
        ext = load_image(os.path.join(manifest.external_dir, stem + ".pgm"))
        return SaliencyMap(ext.data, method_tag="itt-external"), 0.0
    config = SaliencyConfig(
        mode=spec.mode,
        scale_rule=spec.scale_rule,
        levels=manifest.levels,
        transform_kind=spec.transform,
        smoothing_sigma=_resolve_sigma(manifest.sigma, image),
    )
    start = time.perf_counter()
    smap, _ = compute_map(image, config)
    return smap, time.perf_counter() - start


def _eval_one_image(image_path: str, manifest: Manifest):
    stem = os.path.splitext(os.path.basename(image_path))[0]
    fix_path = os.path.join(manifest.fixation_dir, stem + ".csv")
    if not os.path.exists(fix_path):
        print(f"warning: no fixation file for {stem}; skipped", file=sys.stderr)
        return [("skip", stem)], []
    image = load_image(image_path)
    fixations = load_fixations(fix_path, image)
    scores = []
    rocs = []
    for spec in manifest.methods:
        smap, seconds = _run_method(spec, image, stem, manifest)
        curve = roc_auc(smap, fixations)
        import warnings as _warnings

        with _warnings.catch_warnings():
            _warnings.simplefilter("ignore")
            nss_value = nss(smap, fixations)
        method, mode, rule = spec.columns()
        scores.append(EvalScore(stem, method, mode, rule, curve.auc, nss_value,
                                seconds * 1000.0))
        rocs.append((stem, spec.tag, curve))
    return [("ok", s) for s in scores], rocs


def cmd_eval(args) -> int:
    manifest = _parse_manifest(args.manifest)
    images = sorted(glob.glob(os.path.join(manifest.root, manifest.image_glob)))
    if not images:
        raise UsageError(f"no images match {manifest.image_glob!r} under {manifest.root!r}")
    os.makedirs(manifest.output_dir, exist_ok=True)
    roc_dir = os.path.join(manifest.output_dir, "roc")
    os.makedirs(roc_dir, exist_ok=True)

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            outcomes = list(pool.map(lambda p: _eval_one_image(p, manifest), images))
    else:
        outcomes = [_eval_one_image(p, manifest) for p in images]

    scored = []
    skipped = []
    for rows, rocs in outcomes:
        for kind, payload in rows:
            (scored if kind == "ok" else skipped).append(payload)
        for stem, tag, curve in rocs:
            with open(os.path.join(roc_dir, f"{stem}.{tag}.csv"), "w", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(["fpr", "tpr"])
                for fpr, tpr in curve.points:
                    writer.writerow([f"{fpr:.9f}", f"{tpr:.9f}"])

    scored.sort(key=lambda s: (s.image_id, s.method, s.mode, s.scale_rule))
    results_path = os.path.join(manifest.output_dir, "results.csv")
    with open(results_path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["image_id", "method", "mode", "scale_rule", "auc", "nss", "time_ms"])
        for s in scored:
            writer.writerow([s.image_id, s.method, s.mode, s.scale_rule,
                             f"{s.auc:.6f}", f"{s.nss:.6f}", f"{s.time_ms:.3f}"])
        for stem in sorted(skipped):
            writer.writerow([stem, "SKIP", "", "", "", "", ""])
        by_method = {}
        for s in scored:
            by_method.setdefault((s.method, s.mode, s.scale_rule), []).append(s)
        for (method, mode, rule) in sorted(by_method):
            mean_auc, mean_nss, mean_ms = aggregate(by_method[(method, mode, rule)])
            writer.writerow(["AGGREGATE", method, mode, rule,
                             f"{mean_auc:.6f}", f"{mean_nss:.6f}", f"{mean_ms:.3f}"])
    print(results_path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wavesal",
                                     description="wavelet-domain scale saliency")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sal = sub.add_parser("saliency", help="compute one saliency map")
    p_sal.add_argument("image")
    p_sal.add_argument("--transform", choices=_TRANSFORMS, default="dwt")
    p_sal.add_argument("--mode", choices=("observer", "searcher"), default="observer")
    p_sal.add_argument("--scale-rule", choices=("wss", "dis"), default="wss")
    p_sal.add_argument("--levels", type=_levels_ge2, default=4)
    p_sal.add_argument("--sigma", type=_sigma_value, default="auto",
                       help="Gaussian smoothing sigma in px, or 'auto' (width/32)")
    p_sal.add_argument("--dump-scales", action="store_true")
    p_sal.add_argument("--dump-ggd", action="store_true")
    p_sal.add_argument("--out-dir", default=None)
    p_sal.set_defaults(func=cmd_saliency)

    p_eval = sub.add_parser("eval", help="evaluate a dataset manifest")
    p_eval.add_argument("manifest")
    p_eval.add_argument("--jobs", type=_positive_int, default=1)
    p_eval.set_defaults(func=cmd_eval)

    p_tr = sub.add_parser("transform", help="dump raw coefficients as CSV")
    p_tr.add_argument("image")
    p_tr.add_argument("--transform", choices=_TRANSFORMS, default="dwt")
    p_tr.add_argument("--levels", type=_positive_int, default=2)
    p_tr.add_argument("--out", default="-")
    p_tr.set_defaults(func=cmd_transform)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (WavesalError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
