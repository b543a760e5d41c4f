"""Command-line pipeline: complex entropy, orbit certification, arc
tracking, and the mapping-class word.

Exit codes: 0 success, 1 configuration error, 2 certification failure,
3 insufficient precision, 4 external bridge missing.
"""

import argparse
import hashlib
import json
import os
import sys
import time
from fractions import Fraction

from . import homology
from .balls import BallContext
from .errors import CertificationFailure, K3CertError, PreconditionError, RangeError
from .shadowing import PseudoOrbit, certify, coordinate_range_bound, error_model, recheck

DEFAULT_PRECISION = int(os.environ.get("K3CERT_PRECISION", "512"))


def _ok_dir(path):
    os.makedirs(path, exist_ok=True)
    return path


def _write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _sha(path):
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def cmd_entropy(args):
    t0 = time.time()
    data = homology.salem()
    root = homology.spectral_radius(data, digits=args.digits)
    lines = [
        "characteristic polynomial (ascending): " + " ".join(str(c) for c in data.char_coeffs),
        "salem factor (ascending): " + " ".join(str(c) for c in data.salem_coeffs),
        f"leading root: {float(root.mid):.{args.digits}f} (width {root.width():.1e})",
    ]
    print("\n".join(lines))
    if args.json:
        payload = {
            "char_poly": list(data.char_coeffs),
            "salem_factor": list(data.salem_coeffs),
            "cyclotomic_part": list(data.cyclotomic_part),
            "matrices": {
                "M": [list(r) for r in homology.M_INTERSECTION],
                "S": [list(r) for r in homology.S_PAIRING],
                "sigma1": [list(r) for r in homology.induced_action(1)],
                "sigma2": [list(r) for r in homology.induced_action(2)],
                "sigma3": [list(r) for r in homology.induced_action(3)],
                "f_star": [list(r) for r in homology.f_star()],
            },
            "root": {
                "decimal": f"{float(root.mid):.{args.digits}f}",
                "enclosure": [str(b) for b in root.interval_fractions()],
            },
        }
        out = os.path.join(_ok_dir(args.out), "entropy-complex.json")
        _write_json(out, payload)
        print(f"wrote {out}")
    return {"stage": "entropy-complex", "seconds": time.time() - t0}


def _load_orbit(args):
    if args.orbit:
        with open(args.orbit) as fh:
            return PseudoOrbit.from_json(fh.read())
    return PseudoOrbit.bundled()


def cmd_certify(args):
    t0 = time.time()
    if args.precision < 34:
        raise PreconditionError("precision below the error-model floor of 34 bits")
    ctx = BallContext(args.precision)
    orbit = _load_orbit(args)
    cert = certify(orbit, ctx, A=args.A, check=True)
    out = os.path.join(_ok_dir(args.out), "cert.json")
    cert.write(out)
    table = error_model(args.precision)
    _write_json(
        os.path.join(args.out, "error-model.json"),
        {k: str(v) for k, v in table.items()},
    )
    print(f"certified: period {cert.period}, residual bound {float(cert.delta):.3e}, "
          f"threshold {float(cert.threshold):.3e}, localization {float(cert.localization):.3e}")
    print(f"wrote {out}")
    if args.emit_plot_csv:
        _emit_orbit_csv(orbit, ctx, args)
    return {"stage": "certify", "seconds": time.time() - t0, "cert": _sha(out)}


def _emit_orbit_csv(orbit, ctx, args):
    from .surface import chart_forward

    zero = ctx.ball(0)
    path = os.path.join(args.out, "orbit-points.csv")
    with open(path, "w") as fh:
        fh.write("index,x,y,z\n")
        for i, c in enumerate(orbit.charts):
            p = chart_forward(c, (zero, zero), ctx, args.A)
            fh.write(f"{i},{float(p.x.mid)!r},{float(p.y.mid)!r},{float(p.z.mid)!r}\n")
    print(f"wrote {path}")


def cmd_recheck(args):
    with open(args.cert) as fh:
        payload = json.load(fh)
    ok = recheck(payload)
    print("certificate inequalities replay:", "PASS" if ok else "FAIL")
    if not ok:
        raise CertificationFailure("(replay)")
    return {"stage": "recheck"}


def cmd_range(args):
    enc = coordinate_range_bound(Fraction(args.tol).limit_denominator(10**6))
    print(f"max |x| over the surface lies in [{float(enc.lower()):.4f}, {float(enc.upper()):.4f}]")
    return {"stage": "range"}


def cmd_arcs(args):
    from .mapclass.arcdata import format_arcdata
    from .mapclass.tracking import orbit_marked_disk, track_arc

    t0 = time.time()
    disk, proj, succ, _ = orbit_marked_disk(args.A, args.precision)
    out_dir = _ok_dir(args.out)
    data_path = os.path.join(out_dir, "arc-data.txt")
    csv_path = os.path.join(out_dir, "arcs.csv") if args.emit_plot_csv else None
    rows = []
    with open(data_path, "w") as fh:
        for k in range(disk.n - 1):
            poly = track_arc(disk, proj, succ, k, args.A)
            data = disk.extract(poly)
            fh.write(format_arcdata(data) + "\n")
            if csv_path:
                rows.extend((k, float(x), float(y)) for x, y in poly[:: max(1, len(poly) // 512)])
    print(f"wrote {data_path}")
    if csv_path:
        with open(csv_path, "w") as fh:
            fh.write("arc,x,y\n")
            for k, x, y in rows:
                fh.write(f"{k},{x!r},{y!r}\n")
        with open(os.path.join(out_dir, "punctures.csv"), "w") as fh:
            fh.write("index,x,y\n")
            for i, (x, y) in enumerate(disk.points):
                fh.write(f"{i},{x!r},{y!r}\n")
        print(f"wrote {csv_path}")
    return {"stage": "arcs", "seconds": time.time() - t0, "arc_data": _sha(data_path)}


def cmd_mclass(args):
    from .mapclass import real_orbit_words
    from .mapclass.arcdata import parse_arcdata
    from .mapclass.reference import compare_stage_words
    from .mapclass.words import export_word

    t0 = time.time()
    arc_datas = None
    data_path = os.path.join(args.out, "arc-data.txt")
    if os.path.exists(data_path):
        with open(data_path) as fh:
            arc_datas = [parse_arcdata(line) for line in fh if line.strip()]
    g, f2, reports, _ = real_orbit_words(A=args.A, prec=args.precision, arc_datas=arc_datas)
    out_dir = _ok_dir(args.out)
    g_path = os.path.join(out_dir, "g-word.txt")
    f2_path = os.path.join(out_dir, "f2-word.txt")
    with open(g_path, "w") as fh:
        fh.write(export_word(g, args.convention) + "\n")
    with open(f2_path, "w") as fh:
        fh.write(export_word(f2, args.convention) + "\n")
    flags = compare_stage_words(reports)
    _write_json(
        os.path.join(out_dir, "mclass-report.json"),
        {
            "stage_words": {r.stage: export_word(r.word) for r in reports},
            "windings": {r.stage: r.winding for r in reports},
            "reference_comparison": {str(k): v for k, v in flags.items()},
            "g_length": len(g),
            "f2_length": len(f2),
            "convention": args.convention,
        },
    )
    print(f"|g| = {len(g)}, |f^2| = {len(f2)}; stage check: {flags}")
    print(f"wrote {f2_path}")
    return {"stage": "mclass", "seconds": time.time() - t0, "f2_word": _sha(f2_path)}


def cmd_all(args):
    manifest = {"stages": [], "inputs": {}}
    if args.orbit:
        manifest["inputs"]["orbit"] = _sha(args.orbit)
    for fn in (cmd_entropy, cmd_certify, cmd_arcs, cmd_mclass):
        manifest["stages"].append(fn(args))
    # summary: entropy ratio when the external bridge left a report
    data = homology.salem()
    root = homology.spectral_radius(data, digits=8)
    import math

    summary = {"complex_entropy": f"ln {float(root.mid):.4f}"}
    bridge = os.path.join(args.out, "bridge-report.json")
    if os.path.exists(bridge):
        with open(bridge) as fh:
            rep = json.load(fh)
        lam = float(rep.get("dilatation", 0) or 0)
        if lam > 1:
            ratio = 0.5 * math.log(lam) / math.log(float(root.mid))
            summary["dilatation"] = lam
            summary["entropy_ratio_lower_bound"] = round(ratio, 4)
    else:
        summary["note"] = "no bridge report; entropy ratio omitted"
    manifest["summary"] = summary
    manifest["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    _write_json(os.path.join(_ok_dir(args.out), "manifest.json"), manifest)
    print("summary:", json.dumps(summary))
    return manifest


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=DEFAULT_PRECISION,
                        help="working precision in bits (default from K3CERT_PRECISION or 512)")
    common.add_argument("--A", type=int, default=10, help="surface parameter (nonzero)")
    common.add_argument("--orbit", help="pseudo-orbit JSON file (bundled table by default)")
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--json", action="store_true", help="emit JSON artifacts")
    common.add_argument("--emit-plot-csv", action="store_true", help="emit plot-data CSV files")
    p = argparse.ArgumentParser(prog="k3cert", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    sp = sub.add_parser("entropy-complex", parents=[common],
                        help="exact action on the curve lattice and its leading root")
    sp.add_argument("--digits", type=int, default=6)
    sp.set_defaults(fn=cmd_entropy)
    sp = sub.add_parser("certify", parents=[common], help="certify the periodic orbit")
    sp.set_defaults(fn=cmd_certify)
    sp = sub.add_parser("recheck", parents=[common], help="replay a certificate's inequalities")
    sp.add_argument("cert")
    sp.set_defaults(fn=cmd_recheck)
    sp = sub.add_parser("range", parents=[common], help="certified coordinate range of the surface")
    sp.add_argument("--tol", type=float, default=0.05)
    sp.set_defaults(fn=cmd_range)
    sp = sub.add_parser("arcs", parents=[common], help="track the base arcs and extract crossing data")
    sp.set_defaults(fn=cmd_arcs)
    sp = sub.add_parser("mclass", parents=[common],
                        help="half-twist words for the tracked map and its square")
    sp.add_argument("--convention", choices=("left", "right"), default="left")
    sp.set_defaults(fn=cmd_mclass)
    sp = sub.add_parser("all", parents=[common], help="run every stage")
    sp.add_argument("--digits", type=int, default=6)
    sp.add_argument("--convention", choices=("left", "right"), default="left")
    sp.set_defaults(fn=cmd_all)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.A == 0:
            raise ValueError("A must be nonzero")
        args.fn(args)
        return 0
    except (ValueError, OSError, json.JSONDecodeError) as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return 1
    except CertificationFailure as e:
        print(f"certification failure: {e}", file=sys.stderr)
        return 2
    except (RangeError, PreconditionError) as e:
        print(f"insufficient precision: {e}", file=sys.stderr)
        return 3
    except K3CertError as e:
        print(f"pipeline error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
