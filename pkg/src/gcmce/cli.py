"""Command-line front end.

Every command prints one JSON object on stdout (or a plain table with
``--pretty``).  Domain errors exit with status 1 and a JSON error object;
usage errors exit with status 2.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import attacks, concat, desk, linalg, mceliece, workfactor
from .errors import GcmError, NotApplicable

log = logging.getLogger("gcmce")

PRESETS = {
    "rm-8-4-4": lambda seed: desk.rm_8_4_4(),
    "occ-rs-parity": lambda seed: desk.occ_rs_parity(),
    "step1": desk.step1_gcc,
    "step1-counterexample": desk.step1_counterexample,
    "nonstructural": desk.nonstructural_gcc,
    "aligned": desk.aligned_gcc,
    "justesen": desk.justesen_pair,
}


class CliError(GcmError):
    pass


def _ints(text: str, count: int | None = None) -> list[int]:
    try:
        vals = [int(x) for x in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc
    if count is not None and len(vals) != count:
        raise argparse.ArgumentTypeError(f"expected {count} integers, got {len(vals)}")
    return vals


def _read(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from exc


def _write(path, text: str) -> None:
    Path(path).write_text(text)


def _load_spec(args):
    if args.preset:
        return PRESETS[args.preset](args.seed)
    if args.spec:
        return concat.spec_from_json(json.loads(_read(args.spec)))
    raise CliError("give --spec FILE or --preset NAME")


def _load_partition(path) -> attacks.BlockPartition:
    obj = json.loads(_read(path))
    try:
        return attacks.BlockPartition(tuple(tuple(b) for b in obj["blocks"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(f"bad partition file {path}: {exc}") from exc


def _strip_timing(obj):
    if isinstance(obj, dict):
        return {k: _strip_timing(v) for k, v in obj.items() if k != "elapsed"}
    if isinstance(obj, list):
        return [_strip_timing(v) for v in obj]
    return obj


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def _emit(result: dict, pretty: bool, out=None) -> None:
    out = out or sys.stdout
    result = _jsonable(_strip_timing(result))
    if not pretty:
        out.write(json.dumps(result, sort_keys=True) + "\n")
        return
    width = max((len(k) for k in result), default=0)
    for key, value in result.items():
        if isinstance(value, dict):
            out.write(f"{key}:\n")
            inner = max((len(k) for k in value), default=0)
            for k2, v2 in value.items():
                out.write(f"  {k2:<{inner}}  {v2}\n")
        else:
            out.write(f"{key:<{width}}  {value}\n")


def _code_json(C) -> dict:
    return {"n": C.n, "k": C.k, "generator": C.generator.tolist()}


# --- commands ---------------------------------------------------------------------------


def cmd_keygen(args) -> dict:
    spec = _load_spec(args)
    t = args.t if args.t is not None else (concat.min_distance_bound(spec) - 1) // 2
    kp = mceliece.keygen(spec, t, args.seed, obfuscate=not args.no_obfuscate)
    _write(args.public, mceliece.format_public(kp.public))
    _write(args.private, mceliece.format_private(kp.private))
    if args.blocks_out:
        part = attacks.BlockPartition.ground_truth(spec.n_A, spec.n_B, kp.private.P)
        _write(args.blocks_out, json.dumps({"blocks": [list(b) for b in part.blocks]}) + "\n")
    return {"n": kp.public.n, "k": kp.public.k, "t": t, "q": spec.field.order, "public": str(args.public),
            "private": str(args.private), "designed_distance": concat.min_distance_bound(spec)}


def cmd_encrypt(args) -> dict:
    pub = mceliece.parse_public(_read(args.public))
    q = pub.field.order
    if args.message is not None:
        m = mceliece.message_from_hex(args.message, q, pub.k)
    else:
        m = linalg.make_rng(args.seed, 2).integers(0, q, size=pub.k)
    ct = mceliece.encrypt(pub, m, args.seed, exact_weight=not args.random_weight)
    _write(args.out, mceliece.format_cryptogram(ct, pub.field))
    return {"message": mceliece.message_to_hex(m, q), "cryptogram": str(args.out),
            "error_weight": mceliece.error_weight(pub, m, ct)}


def cmd_decrypt(args) -> dict:
    priv = mceliece.parse_private(_read(args.private))
    ct = mceliece.parse_cryptogram(_read(args.cryptogram))
    m = mceliece.decrypt(priv, ct)
    return {"message": mceliece.message_to_hex(m, priv.spec.field.order)}


def cmd_attack(args) -> dict:
    pub = mceliece.parse_public(_read(args.public))
    G = pub.G
    kind = args.kind
    if kind == "isd":
        ct = mceliece.parse_cryptogram(_read(args.cryptogram))
        res = attacks.isd_attack(G, ct.r, pub.t, args.delta, args.max_iters or 100_000, args.seed)
        return {"attack": "isd", "message": mceliece.message_to_hex(res.message, pub.field.order),
                "iterations": res.iterations, "delta": res.delta}
    if kind == "step1":
        if args.shape is None:
            raise CliError("step1 needs --shape n_A,n_B")
        part = attacks.sendrier_step1(G, tuple(args.shape), args.bound)
        out = {"blocks": [list(b) for b in part.blocks]}
        if args.out:
            _write(args.out, json.dumps(out) + "\n")
        return {"attack": "step1", **out}
    if args.partition is None:
        raise CliError(f"{kind} needs --partition FILE")
    part = _load_partition(args.partition)
    if kind == "blocks":
        return {"attack": "blocks", "codes": [_code_json(C) for C in attacks.block_generators(G, part)]}
    if kind in ("step2", "step31"):
        s2 = attacks.sendrier_step2(G, part, strict=not args.loose)
        if kind == "step2":
            return {"attack": "step2", "order": s2.order, "multiplicity": s2.multiplicity}
        C = attacks.sendrier_step3_1(s2.perm().apply(G), part.n_B)
        return {"attack": "step31", "inner": _code_json(C), "multiplicity": s2.multiplicity}
    if kind == "nonstruct":
        ct = mceliece.parse_cryptogram(_read(args.cryptogram))
        block_codes = attacks.block_generators(G, part)
        rep = attacks.nonstructural_attack(G, ct.r, pub.t, part, block_codes, args.tau, args.max_iters, args.seed)
        out = rep.to_json()
        out["message"] = mceliece.message_to_hex(rep.message, pub.field.order)
        return {"attack": "nonstruct", **out}
    raise CliError(f"unknown attack {kind}")


def cmd_simulate(args) -> dict:
    n, k, d = args.code
    stats = workfactor.montecarlo_decode_stats((n, k, d), None if args.fixed_weight is not None else args.error_prob,
                                               args.trials, args.codes, args.seed, args.workers, args.fixed_weight)
    out = stats.to_json()
    if args.n_A:
        n_c, n_w, n_f = workfactor.expected_counts(args.n_A, stats)
        out["expected_counts"] = {"n_c": n_c, "n_w": n_w, "n_f": n_f}
    return out


def cmd_workfactor(args) -> dict:
    if args.custom is not None:
        return workfactor.nonstructural_workfactor(*args.custom).to_json()
    if args.isd is not None:
        n, k, t, delta = args.isd
        r = workfactor.isd_workfactor(n, k, t, delta)
        return {"W": r.value, "log2W": r.log2, "p": r.p, "expected_iterations": r.expected_iterations}
    if args.trials is None and args.codes is None:
        rep = workfactor.appendix_b_report(counts=(99, 6))
    else:
        rep = workfactor.appendix_b_report(args.seed, args.trials or 10_000, args.codes or 100, args.workers)
    return rep.to_json()


def cmd_spec_check(args) -> dict:
    spec = _load_spec(args)
    out = {"n": spec.n, "k": spec.k, "levels": spec.ell, "level_dims": list(spec.level_dims),
           "designed_distance": concat.min_distance_bound(spec)}
    try:
        occ = concat.occ_equivalence_check(spec)
        out["occ_equivalent"] = occ
    except NotApplicable as exc:
        occ = None
        out["occ_equivalent"] = None
        out["occ_note"] = str(exc)
    xi = concat.xi_emptiness_check(spec)
    out["xi_empty_guaranteed"] = xi.xi_empty_guaranteed
    out["xi_threshold"] = xi.threshold
    out["inner_dual_distance"] = xi.d_dual_inner
    out["outer_dual_distances"] = list(xi.d_dual_outers)
    out["distinct_inner_signatures"] = concat.signatures_pairwise_distinct(spec.inner_codes())
    advice = []
    if xi.xi_empty_guaranteed:
        advice.append("Xi = {} guaranteed; Step 1 not guaranteed (block recovery has no low-weight dual words)")
    else:
        advice.append("Xi may be non-empty; Step 1 block recovery may succeed")
    if occ:
        advice.append("code is equivalent to an OC code; OC attacks apply")
    if spec.block_trees is not None and len(set(spec.block_trees)) > 1:
        advice.append("per-block inner maps in use")
    out["advisory"] = advice
    return out


# --- parser ---------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="master seed (default 0)")
    common.add_argument("--workers", type=int, default=argparse.SUPPRESS, help="worker processes (default 1)")
    common.add_argument("--pretty", action="store_true", default=argparse.SUPPRESS, help="plain table output")

    p = argparse.ArgumentParser(prog="gcmce", description="McEliece over concatenated codes: keys, attacks, "
                                "work factors.", parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    def spec_source(sp):
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--spec", help="GC code spec (JSON)")
        g.add_argument("--preset", choices=sorted(PRESETS), help="built-in spec (random ones use --seed)")

    sp = sub.add_parser("keygen", parents=[common], help="generate a key pair")
    spec_source(sp)
    sp.add_argument("--t", type=int, help="error budget (default: (designed distance - 1) // 2)")
    sp.add_argument("--public", default="key.pub")
    sp.add_argument("--private", default="key.priv")
    sp.add_argument("--no-obfuscate", action="store_true", help="S = I and P = I")
    sp.add_argument("--blocks-out", help="also write the true public block partition (for testing later steps)")
    sp.set_defaults(func=cmd_keygen)

    sp = sub.add_parser("encrypt", parents=[common], help="encrypt a message")
    sp.add_argument("--public", default="key.pub")
    sp.add_argument("--message", help="message as hex of sum m_i q^i (default: random)")
    sp.add_argument("--out", default="ct.txt")
    sp.add_argument("--random-weight", action="store_true", help="error weight uniform in 0..t")
    sp.set_defaults(func=cmd_encrypt)

    sp = sub.add_parser("decrypt", parents=[common], help="decrypt a cryptogram")
    sp.add_argument("--private", default="key.priv")
    sp.add_argument("--cryptogram", default="ct.txt")
    sp.set_defaults(func=cmd_decrypt)

    sp = sub.add_parser("attack", parents=[common], help="run an attack on a public key")
    sp.add_argument("kind", choices=["isd", "step1", "step2", "step31", "blocks", "nonstruct"])
    sp.add_argument("--public", default="key.pub")
    sp.add_argument("--cryptogram", default="ct.txt")
    sp.add_argument("--partition", help="block partition JSON (output of step1 --out)")
    sp.add_argument("--shape", type=lambda s: _ints(s, 2), help="n_A,n_B")
    sp.add_argument("--bound", type=int, help="step1 dual weight bound (default: search)")
    sp.add_argument("--out", help="write the step1 partition here")
    sp.add_argument("--delta", type=int)
    sp.add_argument("--tau", type=int)
    sp.add_argument("--max-iters", type=int)
    sp.add_argument("--loose", action="store_true", help="step2: allow repeated signatures")
    sp.set_defaults(func=cmd_attack)

    sp = sub.add_parser("simulate", parents=[common], help="Monte Carlo inner decoding statistics")
    sp.add_argument("--code", type=lambda s: _ints(s, 3), default=[16, 7, 5], help="n,k,d (default 16,7,5)")
    sp.add_argument("--error-prob", type=float, default=212 / 2048)
    sp.add_argument("--fixed-weight", type=int)
    sp.add_argument("--trials", type=int, default=10_000)
    sp.add_argument("--codes", type=int, default=100)
    sp.add_argument("--n-A", dest="n_A", type=int, help="also report rounded block counts for n_A blocks")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("workfactor", parents=[common], help="attack work factors")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--preset", choices=["appendix-b"], default="appendix-b")
    g.add_argument("--custom", type=lambda s: _ints(s, 8), help="nA,nB,kB,tB,kGC,nc,nw,tau")
    g.add_argument("--isd", type=lambda s: _ints(s, 4), help="n,k,t,delta")
    sp.add_argument("--trials", type=int, help="with --codes: estimate n_c, n_w by simulation")
    sp.add_argument("--codes", type=int)
    sp.set_defaults(func=cmd_workfactor)

    sp = sub.add_parser("spec-check", parents=[common], help="structural advisory for a spec")
    spec_source(sp)
    sp.set_defaults(func=cmd_spec_check)
    return p


def run(argv=None, out=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.seed = getattr(args, "seed", 0)
    args.workers = getattr(args, "workers", 1)
    args.pretty = getattr(args, "pretty", False)
    logging.basicConfig(level=logging.INFO, format="%(name)s: %(message)s", stream=sys.stderr)
    log.info("seed=%d", args.seed)
    out = out or sys.stdout
    try:
        result = args.func(args)
    except (GcmError, json.JSONDecodeError) as exc:
        out.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 1
    result = {"command": args.command, "seed": args.seed, **result}
    _emit(result, args.pretty, out)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
