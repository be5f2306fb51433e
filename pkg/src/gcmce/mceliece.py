"""McEliece encryption over a GC code.

The public key is ``G_pub = S @ G @ P`` with ``S`` invertible and ``P`` a
column permutation.  Decryption undoes ``P``, decodes with the multistage
decoder of the secret GC code and undoes ``S``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import linalg
from .codes import weight
from .concat import GcSpec, gcc_decode_multistage, gcc_generator, min_distance_bound, spec_from_json, spec_to_json
from .errors import DecodeFailure, DimensionMismatch, ErrorBudgetTooLarge, FormatError
from .gf import FieldTower
from .linalg import FMatrix, PermMatrix


@dataclass(frozen=True)
class PublicKey:
    G: FMatrix
    t: int

    @property
    def field(self) -> FieldTower:
        return self.G.field

    @property
    def k(self) -> int:
        return self.G.rows

    @property
    def n(self) -> int:
        return self.G.cols


@dataclass(frozen=True)
class PrivateKey:
    S: FMatrix
    P: PermMatrix
    spec: GcSpec
    t: int

    @property
    def S_inv(self) -> FMatrix:
        return linalg.inverse(self.S)


@dataclass(frozen=True)
class McElieceKeyPair:
    public: PublicKey
    private: PrivateKey


@dataclass(frozen=True)
class Cryptogram:
    r: np.ndarray


def keygen(spec: GcSpec, t: int, seed, obfuscate: bool = True) -> McElieceKeyPair:
    """``G_pub = S G P``; ``obfuscate=False`` fixes S = I and P = I."""
    bound = min_distance_bound(spec)
    if t < 0 or t > (bound - 1) // 2:
        raise ErrorBudgetTooLarge(f"t={t} exceeds (d-1)//2 = {(bound - 1) // 2} for designed distance {bound}")
    G = gcc_generator(spec)
    F = spec.field
    if obfuscate:
        S = linalg.random_invertible(F, G.rows, linalg.derive_seed(seed, 0)) if G.rows else FMatrix.zeros(F, 0, 0)
        P = linalg.random_perm(G.cols, linalg.derive_seed(seed, 1))
    else:
        S, P = FMatrix.identity(F, G.rows), PermMatrix.identity(G.cols)
    G_pub = P.apply(S @ G)
    return McElieceKeyPair(PublicKey(G_pub, t), PrivateKey(S, P, spec, t))


def sample_error(field: FieldTower, n: int, t: int, seed, exact: bool = True) -> np.ndarray:
    """Error vector of weight exactly ``t`` (or uniform weight in 0..t) with uniform nonzero values."""
    rng = linalg.make_rng(seed)
    w = t if exact else int(rng.integers(0, t + 1))
    e = np.zeros(n, dtype=np.int64)
    pos = rng.choice(n, size=w, replace=False)
    e[pos] = rng.integers(1, field.order, size=w)
    return e


def encrypt(public: PublicKey, m, seed, exact_weight: bool = True, error=None) -> Cryptogram:
    """``r = m G_pub + e``; ``error`` overrides the sampled ``e``."""
    m = np.asarray(m, dtype=np.int64).reshape(-1)
    if m.size != public.k:
        raise DimensionMismatch(f"message length {m.size}, expected {public.k}")
    F = public.field
    e = sample_error(F, public.n, public.t, seed, exact_weight) if error is None else np.asarray(error, dtype=np.int64)
    c = m @ public.G if public.k else np.zeros(public.n, dtype=np.int64)
    return Cryptogram(F.add(c, e))


def decrypt(private: PrivateKey, ct: Cryptogram | np.ndarray) -> np.ndarray:
    r = ct.r if isinstance(ct, Cryptogram) else np.asarray(ct, dtype=np.int64)
    r_hat = private.P.inverse().apply(r)
    res = gcc_decode_multistage(private.spec, r_hat)
    if res.failed:
        raise DecodeFailure(f"multistage decoding failed at level {res.failed_stage + 1}")
    if private.S.rows == 0:
        return np.zeros(0, dtype=np.int64)
    return res.flat @ private.S_inv


def error_weight(public: PublicKey, m, ct: Cryptogram) -> int:
    c = np.asarray(m, dtype=np.int64) @ public.G
    return weight(public.field.sub(ct.r, c))


# --- serialisation ------------------------------------------------------------------------


def message_to_hex(m, q: int) -> str:
    """``sum(m_i q^i)`` in hexadecimal."""
    value = 0
    for x in reversed([int(v) for v in np.asarray(m).reshape(-1)]):
        value = value * q + x
    return format(value, "x")


def message_from_hex(text: str, q: int, k: int) -> np.ndarray:
    value = int(text.strip().removeprefix("0x") or "0", 16)
    out = []
    for _ in range(k):
        out.append(value % q)
        value //= q
    if value:
        raise FormatError(f"message {text!r} does not fit in {k} symbols over GF({q})")
    return np.array(out, dtype=np.int64)


def format_public(pub: PublicKey) -> str:
    return f"mceliece-public t={pub.t}\n" + linalg.format_matrix(pub.G)


def parse_public(text: str) -> PublicKey:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("mceliece-public"):
        raise FormatError("not a public key file")
    try:
        t = int(lines[0].split("t=")[1])
    except (IndexError, ValueError) as exc:
        raise FormatError("public key header lacks t=") from exc
    return PublicKey(linalg.parse_matrix(lines[1:]), t)


def private_to_json(priv: PrivateKey) -> dict:
    return {
        "format": "mceliece-private-1",
        "t": priv.t,
        "S": linalg.format_matrix(priv.S),
        "perm": priv.P.perm.tolist(),
        "spec": spec_to_json(priv.spec),
    }


def private_from_json(obj: dict) -> PrivateKey:
    try:
        spec = spec_from_json(obj["spec"])
        S = linalg.parse_matrix(obj["S"]) if obj["S"].split()[0] != "0" else FMatrix.zeros(spec.field, 0, 0)
        return PrivateKey(S, PermMatrix(obj["perm"]), spec, int(obj["t"]))
    except (KeyError, TypeError) as exc:
        raise FormatError(f"bad private key: {exc}") from exc


def format_private(priv: PrivateKey) -> str:
    return json.dumps(private_to_json(priv), indent=1) + "\n"


def parse_private(text: str) -> PrivateKey:
    try:
        return private_from_json(json.loads(text))
    except json.JSONDecodeError as exc:
        raise FormatError(f"bad private key: {exc}") from exc


def format_cryptogram(ct: Cryptogram, field: FieldTower) -> str:
    return linalg.format_matrix(FMatrix(field, ct.r.reshape(1, -1)))


def parse_cryptogram(text: str) -> Cryptogram:
    M = linalg.parse_matrix(text)
    if M.rows != 1:
        raise FormatError("cryptogram must be a single row")
    return Cryptogram(M.a[0].copy())
