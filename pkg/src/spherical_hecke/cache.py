"""On-disk cache of exact Satake data.

One JSON file per key.  The file holds the key, the payload and the sha256
of the canonical payload text; writes go to a temporary file in the same
directory followed by ``os.replace``, so readers see the old entry or the
new one and never a partial file.  Single writer, many readers.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from .lattice import Coweight, is_dominant
from .satake import TorusFunction, half_delta, torus_from_json, torus_to_json

log = logging.getLogger(__name__)

__all__ = ["CacheKey", "Cache", "CacheError", "cached_satake", "cached_convolve"]

KINDS = ("satake", "convolution", "basis-change")


class CacheError(ValueError):
    pass


@dataclass(frozen=True)
class CacheKey:
    n: int
    p: int
    kind: str
    labels: tuple[Coweight, ...]

    def __post_init__(self):
        if self.kind not in KINDS:
            raise CacheError(f"unknown kind {self.kind!r}")
        labels = tuple(Coweight(t) for t in self.labels)
        if not 1 <= len(labels) <= 2:
            raise CacheError("a key carries one or two labels")
        for t in labels:
            if len(t) != self.n or not is_dominant(t):
                raise CacheError(f"{t} is not a dominant rank-{self.n} label")
        if self.kind == "convolution":
            # the Hecke algebra is commutative
            labels = tuple(sorted(labels, key=Coweight.sort_key))
        object.__setattr__(self, "labels", labels)

    def serialize(self) -> str:
        return json.dumps([self.kind, self.n, self.p, [list(t) for t in self.labels]],
                          separators=(",", ":"))

    @property
    def filename(self) -> str:
        return hashlib.sha256(self.serialize().encode()).hexdigest() + ".json"


def _canonical(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def _encode(key: CacheKey, value) -> Any:
    if key.kind == "satake":
        if not isinstance(value, TorusFunction):
            raise CacheError("satake entries hold a TorusFunction")
        if value.n != key.n:
            raise CacheError(f"value has rank {value.n}, key has {key.n}")
        lam = key.labels[0]
        # the leading coefficient delta(lam)^{1/2} pins down p
        if value[lam] != half_delta(lam, key.p) or not value.is_weyl_invariant():
            raise CacheError(f"value is not a rank-{key.n} transform at p={key.p}")
        if any(not isinstance(v, (int, Fraction)) for v in value.terms.values()):
            raise CacheError("satake entries must be exact")
        return torus_to_json(value, key.p)
    if not isinstance(value, dict):
        raise CacheError(f"{key.kind} entries hold a coefficient map")
    terms = []
    for t, c in value.items():
        t = Coweight(t)
        if len(t) != key.n:
            raise CacheError(f"label {t} does not have rank {key.n}")
        if not isinstance(c, (int, Fraction)):
            raise CacheError("coefficients must be exact")
        terms.append({"t": list(t), "c": str(Fraction(c))})
    terms.sort(key=lambda d: Coweight(d["t"]).sort_key())
    return {"terms": terms}


def _decode(key: CacheKey, payload: Any):
    if key.kind == "satake":
        return torus_from_json(payload, key.p)
    out = {}
    for term in payload["terms"]:
        c = Fraction(term["c"])
        out[Coweight(term["t"])] = int(c) if c.denominator == 1 else c
    return out


class Cache:
    def __init__(self, directory: str | os.PathLike):
        self.directory = Path(directory)

    def path(self, key: CacheKey) -> Path:
        return self.directory / key.filename

    def get(self, key: CacheKey):
        path = self.path(key)
        try:
            with open(path) as fh:
                entry = json.load(fh)
        except FileNotFoundError:
            return None
        except (OSError, ValueError) as exc:
            log.warning("unreadable cache entry %s (%s); ignoring it", path, exc)
            return None
        try:
            payload = entry["payload"]
            digest = hashlib.sha256(_canonical(payload).encode()).hexdigest()
            if entry.get("key") != key.serialize() or entry.get("checksum") != digest:
                log.warning("cache entry %s failed validation; ignoring it", path)
                return None
            return _decode(key, payload)
        except (KeyError, TypeError, ValueError) as exc:
            log.warning("corrupt cache entry %s (%s); ignoring it", path, exc)
            return None

    def put(self, key: CacheKey, value) -> Path:
        payload = _encode(key, value)
        text = _canonical(payload)
        entry = {
            "key": key.serialize(),
            "checksum": hashlib.sha256(text.encode()).hexdigest(),
            "payload": payload,
        }
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self.path(key)
        fd, tmp = tempfile.mkstemp(dir=self.directory, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump(entry, fh, sort_keys=True)
                fh.flush()
                os.fsync(fh.fileno())
            os.replace(tmp, path)
        except BaseException:
            try:
                os.unlink(tmp)
            except FileNotFoundError:
                pass
            raise
        return path


def cached_satake(lam: Sequence[int], p: int, cache: Cache | None, budget: int | None = 4) -> TorusFunction:
    from .satake import satake_chi

    lam = Coweight(lam)
    key = CacheKey(len(lam), p, "satake", (lam,))
    if cache is not None:
        hit = cache.get(key)
        if hit is not None:
            return hit
    value = satake_chi(lam, p, budget)
    if cache is not None:
        cache.put(key, value)
    return value


def cached_convolve(lam: Sequence[int], mu: Sequence[int], p: int, cache: Cache | None,
                    budget: int | None = 4) -> dict:
    from .cartan import double_coset_convolve

    key = CacheKey(len(lam), p, "convolution", (Coweight(lam), Coweight(mu)))
    if cache is not None:
        hit = cache.get(key)
        if hit is not None:
            return hit
    value = double_coset_convolve(lam, mu, p, budget)
    if cache is not None:
        cache.put(key, value)
    return value
