"""Asset catalog, similarity providers and the matching score.

An asset is ranked for a query by::

    M = alpha * V + beta * T - gamma * S

with V the best cosine between any of the asset's render embeddings and the
query text, T the cosine between the asset's description embedding and the
query text, and S the mean absolute size difference in cm.

Catalog files are JSON Lines in the annotation schema (``assetId`` plus an
``annotations`` object with category, synset, width, length, height, volume,
mass, frontView, description, materials, onCeiling, onWall, onFloor,
onObject). Embeddings live in a plain-text sidecar, one vector per line::

    <asset id> \\t <text | render> \\t <space-separated floats>
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Protocol

import numpy as np

from .errors import EmptyCatalogAfterFilter, MalformedStructure, NoRenders
from .floorplan import MaterialSpec, color_catalog, material_catalog

LOCATIONS = ("floor", "wall", "ceiling", "on_object")
VARIANCE_TYPES = ("same", "varied")


class SimilarityProvider(Protocol):
    embed_views_available: bool

    def embed_text(self, text: str): ...


_TOKEN = re.compile(r"[a-z0-9]+")


class SparseVec:
    """Sparse vector: sorted bucket indices with their values."""

    __slots__ = ("idx", "val")

    def __init__(self, idx, val):
        idx = np.asarray(idx, dtype=np.int64)
        val = np.asarray(val, dtype=float)
        order = np.argsort(idx, kind="stable")
        self.idx, self.val = idx[order], val[order]

    def __len__(self) -> int:
        return len(self.idx)

    def __eq__(self, other) -> bool:
        return (isinstance(other, SparseVec) and np.array_equal(self.idx, other.idx)
                and np.array_equal(self.val, other.val))

    def norm(self) -> float:
        return float(np.linalg.norm(self.val))

    def scaled(self, k: float) -> "SparseVec":
        return SparseVec(self.idx, self.val * k)


def _dot(a, b) -> float:
    if isinstance(a, SparseVec) and isinstance(b, SparseVec):
        _, ia, ib = np.intersect1d(a.idx, b.idx, assume_unique=True, return_indices=True)
        return float(np.dot(a.val[ia], b.val[ib]))
    if isinstance(a, SparseVec):
        return float(np.dot(np.asarray(b)[a.idx], a.val))
    if isinstance(b, SparseVec):
        return _dot(b, a)
    return float(np.dot(a, b))


def _norm(v) -> float:
    return v.norm() if isinstance(v, SparseVec) else float(np.linalg.norm(v))


@dataclass(frozen=True)
class HashingProvider:
    """Deterministic bag-of-words embedding.

    Tokens and joined adjacent-token pairs ("light grey" also yields
    "lightgrey") are hashed into ``dim`` buckets; the count vector is
    normalized and kept sparse. Empty text maps to the zero vector, whose
    cosine with anything is 0.
    """

    dim: int = 1 << 20
    embed_views_available: bool = False

    @staticmethod
    def features(text: str) -> list[str]:
        toks = _TOKEN.findall(text.lower())
        return toks + [a + b for a, b in zip(toks, toks[1:])]

    def embed_text(self, text: str) -> SparseVec:
        return _hashed(text, self.dim)


@lru_cache(maxsize=65536)
def _hashed(text: str, dim: int) -> SparseVec:
    counts: dict[int, float] = {}
    for tok in HashingProvider.features(text):
        h = int.from_bytes(hashlib.blake2b(tok.encode(), digest_size=8).digest(), "little") % dim
        counts[h] = counts.get(h, 0.0) + 1.0
    v = SparseVec(list(counts), list(counts.values()))
    n = v.norm()
    return v.scaled(1 / n) if n else v


def unit(v):
    if isinstance(v, SparseVec):
        n = v.norm()
        return v.scaled(1 / n) if n else v
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    return v / n if n else v


def cosine(a, b) -> float:
    na, nb = _norm(a), _norm(b)
    if na == 0 or nb == 0:
        return 0.0
    return _dot(a, b) / (na * nb)


# ---------------------------------------------------------------- records

@dataclass(frozen=True)
class AssetRecord:
    asset_id: str
    category: str
    description: str
    dims_cm: tuple[float, float, float]  # (w, d, h)
    synset: str = ""
    mass_kg: float = 0.0
    volume_cm3: float = 0.0
    front_view_index: int = 0
    materials: tuple[str, ...] = ()
    on_ceiling: bool = False
    on_wall: bool = False
    on_floor: bool = True
    on_object: bool = False
    render_embeddings: tuple = field(default=(), compare=False, repr=False)
    text_embedding: object = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        dims = tuple(float(x) for x in self.dims_cm)
        if len(dims) != 3 or min(dims) <= 0:
            raise MalformedStructure(f"{self.asset_id}: dims must be three positive numbers, got {self.dims_cm}")
        object.__setattr__(self, "dims_cm", dims)
        object.__setattr__(self, "materials", tuple(self.materials))
        object.__setattr__(self, "render_embeddings", tuple(unit(v) for v in self.render_embeddings))
        if self.text_embedding is not None:
            object.__setattr__(self, "text_embedding", unit(self.text_embedding))

    def allows(self, location: str) -> bool:
        return {
            "floor": self.on_floor,
            "wall": self.on_wall,
            "ceiling": self.on_ceiling,
            "on_object": self.on_object,
        }[location]

    def to_annotation(self) -> dict:
        w, d, h = self.dims_cm
        return {
            "assetId": self.asset_id,
            "annotations": {
                "category": self.category,
                "synset": self.synset,
                "width": w,
                "length": d,
                "height": h,
                "volume": self.volume_cm3,
                "mass": self.mass_kg,
                "frontView": self.front_view_index,
                "description": self.description,
                "materials": list(self.materials),
                "onCeiling": self.on_ceiling,
                "onWall": self.on_wall,
                "onFloor": self.on_floor,
                "onObject": self.on_object,
            },
        }


def _flag(value) -> bool:
    if isinstance(value, bool):
        return value
    if isinstance(value, str) and value.lower() in ("true", "false"):
        return value.lower() == "true"
    raise MalformedStructure(f"placement flag must be true/false, got {value!r}")


def record_from_annotation(obj: dict) -> AssetRecord:
    """Width/length/height in the annotation become (w, d, h)."""
    try:
        a = obj["annotations"]
        return AssetRecord(
            asset_id=str(obj["assetId"]),
            category=str(a["category"]),
            description=str(a["description"]),
            dims_cm=(float(a["width"]), float(a["length"]), float(a["height"])),
            synset=str(a.get("synset", "")),
            mass_kg=float(a.get("mass", 0)),
            volume_cm3=float(a.get("volume", 0)),
            front_view_index=int(a.get("frontView", 0)),
            materials=tuple(a.get("materials", ())),
            on_ceiling=_flag(a.get("onCeiling", False)),
            on_wall=_flag(a.get("onWall", False)),
            on_floor=_flag(a.get("onFloor", True)),
            on_object=_flag(a.get("onObject", False)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedStructure(f"bad annotation record: {exc}") from exc


@dataclass(frozen=True)
class ObjectQuery:
    description: str
    target_dims_cm: tuple[float, float, float] | None = None
    location: str = "floor"
    quantity: int = 1
    variance_type: str = "same"
    name: str = ""
    children: tuple["ObjectQuery", ...] = ()

    def __post_init__(self):
        if self.location not in LOCATIONS:
            raise MalformedStructure(f"unknown location {self.location!r}")
        if self.variance_type not in VARIANCE_TYPES:
            raise MalformedStructure(f"unknown variance type {self.variance_type!r}")
        if self.quantity < 1:
            raise MalformedStructure(f"quantity must be positive, got {self.quantity}")
        if self.target_dims_cm is not None:
            object.__setattr__(self, "target_dims_cm", tuple(float(x) for x in self.target_dims_cm))


# ---------------------------------------------------------------- catalog

@dataclass
class Catalog:
    records: list[AssetRecord]

    def __post_init__(self):
        self.records = sorted(self.records, key=lambda r: r.asset_id)
        self._by_id = {r.asset_id: r for r in self.records}
        if len(self._by_id) != len(self.records):
            raise MalformedStructure("duplicate asset ids in catalog")

    def __len__(self) -> int:
        return len(self.records)

    def __contains__(self, asset_id: str) -> bool:
        return asset_id in self._by_id

    def get(self, asset_id: str) -> AssetRecord:
        return self._by_id[asset_id]

    @classmethod
    def load(cls, path: str | Path, embeddings: str | Path | None = None) -> "Catalog":
        path = Path(path)
        records = []
        for lineno, line in enumerate(path.read_text().splitlines(), 1):
            if not line.strip():
                continue
            try:
                records.append(record_from_annotation(json.loads(line)))
            except json.JSONDecodeError as exc:
                raise MalformedStructure(f"{path}:{lineno}: {exc}") from exc
        if embeddings is None:
            side = path.with_suffix(".emb")
            embeddings = side if side.exists() else None
        if embeddings is not None:
            records = attach_embeddings(records, read_embeddings(embeddings))
        return cls(records)

    def dump(self, path: str | Path, embeddings: str | Path | None = None) -> None:
        lines = [json.dumps(r.to_annotation(), sort_keys=True) for r in self.records]
        Path(path).write_text("\n".join(lines) + "\n")
        if embeddings is not None:
            write_embeddings(embeddings, self.records)


def read_embeddings(path: str | Path) -> dict[str, dict]:
    out: dict[str, dict] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3 or parts[1] not in ("text", "render"):
            raise MalformedStructure(f"{path}:{lineno}: expected 'id<TAB>text|render<TAB>floats'")
        vec = _parse_vec(parts[2])
        entry = out.setdefault(parts[0], {"text": None, "render": []})
        if parts[1] == "text":
            entry["text"] = vec
        else:
            entry["render"].append(vec)
    return out


def attach_embeddings(records: Iterable[AssetRecord], emb: dict[str, dict]) -> list[AssetRecord]:
    from dataclasses import replace

    out = []
    for r in records:
        e = emb.get(r.asset_id)
        if e is None:
            out.append(r)
        else:
            out.append(replace(r, text_embedding=e["text"], render_embeddings=tuple(e["render"])))
    return out


def _parse_vec(text: str):
    """Dense ``0.1 0.2 ...`` or sparse ``sparse <dim> i:v i:v ...``."""
    toks = text.split()
    if toks and toks[0] == "sparse":
        pairs = [t.split(":") for t in toks[2:]]
        return SparseVec([int(i) for i, _ in pairs], [float(v) for _, v in pairs])
    return np.array([float(x) for x in toks])


def _fmt_vec(v, dim: int | None = None) -> str:
    if isinstance(v, SparseVec):
        body = " ".join(f"{i}:{'%.8g' % x}" for i, x in zip(v.idx, v.val))
        return f"sparse {dim or 0} {body}".rstrip()
    return " ".join("%.8g" % x for x in v)


def write_embeddings(path: str | Path, records: Iterable[AssetRecord]) -> None:
    def fmt(v):
        return _fmt_vec(v, HashingProvider.dim)

    lines = []
    for r in records:
        if r.text_embedding is not None:
            lines.append(f"{r.asset_id}\ttext\t{fmt(r.text_embedding)}")
        for v in r.render_embeddings:
            lines.append(f"{r.asset_id}\trender\t{fmt(v)}")
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))


def embed_record(r: AssetRecord, p: SimilarityProvider,
                 view_captions: Iterable[str] | None = None) -> AssetRecord:
    """Attach embeddings computed by ``p``.

    Render embeddings come from per-view captions when given; otherwise a
    single pseudo-render from category plus description stands in for the
    front view.
    """
    from dataclasses import replace

    captions = list(view_captions or [f"{r.category} {r.description}"])
    return replace(
        r,
        text_embedding=p.embed_text(r.description),
        render_embeddings=tuple(p.embed_text(c) for c in captions),
    )


# ---------------------------------------------------------------- scoring

@dataclass(frozen=True)
class MatchWeights:
    alpha: float = 100.0
    beta: float = 1.0
    gamma: float = 10.0


def visual_similarity(a: AssetRecord, q: ObjectQuery, p: SimilarityProvider) -> float:
    if not a.render_embeddings:
        raise NoRenders(f"{a.asset_id} has no render embeddings", asset_id=a.asset_id)
    t = p.embed_text(q.description)
    return max(cosine(v, t) for v in a.render_embeddings)


def textual_similarity(a: AssetRecord, q: ObjectQuery, p: SimilarityProvider) -> float:
    emb = a.text_embedding if a.text_embedding is not None else p.embed_text(a.description)
    return cosine(emb, p.embed_text(q.description))


def size_discrepancy(a_dims, q_dims) -> float:
    """Mean absolute per-axis difference; accepts records, queries or tuples."""
    if isinstance(a_dims, AssetRecord):
        a_dims = a_dims.dims_cm
    if isinstance(q_dims, ObjectQuery):
        q_dims = q_dims.target_dims_cm
    if q_dims is None or a_dims is None:
        return 0.0
    return sum(abs(float(x) - float(y)) for x, y in zip(a_dims, q_dims)) / 3


def combine(V: float, T: float, S: float, w: MatchWeights = MatchWeights()) -> float:
    return w.alpha * V + w.beta * T - w.gamma * S


def match_score(a: AssetRecord, q: ObjectQuery, p: SimilarityProvider,
                weights: MatchWeights = MatchWeights()) -> float:
    return combine(visual_similarity(a, q, p), textual_similarity(a, q, p),
                   size_discrepancy(a, q), weights)


def retrieve(catalog: Catalog | Iterable[AssetRecord], q: ObjectQuery, p: SimilarityProvider,
             k: int = 1, weights: MatchWeights = MatchWeights()) -> list[tuple[AssetRecord, float]]:
    """Top-k (asset, score) pairs allowed at the query's location."""
    if k < 1:
        raise ValueError("k must be at least 1")
    records = catalog.records if isinstance(catalog, Catalog) else list(catalog)
    pool = [r for r in records if r.allows(q.location)]
    if not pool:
        raise EmptyCatalogAfterFilter(f"no asset may be placed at {q.location!r}", location=q.location)
    scored = [(r, match_score(r, q, p, weights)) for r in pool]
    scored.sort(key=lambda rs: (-rs[1], rs[0].asset_id))
    return scored[:k]


def select_assets(catalog: Catalog, q: ObjectQuery, p: SimilarityProvider,
                  weights: MatchWeights = MatchWeights()) -> list[AssetRecord]:
    """One asset per requested instance: repeated top-1 for "same",
    the top distinct assets (cycling if the pool is short) for "varied"."""
    if q.variance_type == "same":
        top = retrieve(catalog, q, p, 1, weights)[0][0]
        return [top] * q.quantity
    ranked = [r for r, _ in retrieve(catalog, q, p, q.quantity, weights)]
    return [ranked[i % len(ranked)] for i in range(q.quantity)]


def _best_name(description: str, names: Iterable[str], p: SimilarityProvider) -> str:
    t = p.embed_text(description)
    best = None
    for name in sorted(names):
        s = cosine(p.embed_text(name), t)
        if best is None or s > best[0]:
            best = (s, name)
    return best[1]


def select_material(description: str, p: SimilarityProvider,
                    materials: Iterable[str] | None = None,
                    colors: Iterable[str] | None = None) -> MaterialSpec:
    """Closest material and closest color name to ``description``.

    Ties go to the lexicographically first name, so an empty description
    selects the first entry of each list.
    """
    return MaterialSpec(
        _best_name(description, materials or material_catalog(), p),
        _best_name(description, colors or color_catalog(), p),
    )


@dataclass(frozen=True)
class DoorAsset:
    door_id: str
    description: str


@lru_cache(maxsize=None)
def door_catalog() -> tuple[DoorAsset, ...]:
    text = resources.files("roomgen.data").joinpath("doors.txt").read_text()
    out = []
    for line in text.splitlines():
        if line.strip():
            did, _, desc = line.partition("|")
            out.append(DoorAsset(did.strip(), desc.strip()))
    return tuple(out)


def default_catalog() -> Catalog:
    """The small demo catalog shipped with the package."""
    data = resources.files("roomgen.data")
    with resources.as_file(data.joinpath("catalog.jsonl")) as cat, \
            resources.as_file(data.joinpath("catalog.emb")) as emb:
        return Catalog.load(cat, emb)


def select_door(style_query: str | None, p: SimilarityProvider) -> DoorAsset:
    doors = door_catalog()
    by_desc = {d.description: d for d in doors}
    return by_desc[_best_name(style_query or "", by_desc, p)]
