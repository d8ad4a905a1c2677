"""Graph file formats, the GRDN binary image, and the dataset manifest.

Supported inputs: MatrixMarket coordinate files (1-based), whitespace edge
lists in the SNAP style (``#`` or ``%`` comments), and GRDN binary CSR
images. Text inputs may be gzip-compressed (``.gz``).
"""

from __future__ import annotations

import gzip
import io as _io
import os
import re
import shutil
import struct
import tarfile
import tempfile
import urllib.error
import urllib.parse
import urllib.request
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (DatasetVerificationError, FetchError, IncompatibleFileError,
                     MalformedInputError, ParameterError, UnsupportedFormatError)
from .graph import INDEX_DTYPE, OFFSET_DTYPE, WEIGHT_DTYPE, EdgeList, Graph, build_graph

FORMATS = ("mtx", "edgelist", "snap", "bin")
_FORMAT_ALIASES = {"el": "edgelist", "txt": "edgelist", "tsv": "edgelist", "grdn": "bin"}

GRDN_MAGIC = b"GRDN"
GRDN_VERSION = 1
GRDN_HEADER = struct.Struct("<4sHHQQ")
FLAG_DIRECTED = 0x1
FLAG_WEIGHTED = 0x2


def _open_text(path):
    path = str(path)
    if path.endswith(".gz"):
        return gzip.open(path, "rt")
    return open(path)


# --- MatrixMarket ---------------------------------------------------------

def load_matrix_market(path) -> EdgeList:
    """Read a coordinate MatrixMarket file.

    ``symmetric`` files set ``EdgeList.symmetric`` so the caller symmetrizes;
    ``pattern`` files yield unweighted edges. ``array`` storage and complex,
    hermitian or skew-symmetric matrices are rejected.
    """
    with _open_text(path) as fh:
        banner = fh.readline().split()
        if len(banner) != 5 or banner[0] != "%%MatrixMarket" or banner[1].lower() != "matrix":
            raise UnsupportedFormatError(f"{path}: missing '%%MatrixMarket matrix' banner")
        storage, value_field, symmetry = (b.lower() for b in banner[2:])
        if storage != "coordinate":
            raise UnsupportedFormatError(f"{path}: only coordinate storage is supported, got {storage}")
        if value_field not in ("pattern", "real", "integer"):
            raise UnsupportedFormatError(f"{path}: unsupported value field {value_field}")
        if symmetry not in ("general", "symmetric"):
            raise UnsupportedFormatError(f"{path}: unsupported symmetry {symmetry}")
        line = fh.readline()
        lineno = 2
        while line and (not line.strip() or line.lstrip().startswith("%")):
            line = fh.readline()
            lineno += 1
        try:
            rows, cols, nnz = (int(tok) for tok in line.split())
        except ValueError:
            raise MalformedInputError(f"{path}:{lineno}: bad size line {line.strip()!r}") from None
        width = 2 if value_field == "pattern" else 3
        body = _load_columns(fh, width, path, first_line=lineno + 1)
    if body.shape[0] != nnz:
        raise MalformedInputError(f"{path}: size line declares {nnz} entries, body has {body.shape[0]}")
    n = max(rows, cols)
    src = body[:, 0].astype(np.int64) - 1
    dst = body[:, 1].astype(np.int64) - 1
    if nnz and (src.min() < 0 or dst.min() < 0 or src.max() >= rows or dst.max() >= cols):
        raise MalformedInputError(f"{path}: entry index outside the declared {rows}x{cols} shape")
    weights = body[:, 2].astype(np.float64) if width == 3 else None
    return EdgeList(src, dst, weights, n, symmetric=symmetry == "symmetric")


def _load_columns(fh, width: int, path, first_line: int = 1) -> np.ndarray:
    text = fh.read()
    try:
        data = np.loadtxt(_io.StringIO(text), comments=("%", "#"), ndmin=2,
                          usecols=range(width), dtype=np.float64)
    except ValueError:
        _raise_bad_line(text, width, path, first_line)
        raise
    if data.size == 0:
        return np.empty((0, width))
    return data


def _raise_bad_line(text: str, width: int, path, first_line: int):
    for offset, line in enumerate(text.splitlines()):
        toks = line.split()
        if not toks or toks[0][0] in "#%":
            continue
        if len(toks) < width:
            raise MalformedInputError(
                f"{path}:{first_line + offset}: expected {width} fields, got {len(toks)}")
        for tok in toks[:width]:
            try:
                float(tok)
            except ValueError:
                raise MalformedInputError(
                    f"{path}:{first_line + offset}: non-numeric token {tok!r}") from None


def write_matrix_market(edges: EdgeList, path, symmetric: bool = False) -> None:
    """Write a coordinate file.

    With ``symmetric`` the caller passes each undirected edge once; entries
    are stored in the lower triangle as the format requires.
    """
    n = edges.n
    if symmetric:
        lo, hi = np.minimum(edges.src, edges.dst), np.maximum(edges.src, edges.dst)
        edges = EdgeList(hi, lo, edges.weights, n)
    value_field = "pattern" if edges.weights is None else "real"
    with open(path, "w") as fh:
        fh.write(f"%%MatrixMarket matrix coordinate {value_field} "
                 f"{'symmetric' if symmetric else 'general'}\n")
        fh.write(f"{n} {n} {len(edges)}\n")
        if edges.weights is None:
            np.savetxt(fh, np.column_stack([edges.src + 1, edges.dst + 1]), fmt="%d")
        else:
            for u, v, w in zip((edges.src + 1).tolist(), (edges.dst + 1).tolist(),
                               edges.weights.tolist()):
                fh.write(f"{u} {v} {w!r}\n")


# --- edge lists -----------------------------------------------------------

def load_edge_list(path, weighted: bool | None = None, remap: bool | None = None) -> EdgeList:
    """Read ``src dst [weight]`` lines; ``#`` and ``%`` start comments.

    ``weighted=None`` decides from the first data line. Ids are used verbatim
    when they already form the dense range ``0..k-1``; otherwise (or with
    ``remap=True``) they are renumbered in order of first appearance and the
    original ids are kept in ``EdgeList.id_map``.
    """
    with _open_text(path) as fh:
        text = fh.read()
    if weighted is None:
        weighted = False
        for line in text.splitlines():
            toks = line.split()
            if toks and toks[0][0] not in "#%":
                weighted = len(toks) >= 3
                break
    width = 3 if weighted else 2
    body = _load_columns(_io.StringIO(text), width, path)
    ids = body[:, :2]
    if ids.size and not np.all(ids == np.floor(ids)):
        raise MalformedInputError(f"{path}: vertex ids must be integers")
    src = ids[:, 0].astype(np.int64)
    dst = ids[:, 1].astype(np.int64)
    weights = body[:, 2].copy() if weighted else None
    flat = np.column_stack([src, dst]).ravel()
    uniq, first, inverse = np.unique(flat, return_index=True, return_inverse=True)
    dense = uniq.size == 0 or (uniq[0] == 0 and uniq[-1] == uniq.size - 1)
    if remap is None:
        remap = not dense
    if not remap:
        return EdgeList(src, dst, weights)
    order = np.argsort(first, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(order.size)
    new = rank[inverse].reshape(-1, 2)
    return EdgeList(new[:, 0], new[:, 1], weights, int(uniq.size), id_map=uniq[order])


def write_edge_list(edges: EdgeList, path, comment: str | None = None) -> None:
    with open(path, "w") as fh:
        if comment:
            for line in comment.splitlines():
                fh.write(f"# {line}\n")
        if edges.weights is None:
            np.savetxt(fh, np.column_stack([edges.src, edges.dst]), fmt="%d")
        else:
            for u, v, w in zip(edges.src.tolist(), edges.dst.tolist(), edges.weights.tolist()):
                fh.write(f"{u} {v} {w!r}\n")


# --- GRDN binary ----------------------------------------------------------

def save_binary(g: Graph, path) -> None:
    """Little-endian layout: 24-byte header (magic, u16 version, u16 flags,
    u64 n, u64 m), then u64 offsets[n+1], u32 indices[m], f32 weights[m]."""
    flags = (FLAG_DIRECTED if g.directed else 0) | (FLAG_WEIGHTED if g.weighted else 0)
    with open(path, "wb") as fh:
        fh.write(GRDN_HEADER.pack(GRDN_MAGIC, GRDN_VERSION, flags, g.n, g.m))
        fh.write(np.ascontiguousarray(g.row_offsets, dtype="<u8").tobytes())
        fh.write(np.ascontiguousarray(g.col_indices, dtype="<u4").tobytes())
        if g.weighted:
            fh.write(np.ascontiguousarray(g.weights, dtype="<f4").tobytes())


def load_binary(path, with_inverse: bool = False) -> Graph:
    with open(path, "rb") as fh:
        head = fh.read(GRDN_HEADER.size)
        if len(head) < GRDN_HEADER.size:
            raise MalformedInputError(f"{path}: truncated header")
        magic, version, flags, n, m = GRDN_HEADER.unpack(head)
        if magic != GRDN_MAGIC:
            raise IncompatibleFileError(f"{path}: bad magic {magic!r}")
        if version != GRDN_VERSION:
            raise IncompatibleFileError(f"{path}: unsupported version {version}")
        offsets = _read_array(fh, "<u8", n + 1, path)
        cols = _read_array(fh, "<u4", m, path)
        weights = _read_array(fh, "<f4", m, path) if flags & FLAG_WEIGHTED else None
    if offsets[0] != 0 or offsets[-1] != m or np.any(np.diff(offsets.astype(np.int64)) < 0):
        raise MalformedInputError(f"{path}: row offsets are not a valid CSR prefix sum")
    if m and cols.max() >= n:
        raise MalformedInputError(f"{path}: column index out of range")
    g = Graph(offsets.astype(OFFSET_DTYPE), cols.astype(INDEX_DTYPE),
              None if weights is None else weights.astype(WEIGHT_DTYPE),
              bool(flags & FLAG_DIRECTED))
    return g.with_inverse() if with_inverse else g


def _read_array(fh, dtype: str, count: int, path) -> np.ndarray:
    nbytes = np.dtype(dtype).itemsize * count
    raw = fh.read(nbytes)
    if len(raw) != nbytes:
        raise MalformedInputError(f"{path}: truncated array ({len(raw)} of {nbytes} bytes)")
    return np.frombuffer(raw, dtype=dtype)


# --- format dispatch ------------------------------------------------------

def infer_format(path) -> str:
    name = str(path).lower()
    if name.endswith(".gz"):
        name = name[:-3]
    suffix = name.rsplit(".", 1)[-1] if "." in name else ""
    if suffix == "mtx":
        return "mtx"
    if suffix in ("bin", "grdn"):
        return "bin"
    return "edgelist"


def normalize_format(fmt: str | None, path=None) -> str:
    if fmt is None:
        return infer_format(path)
    fmt = _FORMAT_ALIASES.get(fmt.lower(), fmt.lower())
    if fmt not in FORMATS:
        raise UnsupportedFormatError(f"unknown format {fmt!r}; choose from mtx, el, snap, bin")
    return fmt


def load_edges(path, fmt: str | None = None) -> EdgeList:
    fmt = normalize_format(fmt, path)
    if fmt == "mtx":
        return load_matrix_market(path)
    if fmt == "snap":
        return load_edge_list(path, weighted=False)
    if fmt == "edgelist":
        return load_edge_list(path)
    raise UnsupportedFormatError("binary images hold a built graph; use load_binary")


def load_graph(path, fmt: str | None = None, symmetrize: bool = False,
               with_inverse: bool = True) -> Graph:
    """Load any supported format into a Graph.

    MatrixMarket ``symmetric`` files and ``symmetrize=True`` give an
    undirected graph; everything else is directed and, with ``with_inverse``,
    carries its transpose for pull-style kernels.
    """
    fmt = normalize_format(fmt, path)
    if fmt == "bin":
        g = load_binary(path)
    else:
        edges = load_edges(path, fmt)
        undirected = symmetrize or edges.symmetric
        g = build_graph(edges, directed=not undirected)
    return g.with_inverse() if with_inverse else g


def save_graph(g: Graph, path, fmt: str | None = None) -> None:
    """Write ``g`` in any supported format (text formats list every stored edge)."""
    fmt = normalize_format(fmt, path)
    if fmt == "bin":
        save_binary(g, path)
    elif fmt == "mtx":
        write_matrix_market(g.edges(), path)
    else:
        write_edge_list(g.edges(), path)


# --- dataset manifest -----------------------------------------------------

_SUFFIX = {"": 1, "K": 10**3, "M": 10**6, "G": 10**9, "B": 10**9}


@dataclass(frozen=True)
class Count:
    """A published count with the precision it was printed at."""

    value: float
    tolerance: float
    text: str

    @classmethod
    def parse(cls, text: str) -> Count:
        match = re.fullmatch(r"\s*([0-9]+(?:\.([0-9]+))?)\s*([KMGB]?)\s*", text, re.IGNORECASE)
        if not match:
            raise MalformedInputError(f"bad count {text!r}")
        digits, frac, suffix = match.groups()
        unit = _SUFFIX[suffix.upper()]
        decimals = len(frac) if frac else 0
        return cls(float(digits) * unit, 0.5 * unit * 10.0 ** -decimals, text.strip())

    def matches(self, actual: float) -> bool:
        return abs(actual - self.value) <= self.tolerance


@dataclass
class DatasetEntry:
    name: str
    url: str = ""
    format: str = "mtx"
    expected_n: Count | None = None
    expected_m: Count | None = None
    avg_deg: float | None = None
    topology: str = "social"
    member: str | None = None
    description: str = ""
    extra: dict = field(default_factory=dict)


@dataclass
class DatasetManifest:
    entries: list[DatasetEntry]

    def __post_init__(self):
        names = [e.name for e in self.entries]
        dupes = {n for n in names if names.count(n) > 1}
        if dupes:
            raise MalformedInputError(f"duplicate manifest names: {sorted(dupes)}")

    def get(self, name: str) -> DatasetEntry:
        for entry in self.entries:
            if entry.name == name:
                return entry
        raise KeyError(name)

    def names(self) -> list[str]:
        return [e.name for e in self.entries]


DEFAULT_MANIFEST = Path(__file__).with_name("data") / "datasets.manifest"


def load_manifest(path=None) -> DatasetManifest:
    """Parse ``key = value`` records separated by blank lines; ``#`` starts a comment line."""
    path = DEFAULT_MANIFEST if path is None else Path(path)
    records, current = [], {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.strip()
        if line.startswith("#"):
            continue
        if not line:
            if current:
                records.append(current)
                current = {}
            continue
        key, eq, value = line.partition("=")
        if not eq:
            raise MalformedInputError(f"{path}:{lineno}: expected 'key = value'")
        current[key.strip()] = value.strip()
    if current:
        records.append(current)
    entries = []
    for rec in records:
        if "name" not in rec:
            raise MalformedInputError(f"{path}: record without a name: {rec}")
        fmt = normalize_format(rec.pop("format", "mtx"))
        topology = rec.pop("topology", "social")
        if topology not in ("mesh", "social"):
            raise MalformedInputError(f"{path}: topology must be mesh or social, got {topology}")
        entry = DatasetEntry(
            name=rec.pop("name"), url=rec.pop("url", ""), format=fmt,
            expected_n=Count.parse(rec.pop("expected_n")) if "expected_n" in rec else None,
            expected_m=Count.parse(rec.pop("expected_m")) if "expected_m" in rec else None,
            avg_deg=float(rec.pop("avg_deg")) if "avg_deg" in rec else None,
            topology=topology, member=rec.pop("member", None),
            description=rec.pop("description", ""), extra=rec)
        for count in (entry.expected_n, entry.expected_m):
            if count is not None and count.value <= 0:
                raise MalformedInputError(f"{path}: expected counts must be positive")
        entries.append(entry)
    return DatasetManifest(entries)


@dataclass
class CountCheck:
    n: int
    m_candidates: dict[str, int]
    n_ok: bool
    m_ok: bool
    m_convention: str | None
    avg_deg: float | None
    avg_ok: bool

    @property
    def passed(self) -> bool:
        return self.n_ok and self.m_ok and self.avg_ok


def check_counts(entry: DatasetEntry, edges: EdgeList) -> CountCheck:
    """Compare loaded counts with the manifest's published ones.

    Published edge counts may count stored entries or both directions of a
    symmetric file; the check accepts whichever convention matches and
    reports it.
    """
    n = edges.n
    raw = len(edges)
    candidates = {"stored": raw}
    if edges.symmetric:
        loops = int(np.count_nonzero(edges.src == edges.dst))
        candidates["both_directions"] = 2 * raw - loops
    n_ok = entry.expected_n is None or entry.expected_n.matches(n)
    convention = None
    if entry.expected_m is None:
        m_ok = True
    else:
        convention = next((k for k, v in candidates.items() if entry.expected_m.matches(v)), None)
        m_ok = convention is not None
    m_used = candidates.get(convention or "stored")
    avg = m_used / n if n else None
    avg_ok = entry.avg_deg is None or (avg is not None and abs(avg - entry.avg_deg) <= 0.5)
    return CountCheck(n, candidates, n_ok, m_ok, convention, avg, avg_ok)


def _download(url: str, target: Path, opener) -> None:
    tmp = None
    try:
        with opener(url) as resp, tempfile.NamedTemporaryFile(
                dir=target.parent, delete=False, prefix=".part-") as out:
            tmp = out.name
            shutil.copyfileobj(resp, out)
        os.replace(tmp, target)
    except (urllib.error.URLError, OSError, ValueError) as exc:
        if tmp and os.path.exists(tmp):
            os.unlink(tmp)
        raise FetchError(f"download of {url} failed: {exc}") from exc


def _extract_member(archive: Path, entry: DatasetEntry, dest: Path) -> Path:
    suffix = {"mtx": ".mtx", "snap": ".txt"}.get(entry.format, "")
    with tarfile.open(archive, "r:*") as tar:
        members = [m for m in tar.getmembers() if m.isfile()]
        wanted = entry.member or f"{entry.name}{suffix}"
        chosen = next((m for m in members if Path(m.name).name == Path(wanted).name), None)
        if chosen is None and entry.member is None:
            chosen = next((m for m in members if suffix and m.name.endswith(suffix)), None)
        if chosen is None:
            raise FetchError(f"{archive}: no {wanted} member")
        target = dest / Path(chosen.name).name
        if not target.exists():
            with tar.extractfile(chosen) as src, open(target, "wb") as out:
                shutil.copyfileobj(src, out)
    return target


def _is_tarball(name: str) -> bool:
    return name.endswith((".tar.gz", ".tgz", ".tar.bz2", ".tar.xz", ".tar"))


def local_path(entry: DatasetEntry, dest_dir) -> Path:
    """Where :func:`fetch_dataset` leaves the loadable file for ``entry``."""
    dest = Path(dest_dir)
    name = Path(urllib.parse.urlparse(entry.url).path).name or entry.name
    if _is_tarball(name):
        suffix = {"mtx": ".mtx", "snap": ".txt"}.get(entry.format, "")
        return dest / Path(entry.member or f"{entry.name}{suffix}").name
    return dest / name


def fetch_dataset(manifest: DatasetManifest, name: str, dest_dir, verify: bool = True,
                  opener=urllib.request.urlopen) -> Path:
    """Download ``name`` into ``dest_dir`` (skipped when already present),
    unpack tarballs, and check the published counts."""
    try:
        entry = manifest.get(name)
    except KeyError:
        raise FetchError(f"{name!r} is not in the manifest") from None
    if not entry.url:
        raise FetchError(f"{name!r} has no download URL; edit the manifest")
    dest = Path(dest_dir)
    dest.mkdir(parents=True, exist_ok=True)
    target = local_path(entry, dest)
    if not target.exists():
        archive_name = Path(urllib.parse.urlparse(entry.url).path).name
        download = dest / archive_name
        if not download.exists():
            _download(entry.url, download, opener)
        if _is_tarball(archive_name):
            target = _extract_member(download, entry, dest)
    if verify:
        verify_dataset(entry, target)
    return target


def verify_dataset(entry: DatasetEntry, path) -> CountCheck:
    if entry.format == "bin":
        g = load_binary(path)
        edges = EdgeList(np.zeros(g.m, np.int64), np.zeros(g.m, np.int64), None, g.n)
    else:
        edges = load_edges(path, entry.format)
    check = check_counts(entry, edges)
    if not check.passed:
        raise DatasetVerificationError(
            f"{entry.name}: loaded n={check.n}, m={check.m_candidates}, avg={check.avg_deg}; "
            f"expected n={entry.expected_n and entry.expected_n.text}, "
            f"m={entry.expected_m and entry.expected_m.text}, avg={entry.avg_deg}")
    return check


def parse_source_vertex(value) -> int:
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ParameterError(f"bad source vertex {value!r}") from None
