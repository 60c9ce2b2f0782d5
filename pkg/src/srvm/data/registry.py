"""Benchmark registry and a content-addressed download cache.

Cache layout: ``<cache>/<sha256>.<ext>`` for every stored file, plus
``<cache>/manifest.json`` mapping dataset names to their hashes. Corrupted
files are moved to ``<cache>/quarantine/``.
"""

from __future__ import annotations

import hashlib
import importlib.util
import json
import logging
import os
import shutil
import urllib.request
from dataclasses import dataclass, field
from pathlib import Path

from filelock import FileLock

from ..errors import DatasetLookupError, FetchError, IntegrityError
from .dataset import Dataset
from .parsers import drop_missing, parse_csv, parse_libsvm

log = logging.getLogger(__name__)

CACHE_ENV = "SRVM_CACHE"
MANIFEST = "manifest.json"
LIBSVM_BINARY = "https://www.csie.ntu.edu.tw/~cjlin/libsvmtools/datasets/binary/"
UCI = "https://archive.ics.uci.edu/ml/machine-learning-databases/"


@dataclass(frozen=True)
class Bundled:
    """A copy of the data shipped inside an installed Python package."""

    package: str
    path: str
    sha256: str
    delimiter: str | None = ","


@dataclass(frozen=True)
class DatasetInfo:
    name: str
    instances: int
    features: int
    url: str
    fmt: str  # "libsvm" or "csv"
    ext: str
    label_column: int = -1
    delimiter: str | None = ","
    drop_columns: tuple[int, ...] = ()
    sha256: str | None = None
    test_split: str | None = None
    bundled: Bundled | None = None
    notes: str = ""


REGISTRY: dict[str, DatasetInfo] = {
    d.name: d
    for d in [
        DatasetInfo("fourclass", 862, 2, LIBSVM_BINARY + "fourclass", "libsvm", "libsvm"),
        DatasetInfo(
            "svmguide1", 3089, 4, LIBSVM_BINARY + "svmguide1", "libsvm", "libsvm", test_split="svmguide1.t"
        ),
        DatasetInfo("svmguide1.t", 4000, 4, LIBSVM_BINARY + "svmguide1.t", "libsvm", "libsvm"),
        DatasetInfo(
            "liver-disorders",
            345,
            6,
            UCI + "liver-disorders/bupa.data",
            "csv",
            "csv",
            label_column=6,
            bundled=Bundled(
                "keel_ds",
                "data/balanced/raw/bupa.dat",
                "62f04d8e65dcea739d1ed5ef325e27566c2c975242a561cedbce4966c407237b",
            ),
            notes="label is the 'selector' field",
        ),
        DatasetInfo(
            "heart",
            270,
            13,
            UCI + "statlog/heart/heart.dat",
            "csv",
            "csv",
            label_column=13,
            delimiter=None,
            bundled=Bundled(
                "keel_ds",
                "data/balanced/raw/heart.dat",
                "0a9bffc81e612f8c5aae79cfe9414b58daf2e8fa8c21e67c4c80eb0883108ad6",
            ),
        ),
        DatasetInfo(
            "australian",
            690,
            14,
            UCI + "statlog/australian/australian.dat",
            "csv",
            "csv",
            label_column=14,
            delimiter=None,
            bundled=Bundled(
                "keel_ds",
                "data/balanced/raw/australian.dat",
                "ccc64bf31674bc1c282e11f9ba2bb3c5777ca15f03e3d96142ed0817bf7fedce",
            ),
        ),
        DatasetInfo(
            "lsvt",
            126,
            309,
            UCI + "00282/LSVT_voice_rehabilitation.zip",
            "csv",
            "csv",
            label_column=-1,
            notes="upstream ships an xlsx workbook; import a CSV export (features..., label) with `srvm fetch lsvt --file`",
        ),
        DatasetInfo(
            "iris",
            150,
            4,
            UCI + "iris/iris.data",
            "csv",
            "csv",
            label_column=4,
            bundled=Bundled(
                "keel_ds",
                "data/balanced/raw/iris.dat",
                "4db104ec67888b44855b102d6e652b61a22682b34e20eb85abb078b63f265a8c",
            ),
        ),
        DatasetInfo(
            "breast-cancer",
            683,
            10,
            UCI + "breast-cancer-wisconsin/breast-cancer-wisconsin.data",
            "csv",
            "csv",
            label_column=10,
            drop_columns=(0,),
            notes="sample-code column dropped, leaving 9 features",
        ),
        DatasetInfo(
            "advertisement",
            3279,
            1558,
            UCI + "internet_ads/ad.data",
            "csv",
            "csv",
            label_column=-1,
        ),
    ]
}


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "srvm"


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


class DatasetCache:
    def __init__(self, root=None):
        self.root = Path(root) if root is not None else default_cache_dir()

    @property
    def manifest_path(self) -> Path:
        return self.root / MANIFEST

    def manifest(self) -> dict:
        if not self.manifest_path.exists():
            return {}
        return json.loads(self.manifest_path.read_text())

    def _write_manifest(self, data: dict) -> None:
        tmp = self.manifest_path.with_suffix(".tmp")
        tmp.write_text(json.dumps(data, indent=2, sort_keys=True))
        tmp.replace(self.manifest_path)

    def _lock(self, key: str) -> FileLock:
        self.root.mkdir(parents=True, exist_ok=True)
        safe = sha256_bytes(key.encode())[:16]
        return FileLock(str(self.root / f".{safe}.lock"))

    def quarantine(self, path: Path) -> Path:
        qdir = self.root / "quarantine"
        qdir.mkdir(parents=True, exist_ok=True)
        target = qdir / path.name
        shutil.move(str(path), target)
        return target

    def verified(self, name: str, expected: str | None) -> Path | None:
        """Cached path for ``name`` after re-hashing it, or None on a miss."""
        entry = self.manifest().get(name)
        if entry is None:
            return None
        path = self.root / entry["file"]
        if not path.exists():
            return None
        actual = sha256_file(path)
        if actual != entry["sha256"] or (expected is not None and actual != expected):
            moved = self.quarantine(path)
            raise IntegrityError(f"cached file for {name!r} failed its hash check; moved to {moved}")
        return path

    def store(self, name: str, data: bytes, ext: str, source: str, expected: str | None = None) -> Path:
        digest = sha256_bytes(data)
        if expected is not None and digest != expected:
            raise IntegrityError(f"{name!r} from {source} has sha256 {digest}, expected {expected}")
        self.root.mkdir(parents=True, exist_ok=True)
        path = self.root / f"{digest}.{ext}"
        tmp = path.with_suffix(".part")
        tmp.write_bytes(data)
        tmp.replace(path)
        manifest = self.manifest()
        manifest[name] = {"file": path.name, "sha256": digest, "source": source}
        self._write_manifest(manifest)
        return path


def _bundled_bytes(b: Bundled) -> bytes | None:
    spec = importlib.util.find_spec(b.package)
    if spec is None or not spec.submodule_search_locations:
        return None
    path = Path(list(spec.submodule_search_locations)[0]) / b.path
    return path.read_bytes() if path.exists() else None


def _download(url: str, timeout: float) -> bytes:
    try:
        with urllib.request.urlopen(url, timeout=timeout) as resp:
            return resp.read()
    except Exception as exc:  # urllib raises a zoo of exception types
        raise FetchError(f"download of {url} failed: {exc}") from exc


def fetch_dataset(name_or_url: str, cache_dir=None, timeout: float = 30.0, local_file=None) -> Path:
    """Return a local path for a registry name or URL, downloading at most once.

    Registry entries with a bundled copy are served from the installed
    package before the network is tried. ``local_file`` imports a file the
    user obtained by other means.
    """
    cache = DatasetCache(cache_dir)
    info = REGISTRY.get(name_or_url)
    if info is None and "://" not in name_or_url and local_file is None:
        raise DatasetLookupError(f"unknown dataset {name_or_url!r} (known: {', '.join(sorted(REGISTRY))})")
    key = name_or_url
    with cache._lock(key):
        if local_file is None:
            hit = cache.verified(key, info.sha256 if info else None)
            if hit is not None:
                return hit
        ext = info.ext if info else (Path(name_or_url).suffix.lstrip(".") or "dat")
        if local_file is not None:
            return cache.store(key, Path(local_file).read_bytes(), ext, f"file:{Path(local_file).resolve()}")
        if info is not None and info.bundled is not None:
            data = _bundled_bytes(info.bundled)
            if data is not None:
                src = f"{info.bundled.package}:{info.bundled.path}"
                return cache.store(key, data, ext, src, info.bundled.sha256)
        url = info.url if info else name_or_url
        log.info("downloading %s", url)
        return cache.store(key, _download(url, timeout), ext, url, info.sha256 if info else None)


def _parse(info: DatasetInfo, path: Path, source: str) -> Dataset:
    text = path.read_text()
    if info.fmt == "libsvm":
        ds = parse_libsvm(text, info.features, provenance=source)
    else:
        delimiter = info.delimiter
        if info.bundled is not None and source.startswith(info.bundled.package + ":"):
            delimiter = info.bundled.delimiter
        raw = parse_csv(text, info.label_column, delimiter=delimiter, drop_columns=info.drop_columns, provenance=source)
        ds = drop_missing(raw)
    if ds.n != info.instances or ds.feature_count != info.features:
        log.warning(
            "%s: parsed %d x %d, registry expects %d x %d",
            info.name, ds.n, ds.feature_count, info.instances, info.features,
        )
    ds.meta["name"] = info.name
    return ds


def load_dataset(name: str, cache_dir=None, timeout: float = 30.0) -> Dataset:
    info = REGISTRY.get(name)
    if info is None:
        raise DatasetLookupError(f"unknown dataset {name!r}")
    path = fetch_dataset(name, cache_dir, timeout)
    source = DatasetCache(cache_dir).manifest().get(name, {}).get("source", str(path))
    return _parse(info, path, source)


def load_file(path, fmt: str | None = None, label_column: int = -1, delimiter: str | None = ",") -> Dataset:
    """Load a local LIBSVM or delimited file; the format is sniffed if not given."""
    path = Path(path)
    text = path.read_text()
    if fmt is None:
        first = next((ln for ln in text.splitlines() if ln.strip()), "")
        fmt = "libsvm" if ":" in first else "csv"
    if fmt == "libsvm":
        return parse_libsvm(text, provenance=str(path))
    if delimiter == "," and "," not in text.splitlines()[0]:
        delimiter = None
    return drop_missing(parse_csv(text, label_column, delimiter=delimiter, provenance=str(path)))
