"""Datasets: parsers, the benchmark registry/cache and model archives."""

from .dataset import Dataset
from .parsers import RawTable, drop_missing, parse_csv, parse_libsvm
from .registry import REGISTRY, DatasetCache, fetch_dataset, load_dataset, load_file
