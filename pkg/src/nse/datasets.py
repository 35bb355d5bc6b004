"""Locating and verifying the real p-value sets analysed in the examples.

Neither file ships with the package. A dataset is looked up, in order, at
the path given by ``NSE_<NAME>_PATH``, at ``$NSE_DATA_DIR/<name>.txt`` and
at ``nse/data/<name>.txt`` inside the installed package. Whatever file is
found must reproduce the published summary counts of that dataset, which
stand in for a byte checksum since the values circulate in several text
encodings.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

from . import pi0 as pi0_mod
from .errors import DatasetUnavailable, PValueFileError
from .pvalues import PValueSet, read_pvalues

PACKAGE_DATA = Path(__file__).parent / "data"


@dataclass(frozen=True)
class DatasetInfo:
    name: str
    m: int
    n_leq_005: int
    n_leq_001: int
    n_above_half: int
    pi0_dalmasso: float  # to 4 decimals
    source: str

    @property
    def env_var(self) -> str:
        return f"NSE_{self.name.upper()}_PATH"

    def fingerprint(self, ps: PValueSet) -> dict:
        return {
            "m": ps.m,
            "n_leq_005": ps.count_leq(0.05),
            "n_leq_001": ps.count_leq(0.01),
            "n_above_half": ps.m - ps.count_leq(0.5),
            "pi0_dalmasso": round(pi0_mod.dalmasso(ps).value, 4),
        }

    def expected_fingerprint(self) -> dict:
        return {
            "m": self.m,
            "n_leq_005": self.n_leq_005,
            "n_leq_001": self.n_leq_001,
            "n_above_half": self.n_above_half,
            "pi0_dalmasso": self.pi0_dalmasso,
        }


HEDENFALK = DatasetInfo(
    "hedenfalk", 3170, 606, 265, 1072, 0.7177,
    "BRCA1 vs BRCA2 gene expression p-values (Hedenfalk et al. 2001); "
    "R packages sgof (Hedenfalk) and qvalue (hedenfalk$p)",
)
DIZ = DatasetInfo(
    "diz", 261, 26, 8, 104, 0.8427,
    "Mytilus edulis egg expression p-values (Diz et al. 2009)",
)
DATASETS = {d.name: d for d in (HEDENFALK, DIZ)}


def candidate_paths(name: str) -> list[Path]:
    info = DATASETS[name]
    paths = []
    if os.environ.get(info.env_var):
        paths.append(Path(os.environ[info.env_var]))
    if os.environ.get("NSE_DATA_DIR"):
        paths.append(Path(os.environ["NSE_DATA_DIR"]) / f"{name}.txt")
    paths.append(PACKAGE_DATA / f"{name}.txt")
    return paths


def find_dataset(name: str) -> Path | None:
    for p in candidate_paths(name):
        if p.is_file():
            return p
    return None


def is_available(name: str) -> bool:
    return find_dataset(name) is not None


def load_dataset(name: str, path: str | Path | None = None, column: str | None = None,
                 verify: bool = True) -> PValueSet:
    """Load a named dataset and check it against its published summary counts."""
    if name not in DATASETS:
        raise DatasetUnavailable(f"unknown dataset {name!r}; known: {sorted(DATASETS)}")
    info = DATASETS[name]
    path = Path(path) if path is not None else find_dataset(name)
    if path is None:
        where = ", ".join(str(p) for p in candidate_paths(name))
        raise DatasetUnavailable(
            f"{name} p-values not found (looked in: {where}); provide a file with "
            f"one p-value per line via {info.env_var} or NSE_DATA_DIR"
        )
    ps = read_pvalues(path, column)
    if verify:
        got, want = info.fingerprint(ps), info.expected_fingerprint()
        if got != want:
            diff = {k: (got[k], want[k]) for k in want if got[k] != want[k]}
            raise PValueFileError(path, None, f"does not match the published {name} data: {diff}")
    return ps
