"""Alist matrices, design reports and atomic file output."""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field, fields
from fractions import Fraction
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from . import __version__

REPORT_SCHEMA = 1


def atomic_write(path, data: str | bytes) -> Path:
    """Write to a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, mode, **({} if mode == "wb" else {"encoding": "utf-8", "newline": "\n"})) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


# -- alist -------------------------------------------------------------------

def alist_text(H) -> str:
    """Alist encoding of a sparse binary matrix.

    Layout: ``N M``; max column and row degree; column degrees; row degrees;
    one line of 1-based row indices per column, then one line of 1-based
    column indices per row, each padded with zeros to the max degree.
    """
    csc = sp.csc_matrix(H)
    csr = sp.csr_matrix(H)
    csc.sort_indices()
    csr.sort_indices()
    M, N = csr.shape
    col_deg = np.diff(csc.indptr)
    row_deg = np.diff(csr.indptr)
    max_c = int(col_deg.max()) if N else 0
    max_r = int(row_deg.max()) if M else 0

    def lists(mat, n, width):
        out = []
        for x in range(n):
            nb = (mat.indices[mat.indptr[x]:mat.indptr[x + 1]] + 1).tolist()
            nb += [0] * (width - len(nb))
            out.append(" ".join(map(str, nb)))
        return out

    lines = [f"{N} {M}", f"{max_c} {max_r}",
             " ".join(map(str, col_deg.tolist())), " ".join(map(str, row_deg.tolist()))]
    lines += lists(csc, N, max_c)
    lines += lists(csr, M, max_r)
    return "\n".join(lines) + "\n"


def parse_alist(text: str) -> sp.csr_matrix:
    rows = [line.split() for line in text.splitlines() if line.strip()]
    try:
        N, M = map(int, rows[0])
        col_deg = list(map(int, rows[2]))
        row_deg = list(map(int, rows[3]))
        col_lists = [[int(x) for x in r if int(x)] for r in rows[4:4 + N]]
        row_lists = [[int(x) for x in r if int(x)] for r in rows[4 + N:4 + N + M]]
    except (IndexError, ValueError) as exc:
        raise ValueError(f"malformed alist: {exc}") from None
    if len(col_lists) != N or len(row_lists) != M:
        raise ValueError("alist is truncated")
    if [len(c) for c in col_lists] != col_deg or [len(r) for r in row_lists] != row_deg:
        raise ValueError("alist degree lists disagree with neighbour lists")
    r_idx = [r - 1 for c in col_lists for r in c]
    c_idx = [j for j, c in enumerate(col_lists) for _ in c]
    H = sp.csr_matrix((np.ones(len(r_idx), dtype=np.int8), (r_idx, c_idx)), shape=(M, N))
    from_rows = {(i, c - 1) for i, r in enumerate(row_lists) for c in r}
    if from_rows != set(zip(r_idx, c_idx)):
        raise ValueError("alist column and row lists describe different matrices")
    return H


def write_alist(H, path) -> Path:
    return atomic_write(path, alist_text(H))


def read_alist(path) -> sp.csr_matrix:
    return parse_alist(Path(path).read_text(encoding="utf-8"))


# -- reports -----------------------------------------------------------------

def _num_out(x):
    if x is None:
        return None
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return int(x)


def _num_in(x):
    if x is None:
        return None
    if isinstance(x, str):
        f = Fraction(x)
        return f.numerator if f.denominator == 1 else f
    return int(x)


@dataclass
class DesignReport:
    mode: str
    params: dict
    seed: int
    partition: list[list[int]]
    powers: list[list[int]] | None = None
    t_star: list[int] | None = None
    t_labels: list[str] | None = None
    f_sum: Fraction | None = None
    per_pattern: dict[int, Fraction] | None = None
    f_sc_initial: int | Fraction | None = None
    f_sc_final: int | Fraction | None = None
    lifted_per_pattern: dict[int, int | Fraction] | None = None
    cutting_vector: list[int] | None = None
    solver: dict | None = None
    cpo: dict | None = None
    tool_version: str = __version__
    schema_version: int = REPORT_SCHEMA
    # timings vary between runs, so they stay out of the serialized report
    wall_times: dict = field(default_factory=dict, compare=False)

    @property
    def f_sum_rounded(self) -> int | None:
        if self.f_sum is None:
            return None
        return int((Fraction(self.f_sum) * 2 + 1) // 2)

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            if f.name == "wall_times":
                continue
            v = getattr(self, f.name)
            if f.name in ("f_sum", "f_sc_initial", "f_sc_final"):
                v = _num_out(v)
            elif f.name in ("per_pattern", "lifted_per_pattern") and v is not None:
                v = {str(k): _num_out(n) for k, n in sorted(v.items())}
            out[f.name] = v
        out["f_sum_rounded"] = self.f_sum_rounded
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "DesignReport":
        data = dict(data)
        data.pop("f_sum_rounded", None)
        if data.get("schema_version") != REPORT_SCHEMA:
            raise ValueError(f"unsupported report schema {data.get('schema_version')!r}")
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown report fields: {sorted(unknown)}")
        for key in ("f_sum", "f_sc_initial", "f_sc_final"):
            if key in data:
                v = _num_in(data[key])
                data[key] = Fraction(v) if key == "f_sum" and v is not None else v
        for key in ("per_pattern", "lifted_per_pattern"):
            if data.get(key) is not None:
                data[key] = {int(k): _num_in(v) for k, v in data[key].items()}
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_table(self) -> str:
        p = self.params
        lines = [
            f"scforge {self.tool_version}  mode={self.mode}  seed={self.seed}",
            f"gamma={p['gamma']} kappa={p['kappa']} z={p['z']} m={p['m']} L={p['L']}",
            "",
            "partition (component per circulant):",
        ]
        lines += ["  " + " ".join(map(str, row)) for row in self.partition]
        if self.cutting_vector is not None:
            lines.append(f"cutting vector: {self.cutting_vector}")
        if self.t_star is not None:
            lines.append("overlap parameters: " + " ".join(
                f"{lab}={v}" for lab, v in zip(self.t_labels or [], self.t_star)))
        if self.per_pattern:
            lines += ["", f"{'pattern':<8}{'protograph count':>20}{'lifted count':>16}"]
            for ell in sorted(set(self.per_pattern) | set(self.lifted_per_pattern or {})):
                proto = self.per_pattern.get(ell, 0)
                lifted = (self.lifted_per_pattern or {}).get(ell, "-")
                lines.append(f"{'P' + str(ell):<8}{str(proto):>20}{str(lifted):>16}")
        if self.f_sum is not None:
            lines.append(f"weighted pattern count: {self.f_sum} (rounded {self.f_sum_rounded})")
        if self.f_sc_initial is not None:
            lines.append(f"lifted objects, starting powers: {self.f_sc_initial}")
        if self.f_sc_final is not None:
            lines.append(f"lifted objects, optimized powers: {self.f_sc_final}")
        if self.cpo:
            lines.append(f"power search: {self.cpo.get('iterations')} iterations, "
                         f"{self.cpo.get('accepted')} accepted, stopped on {self.cpo.get('stop_reason')}")
        if self.powers is not None:
            lines += ["", "circulant powers:"]
            width = len(str(p["z"] - 1))
            lines += ["  " + " ".join(str(v).rjust(width) for v in row) for row in self.powers]
        return "\n".join(lines) + "\n"


def write_report(report: DesignReport, path, fmt: str = "report-json") -> Path:
    if fmt == "report-json":
        return atomic_write(path, report.to_json())
    if fmt == "report-table":
        return atomic_write(path, report.to_table())
    raise ValueError(f"unknown report format {fmt!r}")


def load_report(path) -> DesignReport:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not a JSON report ({exc})") from None
    return DesignReport.from_dict(data)
