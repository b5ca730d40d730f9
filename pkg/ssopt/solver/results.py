from dataclasses import dataclass, field, fields
from typing import List, Optional

import pandas as pd


@dataclass(frozen=True)
class ConstantKSolution:
    kappa: float
    xi_hat: float
    s_hat: float
    S_hat: float
    nu_hat: float
    residuals: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            'kappa': self.kappa, 'xi_hat': self.xi_hat, 's_hat': self.s_hat, 'S_hat': self.S_hat,
            'nu_hat': self.nu_hat, 'residuals': dict(self.residuals),
        }


# membership of a piece in the index sets of the step algorithm
N_LESS = 'N<'
N_EQUAL = 'N='
N_GREATER = 'N>'


@dataclass
class CandidateRow:
    n: int
    q_lo: float
    q_hi: float
    K_n: float
    nu_hat: float
    s_hat: float
    S_hat: float
    xi_hat: float
    xi_star: float
    membership: str
    in_candidate_set: bool
    nu_tilde: float
    s_n: Optional[float] = None
    S_n: Optional[float] = None
    nu_n: Optional[float] = None
    chi_lower: Optional[int] = None
    chi_upper: Optional[int] = None
    pruned_ok: Optional[bool] = None

    def to_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


class CandidateTable:
    """ Per-piece record of the step algorithm, ordered by piece index n """

    def __init__(self, rows: List[CandidateRow]) -> None:
        self.rows = sorted(rows, key=lambda r: r.n)

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def __getitem__(self, n):
        """Row of piece n (1-based)."""
        return self.rows[n - 1]

    def candidates(self):
        return [r for r in self.rows if r.in_candidate_set]

    def members(self, membership):
        return [r.n for r in self.rows if r.membership == membership]

    def to_records(self):
        return [r.to_dict() for r in self.rows]

    def to_frame(self):
        return pd.DataFrame.from_records(self.to_records(), columns=[f.name for f in fields(CandidateRow)])


@dataclass
class SolveResult:
    s_star: float
    S_star: float
    nu_star: float
    method: str
    candidate_table: Optional[CandidateTable] = None
    constant: Optional[ConstantKSolution] = None
    certificate: Optional[object] = None
    tolerances: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)
    grid_check: Optional[dict] = None

    @property
    def xi_star(self):
        return self.S_star - self.s_star

    def to_dict(self):
        out = {
            's_star': self.s_star,
            'S_star': self.S_star,
            'nu_star': self.nu_star,
            'xi_star': self.xi_star,
            'method': self.method,
            'tolerances': dict(self.tolerances),
            'diagnostics': dict(self.diagnostics),
        }
        if self.constant is not None:
            out['constant'] = self.constant.to_dict()
        if self.candidate_table is not None:
            out['candidate_table'] = self.candidate_table.to_records()
        if self.certificate is not None:
            out['certificate'] = self.certificate.to_dict()
        if self.grid_check is not None:
            out['grid_check'] = dict(self.grid_check)
        return out
