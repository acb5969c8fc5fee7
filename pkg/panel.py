"""Empirical volatility pipeline: past vs future rolling standard deviations.

For each as-of date, every security with a full past window gets a past std
and, from whatever observations exist in the following window, a future std.
Securities are bucketed by past-std quantile and the future/past ratio is
averaged per bucket. Under pure estimation noise the lowest past-vol bucket
reverts upward and the highest downward.
"""

import logging
import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
import pandas as pd

import config
from montecarlo import SimConfig, simulate_returns
from statfn import DomainError, require_int

logger = logging.getLogger(__name__)

COLUMNS = ['date', 'security_id', 'return']
DATE_FORMAT = '%Y-%m-%d'


class PanelError(DomainError):
    """Raised when a returns panel violates its invariants."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ParseError(PanelError):
    pass


class DuplicateKeyError(PanelError):
    def __init__(self, key, line=None):
        date, security_id = key
        super().__init__(f"duplicate observation for ({date}, {security_id})", line)
        self.key = key


class NonFiniteReturnError(PanelError):
    pass


def _first_line(mask, lines):
    """Line number of the first offending row, or None when rows carry no lines."""
    position = int(np.flatnonzero(np.asarray(mask))[0])
    return None if lines is None else int(lines[position])


def _check_rows(frame, lines=None):
    """Enforce the panel invariants on a typed frame; lines map rows to file lines."""
    if frame['security_id'].eq('').any():
        raise ParseError("empty security_id", _first_line(frame['security_id'].eq(''), lines))
    returns = frame['return'].to_numpy(dtype=float)
    finite = np.isfinite(returns)
    if not finite.all():
        bad = ~finite
        raise NonFiniteReturnError(f"non-finite return {returns[bad][0]!r}", _first_line(bad, lines))
    if (returns <= -1.0).any():
        bad = returns <= -1.0
        raise PanelError(f"return {returns[bad][0]!r} is a loss of 100% or more", _first_line(bad, lines))
    dupes = frame.duplicated(subset=['date', 'security_id'], keep='first').to_numpy()
    if dupes.any():
        position = int(np.flatnonzero(dupes)[0])
        row = frame.iloc[position]
        key = (row['date'].strftime(DATE_FORMAT), row['security_id'])
        raise DuplicateKeyError(key, None if lines is None else int(lines[position]))


class ReturnPanel:
    """Long-format dated returns; row order on input never matters."""

    def __init__(self, frame):
        missing = [c for c in COLUMNS if c not in frame.columns]
        if missing:
            raise PanelError(f"panel is missing columns: {', '.join(missing)}")
        frame = frame[COLUMNS].copy()
        frame['date'] = pd.to_datetime(frame['date'])
        frame['security_id'] = frame['security_id'].astype(str)
        frame['return'] = frame['return'].astype(float)
        _check_rows(frame)
        self.frame = frame.sort_values(['date', 'security_id'], kind='mergesort').reset_index(drop=True)

    @classmethod
    def from_records(cls, records):
        return cls(pd.DataFrame.from_records(list(records), columns=COLUMNS))

    def __len__(self):
        return len(self.frame)

    @cached_property
    def wide(self):
        """Dates x securities, NaN where a security has no observation."""
        return self.frame.pivot(index='date', columns='security_id', values='return').sort_index().sort_index(axis=1)

    @property
    def dates(self):
        return self.wide.index

    @property
    def securities(self):
        return list(self.wide.columns)


@dataclass(frozen=True)
class WindowSpec:
    past_len: int = config.MONTHLY_PERIODS
    future_len: int = config.MONTHLY_PERIODS
    min_future: int = config.MIN_FUTURE

    def __post_init__(self):
        require_int('past_len', self.past_len, 2)
        require_int('min_future', self.min_future, 2)
        require_int('future_len', self.future_len, self.min_future)


@dataclass(frozen=True)
class QuantileGroups:
    breakpoints: tuple = config.QUANTILE_BREAKPOINTS

    def __post_init__(self):
        points = tuple(float(b) for b in self.breakpoints)
        if any(not (0.0 < b < 1.0) for b in points):
            raise DomainError(f"breakpoints must lie in (0, 1), got {points}")
        if any(b <= a for a, b in zip(points, points[1:])):
            raise DomainError(f"breakpoints must be strictly increasing, got {points}")
        object.__setattr__(self, 'breakpoints', points)

    def labels(self):
        edges = (0.0,) + self.breakpoints + (1.0,)
        return [f"{lo * 100:g}-{hi * 100:g}%" for lo, hi in zip(edges, edges[1:])]


@dataclass
class WindowStds:
    """Per-security past/future stds at one as-of date, plus exclusion counts."""

    as_of: pd.Timestamp
    stds: pd.DataFrame
    present: int
    insufficient: int

    @property
    def eligible(self):
        return len(self.stds)


@dataclass
class RatioReport:
    """Per-date, per-group mean future/past std ratio.

    rows: long frame (date, group, mean_ratio, count); mean_ratio is NaN for an
    empty group. overall: per-group mean of the per-date means, each date
    weighted equally. accounting: per-date present/eligible/excluded counts.
    """

    groups: list
    rows: pd.DataFrame
    overall: dict
    accounting: pd.DataFrame = field(repr=False)

    def long_rows(self):
        out = []
        for row in self.rows.to_dict('records'):
            out.append({
                'date': row['date'].strftime(DATE_FORMAT),
                'group': row['group'],
                'mean_ratio': None if math.isnan(row['mean_ratio']) else float(row['mean_ratio']),
                'count': int(row['count']),
            })
        return out

    def to_dict(self):
        return {
            'groups': self.groups,
            'overall': self.overall,
            'dates': int(self.rows['date'].nunique()),
            'rows': self.long_rows(),
            'accounting': [
                {'date': r.date.strftime(DATE_FORMAT), 'present': int(r.present), 'eligible': int(r.eligible),
                 'insufficient': int(r.insufficient), 'zero_past': int(r.zero_past),
                 'zero_future': int(r.zero_future)}
                for r in self.accounting.itertuples(index=False)
            ],
        }


def load_panel(source, fmt='csv'):
    """Read a `date,security_id,return` CSV (header required) from a path or text stream."""
    if fmt != 'csv':
        raise DomainError(f"unsupported panel format {fmt!r}")
    if isinstance(source, (str, Path)):
        with open(source, 'r', encoding='utf-8', newline='') as f:
            return load_panel(f, fmt)

    try:
        raw = pd.read_csv(source, dtype=str, keep_default_na=False, skipinitialspace=True)
    except pd.errors.EmptyDataError:
        raise ParseError("empty file, expected header date,security_id,return", 1)
    except pd.errors.ParserError as e:
        match = re.search(r'line (\d+)', str(e))
        raise ParseError(f"malformed CSV: {e}", int(match.group(1)) if match else None)

    header = [c.strip() for c in raw.columns]
    if header != COLUMNS:
        raise ParseError(f"header must be {','.join(COLUMNS)}, got {','.join(header)}", 1)
    raw.columns = header
    lines = np.arange(len(raw)) + 2

    dates = pd.to_datetime(raw['date'].str.strip(), format='ISO8601', errors='coerce')
    if dates.isna().any():
        bad = dates.isna()
        raise ParseError(f"invalid date {raw['date'][bad].iloc[0]!r}", _first_line(bad, lines))

    text = raw['return'].str.strip()
    returns = pd.to_numeric(text, errors='coerce')
    unparsed = returns.isna() & ~text.str.lower().isin(['nan', '+nan', '-nan'])
    if unparsed.any():
        raise ParseError(f"invalid return {text[unparsed].iloc[0]!r}", _first_line(unparsed, lines))

    frame = pd.DataFrame({'date': dates, 'security_id': raw['security_id'].str.strip(), 'return': returns})
    _check_rows(frame, lines)
    panel = ReturnPanel(frame)
    logger.info("Loaded panel: %d observations, %d securities, %d dates",
                len(panel), len(panel.securities), len(panel.dates))
    return panel


def _as_of_position(panel, as_of):
    as_of = pd.Timestamp(as_of)
    try:
        return panel.dates.get_loc(as_of)
    except KeyError:
        raise DomainError(f"as-of date {as_of.date()} is not a date of the panel")


def _window_std(window):
    """Column stds (ddof=1, NaN skipped); exactly zero for a constant column."""
    return window.std(ddof=1).where(window.max() - window.min() > 0.0, 0.0)


def past_future_stds(panel, spec, as_of):
    """Past std over exactly past_len consecutive dates ending at as_of, future std over
    whatever observations exist among the next future_len dates (at least min_future)."""
    t = _as_of_position(panel, as_of)
    wide = panel.wide
    present = wide.iloc[t].notna()

    if t + 1 < spec.past_len:
        eligible = pd.Series(False, index=wide.columns)
        past = future = wide.iloc[0:0]
    else:
        past = wide.iloc[t - spec.past_len + 1:t + 1]
        future = wide.iloc[t + 1:t + 1 + spec.future_len]
        eligible = present & past.notna().all(axis=0) & (future.notna().sum(axis=0) >= spec.min_future)

    columns = wide.columns[eligible.to_numpy()]
    stds = pd.DataFrame({
        'past_std': _window_std(past[columns]),
        'future_std': _window_std(future[columns]),
    }, index=columns, dtype=float)
    stds.index.name = 'security_id'
    n_present = int(present.sum())
    return WindowStds(as_of=wide.index[t], stds=stds, present=n_present, insufficient=n_present - len(columns))


def quantile_groups(past_stds, groups):
    """Group index per security: rank r of N (ascending, ties by security id) falls in
    the group whose probability interval contains (r - 0.5) / N."""
    if len(past_stds) == 0:
        raise DomainError("quantile_groups needs at least one security")
    order = (pd.DataFrame({'std': past_stds.to_numpy(dtype=float), 'id': past_stds.index.astype(str)},
                          index=past_stds.index)
             .sort_values(['std', 'id'], kind='mergesort'))
    n = len(order)
    midpoints = (np.arange(1, n + 1) - 0.5) / n
    labels = np.searchsorted(np.asarray(groups.breakpoints), midpoints, side='right')
    return pd.Series(labels, index=order.index, name='group').reindex(past_stds.index)


def ratio_report(panel, spec, groups, date_range=None):
    """Mean future/past std ratio per quantile group for each as-of date.

    date_range is an inclusive (start, end) pair. Securities whose past or
    future std is zero are excluded and counted; a date with no eligible
    security still gets one row per group, with NaN mean and count 0.
    """
    names = groups.labels()
    dates = panel.dates
    if date_range is not None:
        start, end = (pd.Timestamp(d) for d in date_range)
        dates = dates[(dates >= start) & (dates <= end)]

    rows, accounting = [], []
    for as_of in dates:
        window = past_future_stds(panel, spec, as_of)
        stds = window.stds
        zero_past = stds['past_std'] <= 0.0
        zero_future = ~zero_past & (stds['future_std'] <= 0.0)
        stds = stds[~(zero_past | zero_future)]
        accounting.append({'date': as_of, 'present': window.present, 'eligible': len(stds),
                           'insufficient': window.insufficient, 'zero_past': int(zero_past.sum()),
                           'zero_future': int(zero_future.sum())})

        if stds.empty:
            labels = ratios = pd.Series(dtype=float)
        else:
            labels = quantile_groups(stds['past_std'], groups)
            ratios = stds['future_std'] / stds['past_std']
        for index, name in enumerate(names):
            members = ratios[labels == index]
            rows.append({'date': as_of, 'group': name,
                         'mean_ratio': float(members.mean()) if len(members) else math.nan,
                         'count': len(members)})

    rows = pd.DataFrame(rows, columns=['date', 'group', 'mean_ratio', 'count'])
    accounting = pd.DataFrame(accounting, columns=['date', 'present', 'eligible', 'insufficient',
                                                   'zero_past', 'zero_future'])
    for column in ('zero_past', 'zero_future'):
        if accounting[column].sum():
            logger.warning("Excluded %d security-dates with %s std", int(accounting[column].sum()),
                           column.replace('zero_', 'zero '))

    overall = {}
    for name in names:
        means = rows.loc[rows['group'] == name, 'mean_ratio'].dropna()
        overall[name] = float(means.mean()) if len(means) else None
    return RatioReport(groups=names, rows=rows, overall=overall, accounting=accounting)


def synthetic_panel(securities=config.SYNTHETIC_SECURITIES, as_of_dates=config.SYNTHETIC_AS_OF_DATES,
                    spec=WindowSpec(), sigma=config.SYNTHETIC_SIGMA, seed=0, threads=1):
    """I.i.d. normal monthly panel in which every security has the same true volatility.

    Returns (panel, (first_as_of, last_as_of)): the as-of range in which every
    security has a full past and a full future window.
    """
    require_int('as_of_dates', as_of_dates, 1)
    periods = spec.past_len + as_of_dates - 1 + spec.future_len
    returns = simulate_returns(SimConfig(m=securities, n=periods, seed=seed, sigma=sigma, threads=threads))
    dates = pd.date_range('1990-01-01', periods=periods, freq='MS')
    width = len(str(securities - 1))
    ids = [f"S{i:0{width}d}" for i in range(securities)]
    frame = pd.DataFrame({
        'date': np.tile(dates, securities),
        'security_id': np.repeat(ids, periods),
        'return': returns.ravel(),
    })
    first = dates[spec.past_len - 1]
    last = dates[spec.past_len - 1 + as_of_dates - 1]
    return ReturnPanel(frame), (first, last)
