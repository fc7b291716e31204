"""Carrier grids: which normalized frequencies carry data and which are reserved.

Indices are in units of the subcarrier spacing. A grid is immutable; its
``carriers`` array lists every employed carrier (data and reserved) in
ascending order and that order is the row order of every precoder.
"""

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

Side = Literal["double", "single_low", "single_high"]
SIDES = ("double", "single_low", "single_high")


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SubcarrierGrid:
    """Employed carriers of one transmitter.

    Attributes
    ----------
    subbands : tuple of (int, int)
        Inclusive index intervals, ascending and non-overlapping.
    excluded : np.ndarray
        Indices inside the subbands that carry nothing (e.g. DC).
    reserved : np.ndarray
        Edge indices sacrificed for suppression.
    carriers : np.ndarray
        All employed indices (data and reserved), ascending.
    data_positions, reserved_positions : np.ndarray
        Positions of the data / reserved carriers inside ``carriers``.
    """

    subbands: tuple
    excluded: np.ndarray
    reserved: np.ndarray
    carriers: np.ndarray
    data_positions: np.ndarray
    reserved_positions: np.ndarray

    @property
    def M(self) -> int:
        return len(self.carriers)

    @property
    def N(self) -> int:
        return len(self.data_positions)

    @property
    def R(self) -> int:
        return self.M - self.N

    @property
    def data_indices(self) -> np.ndarray:
        return self.carriers[self.data_positions]

    @property
    def band_edges(self) -> tuple:
        """Lowest and highest employed carrier index."""
        return int(self.carriers[0]), int(self.carriers[-1])

    @property
    def band_center(self) -> float:
        lo, hi = self.band_edges
        return 0.5 * (lo + hi)

    def embedding_matrix(self) -> np.ndarray:
        """M x N 0/1 matrix E with ``E @ d == embed_data(d, grid)``."""
        E = np.zeros((self.M, self.N))
        E[self.data_positions, np.arange(self.N)] = 1.0
        return E

    def __eq__(self, other):
        if not isinstance(other, SubcarrierGrid):
            return NotImplemented
        return (self.subbands == other.subbands
                and np.array_equal(self.excluded, other.excluded)
                and np.array_equal(self.reserved, other.reserved)
                and np.array_equal(self.carriers, other.carriers))

    def __hash__(self):
        return hash((self.subbands, self.carriers.tobytes(), self.reserved.tobytes()))

    def __repr__(self):
        return (f"SubcarrierGrid(M={self.M}, N={self.N}, R={self.R}, "
                f"subbands={list(self.subbands)}, reserved={self.reserved.tolist()})")


def _normalize_subbands(subbands):
    bands = []
    for band in subbands:
        lo, hi = (int(v) for v in band)
        if hi < lo:
            raise ValueError(f"subband {band!r} has upper index below lower index")
        bands.append((lo, hi))
    if not bands:
        raise ValueError("at least one subband is required")
    bands.sort()
    for (lo0, hi0), (lo1, hi1) in zip(bands, bands[1:]):
        if lo1 <= hi0:
            raise ValueError(f"overlapping subbands {(lo0, hi0)} and {(lo1, hi1)}")
    return tuple(bands)


def _edge_reservation(indices, r, side):
    """Pick ``r`` edge indices out of an ascending index array."""
    if r == 0:
        return []
    if side == "double":
        half = r // 2
        return list(indices[:half]) + list(indices[len(indices) - half:])
    if side == "single_low":
        return list(indices[:r])
    return list(indices[len(indices) - r:])


def build_grid(n_data: int, r_reserved: int, side: Side = "double",
               subbands: Sequence = None, exclude_dc: bool = True,
               reserve_each_subband: bool = False) -> SubcarrierGrid:
    """Build a carrier grid with reserved carriers at the band edges.

    Parameters
    ----------
    n_data : int
        Number of data carriers N.
    r_reserved : int
        Number of reserved carriers R. With ``reserve_each_subband`` this
        many carriers are reserved at the edges of *each* subband.
    side : {'double', 'single_low', 'single_high'}
        ``double`` puts R/2 carriers at each outer edge; ``single_*`` puts all
        R at the stated edge.
    subbands : sequence of (lo, hi)
        Inclusive index intervals. Defaults to one contiguous band centred
        on DC that holds exactly the requested carriers.
    exclude_dc : bool
        Leave index 0 unused when it falls inside a subband.
    reserve_each_subband : bool
        Apply the edge rule to every subband separately instead of only to
        the outer edges of the union.

    Returns
    -------
    SubcarrierGrid

    Raises
    ------
    ValueError
        Odd R with ``side='double'``, overlapping subbands, or subbands whose
        usable index count differs from the number of requested carriers.
    """
    n_data = int(n_data)
    r_reserved = int(r_reserved)
    if n_data < 1:
        raise ValueError("n_data must be at least 1")
    if r_reserved < 0:
        raise ValueError("r_reserved must be non-negative")
    if side not in SIDES:
        raise ValueError(f"side must be one of {SIDES}, got {side!r}")
    if side == "double" and r_reserved % 2:
        raise ValueError(f"double-side reservation needs an even R, got {r_reserved}")

    if subbands is None:
        total = n_data + r_reserved
        if exclude_dc:
            half = (total + 1) // 2
            subbands = [(-half, -1), (1, total - half)] if total > 1 else [(1, 1)]
        else:
            subbands = [(-(total // 2), total - total // 2 - 1)]
    bands = _normalize_subbands(subbands)

    excluded = set()
    per_band = []
    for lo, hi in bands:
        idx = np.arange(lo, hi + 1)
        if exclude_dc and lo <= 0 <= hi:
            excluded.add(0)
            idx = idx[idx != 0]
        per_band.append(idx)
    carriers = np.concatenate(per_band)

    if reserve_each_subband:
        reserved = []
        for idx in per_band:
            if len(idx) < r_reserved:
                raise ValueError(f"subband with {len(idx)} carriers cannot hold R={r_reserved}")
            reserved += _edge_reservation(idx, r_reserved, side)
    else:
        reserved = _edge_reservation(carriers, r_reserved, side)

    needed = n_data + len(reserved)
    if len(carriers) != needed:
        kind = "too small" if len(carriers) < needed else "too large"
        raise ValueError(
            f"subbands are {kind}: {len(carriers)} usable indices for "
            f"{n_data} data + {len(reserved)} reserved carriers")

    reserved = np.array(sorted(reserved), dtype=int)
    is_reserved = np.isin(carriers, reserved)
    return SubcarrierGrid(
        subbands=bands,
        excluded=_frozen(sorted(excluded), int),
        reserved=_frozen(reserved, int),
        carriers=_frozen(carriers, int),
        data_positions=_frozen(np.flatnonzero(~is_reserved), int),
        reserved_positions=_frozen(np.flatnonzero(is_reserved), int),
    )


def embed_data(d, grid: SubcarrierGrid) -> np.ndarray:
    """Place data symbols on the data carriers and zeros on reserved carriers.

    ``d`` may carry leading batch dimensions; the last axis must have length N.
    """
    d = np.asarray(d)
    if d.shape[-1:] != (grid.N,):
        raise ValueError(f"expected last dimension {grid.N}, got shape {d.shape}")
    out = np.zeros(d.shape[:-1] + (grid.M,), dtype=np.result_type(d.dtype, float))
    out[..., grid.data_positions] = d
    return out


def extract_data(v, grid: SubcarrierGrid) -> np.ndarray:
    """Inverse of :func:`embed_data`; reserved entries are discarded."""
    v = np.asarray(v)
    if v.shape[-1:] != (grid.M,):
        raise ValueError(f"expected last dimension {grid.M}, got shape {v.shape}")
    return v[..., grid.data_positions]
