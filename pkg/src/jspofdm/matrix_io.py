"""Plain-text matrix format used to pass precoders between runs.

Layout::

    # optional comment lines
    <rows> <cols>
    <row 0 values separated by spaces>
    ...

Values are written with 17 significant digits so a save/load round trip is
exact for float64.
"""

import numpy as np


def format_matrix(A, comment: str = "") -> str:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    lines = [f"# {line}" for line in comment.splitlines()]
    lines.append(f"{A.shape[0]} {A.shape[1]}")
    lines += [" ".join(f"{v:.17g}" for v in row) for row in A]
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> np.ndarray:
    rows = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows:
        raise ValueError("empty matrix file")
    header = rows[0].split()
    if len(header) != 2:
        raise ValueError(f"bad dimension header {rows[0]!r}")
    m, n = int(header[0]), int(header[1])
    values = np.array(" ".join(rows[1:]).split(), dtype=float)
    if values.size != m * n:
        raise ValueError(f"header says {m}x{n} but {values.size} values follow")
    return values.reshape(m, n)


def save_matrix(path, A, comment: str = "") -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(format_matrix(A, comment))


def load_matrix(path) -> np.ndarray:
    with open(path, encoding="ascii") as fh:
        return parse_matrix(fh.read())
