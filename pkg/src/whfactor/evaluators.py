"""Closed-form matrix functions built from rational terms with exponential phases.

Each matrix entry is a finite sum of terms P(x)/Q(x) * exp(i*a*x) with complex
polynomial coefficients. The family is closed under addition, negation, matrix
products and multiplication by integer powers of the Moebius factor
(x-i)/(x+i), which is all the factorization algebra needs. Instances are
callables mapping an array of points (real or complex) to stacked matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly


def _as_poly(coeffs) -> tuple:
    """Normalize ascending coefficients: complex tuple, trailing zeros stripped."""
    c = [complex(v) for v in coeffs]
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    if not c:
        c = [0j]
    return tuple(c)


@dataclass(frozen=True)
class Term:
    """One summand P(x)/Q(x) * exp(i*phase*x), coefficients ascending."""

    num: tuple
    den: tuple = (1 + 0j,)
    phase: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "num", _as_poly(self.num))
        object.__setattr__(self, "den", _as_poly(self.den))
        object.__setattr__(self, "phase", float(self.phase))
        if all(v == 0 for v in self.den):
            raise ValueError("term denominator is identically zero")

    def scaled(self, c) -> "Term":
        return Term(tuple(v * c for v in self.num), self.den, self.phase)

    def times(self, other: "Term") -> "Term":
        return Term(
            tuple(npoly.polymul(self.num, other.num)),
            tuple(npoly.polymul(self.den, other.den)),
            self.phase + other.phase,
        )

    def __call__(self, z):
        z = np.asarray(z)
        val = npoly.polyval(z, self.num) / npoly.polyval(z, self.den)
        if self.phase != 0.0:
            val = val * np.exp(1j * self.phase * z)
        return val


def _merge_terms(terms: Sequence[Term]) -> tuple:
    """Combine terms sharing (denominator, phase); drop exact-zero numerators."""
    out: dict = {}
    for t in terms:
        key = (t.den, t.phase)
        if key in out:
            out[key] = tuple(npoly.polyadd(out[key], t.num))
        else:
            out[key] = t.num
    merged = []
    for (den, phase), num in out.items():
        num = _as_poly(num)
        if num == (0j,):
            continue
        merged.append(Term(num, den, phase))
    return tuple(merged)


class ClosedForm:
    """Matrix of term sums, evaluable at arbitrary points.

    entries[i][j] is a tuple of Term. Calling an instance with an array z of
    shape S returns an array of shape S + (n, m).
    """

    def __init__(self, entries):
        rows = []
        for row in entries:
            rows.append(tuple(_merge_terms(tuple(cell)) for cell in row))
        self.entries = tuple(rows)
        n = len(self.entries)
        m = len(self.entries[0]) if n else 0
        if n == 0 or m == 0:
            raise ValueError("entry table must be non-empty")
        if any(len(r) != m for r in self.entries):
            raise ValueError("ragged entry table")
        self.shape = (n, m)

    # -- construction helpers -------------------------------------------------

    @classmethod
    def zeros(cls, n: int, m: int | None = None) -> "ClosedForm":
        m = n if m is None else m
        return cls([[() for _ in range(m)] for _ in range(n)])

    @classmethod
    def constant(cls, mat) -> "ClosedForm":
        mat = np.asarray(mat, dtype=complex)
        return cls(
            [
                [(Term((mat[i, j],)),) if mat[i, j] != 0 else () for j in range(mat.shape[1])]
                for i in range(mat.shape[0])
            ]
        )

    @classmethod
    def identity(cls, n: int) -> "ClosedForm":
        return cls.constant(np.eye(n))

    @classmethod
    def mobius_power_diag(cls, kappas) -> "ClosedForm":
        """diag(((x-i)/(x+i))**kappa_j); negative powers swap the two factors."""
        kappas = [int(k) for k in kappas]
        n = len(kappas)
        table = [[() for _ in range(n)] for _ in range(n)]
        minus = (-1j, 1.0)  # x - i
        plus = (1j, 1.0)  # x + i
        for j, k in enumerate(kappas):
            if k == 0:
                table[j][j] = (Term((1,)),)
            elif k > 0:
                table[j][j] = (Term(tuple(npoly.polypow(minus, k)), tuple(npoly.polypow(plus, k))),)
            else:
                table[j][j] = (Term(tuple(npoly.polypow(plus, -k)), tuple(npoly.polypow(minus, -k))),)
        return cls(table)

    # -- evaluation ------------------------------------------------------------

    def __call__(self, z):
        z = np.asarray(z)
        scalar = z.ndim == 0
        zz = np.atleast_1d(z).astype(complex)
        n, m = self.shape
        out = np.zeros(zz.shape + (n, m), dtype=complex)
        phases = {t.phase for row in self.entries for cell in row for t in cell}
        exps = {a: (np.exp(1j * a * zz) if a != 0.0 else None) for a in phases}
        for i in range(n):
            for j in range(m):
                acc = np.zeros_like(zz)
                for t in self.entries[i][j]:
                    val = npoly.polyval(zz, t.num) / npoly.polyval(zz, t.den)
                    e = exps[t.phase]
                    acc += val * e if e is not None else val
                out[..., i, j] = acc
        return out[0] if scalar else out

    # -- algebra ---------------------------------------------------------------

    def _binary(self, other: "ClosedForm", negate: bool) -> "ClosedForm":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        table = []
        for ra, rb in zip(self.entries, other.entries):
            row = []
            for ca, cb in zip(ra, rb):
                extra = tuple(t.scaled(-1) for t in cb) if negate else cb
                row.append(ca + extra)
            table.append(row)
        return ClosedForm(table)

    def __add__(self, other):
        return self._binary(other, negate=False)

    def __sub__(self, other):
        return self._binary(other, negate=True)

    def __neg__(self):
        return ClosedForm([[tuple(t.scaled(-1) for t in cell) for cell in row] for row in self.entries])

    def __mul__(self, c):
        c = complex(c)
        return ClosedForm([[tuple(t.scaled(c) for t in cell) for cell in row] for row in self.entries])

    __rmul__ = __mul__

    def __matmul__(self, other: "ClosedForm") -> "ClosedForm":
        n, k = self.shape
        k2, m = other.shape
        if k != k2:
            raise ValueError(f"matmul shape mismatch {self.shape} vs {other.shape}")
        table = [[() for _ in range(m)] for _ in range(n)]
        for i in range(n):
            for j in range(m):
                cell = []
                for l in range(k):
                    for ta in self.entries[i][l]:
                        for tb in other.entries[l][j]:
                            cell.append(ta.times(tb))
                table[i][j] = tuple(cell)
        return ClosedForm(table)

    def mobius_scale(self, power: int) -> "ClosedForm":
        """Entry-wise multiplication by ((x-i)/(x+i))**power."""
        power = int(power)
        if power == 0:
            return self
        minus = (-1j, 1.0)
        plus = (1j, 1.0)
        if power > 0:
            fac = Term(tuple(npoly.polypow(minus, power)), tuple(npoly.polypow(plus, power)))
        else:
            fac = Term(tuple(npoly.polypow(plus, -power)), tuple(npoly.polypow(minus, -power)))
        return ClosedForm([[tuple(t.times(fac) for t in cell) for cell in row] for row in self.entries])

    # -- analysis --------------------------------------------------------------

    def limit_at_infinity(self) -> np.ndarray:
        """Limit along the real line, entry-wise.

        Raises if some term does not settle (bounded oscillation or growth).
        """
        n, m = self.shape
        out = np.zeros((n, m), dtype=complex)
        for i in range(n):
            for j in range(m):
                val = 0j
                for t in self.entries[i][j]:
                    dn, dd = len(t.num) - 1, len(t.den) - 1
                    if dn < dd:
                        continue
                    if dn > dd or t.phase != 0.0:
                        raise ValueError(f"entry ({i},{j}) has no limit at infinity")
                    val += t.num[-1] / t.den[-1]
                out[i, j] = val
        return out

    def has_real_pole(self, tol: float = 1e-9) -> bool:
        for row in self.entries:
            for cell in row:
                for t in cell:
                    if len(t.den) == 1:
                        continue
                    roots = npoly.polyroots(t.den)
                    if np.any(np.abs(roots.imag) < tol):
                        return True
        return False

    # -- serialization ---------------------------------------------------------

    def to_dict(self) -> dict:
        def pair(v):
            return [float(v.real), float(v.imag)]

        return {
            "shape": list(self.shape),
            "entries": [
                [
                    [
                        {"num": [pair(v) for v in t.num], "den": [pair(v) for v in t.den], "phase": t.phase}
                        for t in cell
                    ]
                    for cell in row
                ]
                for row in self.entries
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ClosedForm":
        def unpair(v):
            return complex(v[0], v[1])

        entries = []
        for row in data["entries"]:
            out_row = []
            for cell in row:
                out_row.append(
                    tuple(
                        Term(
                            tuple(unpair(v) for v in t["num"]),
                            tuple(unpair(v) for v in t.get("den", [[1.0, 0.0]])),
                            float(t.get("phase", 0.0)),
                        )
                        for t in cell
                    )
                )
            entries.append(out_row)
        cf = cls(entries)
        if "shape" in data and tuple(data["shape"]) != cf.shape:
            raise ValueError("declared shape does not match entry table")
        return cf
