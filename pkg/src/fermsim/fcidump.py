"""FCIDUMP electron-integral files.

The accepted dialect: a namelist header opened by &FCI carrying NORB, NELEC
and MS2 (ORBSYM, ISYM and any other keys are tolerated and ignored),
terminated by &END or a bare slash, followed by one record per line of
exactly five fields `value i j k l` with 1-based orbital indices in chemist
notation. Fortran D exponents are understood. A record with k = l = 0 sets a
one-body element, all-zero indices set the scalar constant, anything else
sets a two-body element together with its eight symmetric images.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import TextIO

import numpy as np

from .operators import MolecularHamiltonian

SYMMETRY_TOL = 1e-8


class FcidumpError(ValueError):
    """Malformed FCIDUMP content; the message carries a line number."""


@dataclass(frozen=True)
class FcidumpResult:
    """Parsed Hamiltonian plus the header's electron count and 2*S_z."""

    hamiltonian: MolecularHamiltonian
    nelec: int
    ms2: int

    @property
    def nalpha(self) -> int:
        return (self.nelec + self.ms2) // 2

    @property
    def nbeta(self) -> int:
        return (self.nelec - self.ms2) // 2


_KEY_VALUE = re.compile(
    r"([A-Za-z][A-Za-z0-9_]*)\s*=\s*([^=]*?)(?=[A-Za-z][A-Za-z0-9_]*\s*=|$)",
    re.DOTALL,
)


def _header_int(fields: dict, key: str, end_line: int) -> int:
    if key not in fields:
        raise FcidumpError(f"line {end_line}: header is missing {key}")
    raw = fields[key].replace(",", " ").split()
    if len(raw) != 1:
        raise FcidumpError(f"line {end_line}: {key} must be a single integer")
    try:
        return int(raw[0])
    except ValueError:
        raise FcidumpError(f"line {end_line}: {key}={raw[0]!r} is not an integer")


def _parse_header(line_iter) -> tuple[dict, int]:
    """Collect namelist text up to &END or /, returning fields and end line."""
    chunks = []
    end_line = 0
    terminated = False
    for lineno, line in line_iter:
        end_line = lineno
        text = line.strip()
        if lineno == 1:
            if not text.upper().startswith("&FCI"):
                raise FcidumpError("line 1: expected a namelist starting with &FCI")
            text = text[4:]
        upper = text.upper()
        if "&END" in upper:
            chunks.append(text[: upper.index("&END")])
            terminated = True
            break
        if text == "/" or text.endswith("/"):
            chunks.append(text[:-1] if text.endswith("/") else "")
            terminated = True
            break
        chunks.append(text)
    if not terminated:
        raise FcidumpError(f"line {end_line}: header never terminated by &END or /")
    merged = " ".join(chunks)
    fields = {key.upper(): value for key, value in _KEY_VALUE.findall(merged)}
    return fields, end_line


def _to_stream(source) -> TextIO:
    if isinstance(source, (str, Path)):
        return open(source, "r", encoding="ascii")
    return source


def parse_fcidump(source) -> FcidumpResult:
    """Read a molecular Hamiltonian from a path or text stream."""
    stream = _to_stream(source)
    try:
        line_iter = enumerate(stream, start=1)
        fields, header_end = _parse_header(line_iter)
        norb = _header_int(fields, "NORB", header_end)
        nelec = _header_int(fields, "NELEC", header_end)
        ms2 = _header_int(fields, "MS2", header_end)
        if norb < 1:
            raise FcidumpError(f"NORB must be >= 1, got {norb}")
        one = np.zeros((norb, norb))
        two = np.zeros((norb, norb, norb, norb))
        constant = 0.0
        for lineno, line in line_iter:
            text = line.strip()
            if not text:
                continue
            parts = text.replace("D", "E").replace("d", "e").split()
            if len(parts) != 5:
                raise FcidumpError(
                    f"line {lineno}: expected `value i j k l`, got {len(parts)} fields"
                )
            try:
                value = float(parts[0])
                i, j, k, l = (int(p) for p in parts[1:])
            except ValueError:
                raise FcidumpError(f"line {lineno}: non-numeric field in {text!r}")
            for name, idx in (("i", i), ("j", j), ("k", k), ("l", l)):
                if idx < 0 or idx > norb:
                    raise FcidumpError(
                        f"line {lineno}: index {name}={idx} outside [0, NORB={norb}]"
                    )
            if i == j == k == l == 0:
                constant = value
            elif k == 0 and l == 0:
                if i == 0 or j == 0:
                    raise FcidumpError(
                        f"line {lineno}: one-body record needs i, j > 0"
                    )
                one[i - 1, j - 1] = value
                one[j - 1, i - 1] = value
            elif min(i, j, k, l) == 0:
                raise FcidumpError(
                    f"line {lineno}: invalid index pattern ({i} {j} {k} {l})"
                )
            else:
                p, q, r, s = i - 1, j - 1, k - 1, l - 1
                for a, b in ((p, q), (q, p)):
                    for c, d in ((r, s), (s, r)):
                        two[a, b, c, d] = value
                        two[c, d, a, b] = value
        ham = MolecularHamiltonian(one, two, constant)
        return FcidumpResult(ham, nelec, ms2)
    finally:
        if stream is not source:
            stream.close()


def _canonical_two_body_indices(norb: int):
    """One representative (p, q, r, s) per 8-fold symmetry orbit."""
    for p in range(norb):
        for q in range(p + 1):
            pq = p * (p + 1) // 2 + q
            for r in range(p + 1):
                for s in range(r + 1):
                    if r * (r + 1) // 2 + s <= pq:
                        yield p, q, r, s


def write_fcidump(dest, ham: MolecularHamiltonian, nelec: int, ms2: int) -> None:
    """Write a Hamiltonian with real 8-fold-symmetric integrals to FCIDUMP."""
    one = ham.one_body
    two = ham.two_body
    if np.max(np.abs(one.imag)) > SYMMETRY_TOL or np.max(
        np.abs(one - one.T.conj())
    ) > SYMMETRY_TOL:
        raise FcidumpError("one-body tensor must be real symmetric")
    real = two.real
    if (
        np.max(np.abs(two.imag)) > SYMMETRY_TOL
        or np.max(np.abs(real - real.transpose(1, 0, 2, 3))) > SYMMETRY_TOL
        or np.max(np.abs(real - real.transpose(0, 1, 3, 2))) > SYMMETRY_TOL
        or np.max(np.abs(real - real.transpose(2, 3, 0, 1))) > SYMMETRY_TOL
    ):
        raise FcidumpError("two-body tensor lacks the real 8-fold symmetry")
    norb = ham.norb
    lines = [f"&FCI NORB={norb},NELEC={nelec},MS2={ms2},", "&END"]
    for p, q, r, s in _canonical_two_body_indices(norb):
        value = real[p, q, r, s]
        if value != 0.0:
            lines.append(f"{value:.17g} {p + 1} {q + 1} {r + 1} {s + 1}")
    for p in range(norb):
        for q in range(p + 1):
            value = one[p, q].real
            if value != 0.0:
                lines.append(f"{value:.17g} {p + 1} {q + 1} 0 0")
    if ham.constant != 0.0:
        lines.append(f"{ham.constant:.17g} 0 0 0 0")
    text = "\n".join(lines) + "\n"
    if isinstance(dest, (str, Path)):
        Path(dest).write_text(text, encoding="ascii")
    else:
        dest.write(text)
