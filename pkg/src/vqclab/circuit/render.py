"""ASCII rendering of flat circuits, one row per wire.

Columns follow dependency order: a gate lands one column after the
latest column used by any wire it spans (two-qubit gates also block the
wires between control and target, so their vertical connector never
crosses another box).  Measurements occupy the trailing columns as
``<Z>``-style cells.  The layout is deterministic for a given circuit.
"""

from __future__ import annotations

from .ir import FlatCircuit

_CONTROL = "@"
_TARGET = "X"


def render_ascii(fc: FlatCircuit) -> str:
    n = fc.n_qubits
    cells = [dict() for _ in range(n)]  # cells[wire][column] = label
    connectors = set()  # (wire, column) crossed by a vertical link
    busy = [0] * n  # last occupied column per wire, 0 = none yet

    for gate in fc.gates:
        lo, hi = min(gate.wires), max(gate.wires)
        col = 1 + max(busy[w] for w in range(lo, hi + 1))
        if len(gate.wires) == 1:
            cells[gate.wires[0]][col] = gate.kind
        elif gate.kind == "CNOT":
            cells[gate.wires[0]][col] = _CONTROL
            cells[gate.wires[1]][col] = _TARGET
        else:  # CZ
            cells[gate.wires[0]][col] = _CONTROL
            cells[gate.wires[1]][col] = _CONTROL
        for w in range(lo, hi + 1):
            busy[w] = col
            if len(gate.wires) == 2 and w not in gate.wires:
                connectors.add((w, col))

    first_meas_col = max(busy) + 1
    meas_next = [first_meas_col] * n
    for meas in fc.measurements:
        col = meas_next[meas.wire]
        cells[meas.wire][col] = f"<{meas.observable[-1]}>"
        meas_next[meas.wire] = col + 1

    n_cols = max([first_meas_col - 1] + [c - 1 for c in meas_next])
    widths = [0] * (n_cols + 1)
    for w in range(n):
        for col, text in cells[w].items():
            widths[col] = max(widths[col], len(text))

    label_pad = len(f"q{n - 1}: ")
    lines = []
    for w in range(n):
        parts = [f"q{w}: ".ljust(label_pad)]
        for col in range(1, n_cols + 1):
            if widths[col] == 0:
                continue
            if col in cells[w]:
                text, filler = cells[w][col], "-"
            elif (w, col) in connectors:
                text, filler = "|", " "
            else:
                text, filler = "-", "-"
            pad = widths[col] + 2 - len(text)
            left = pad // 2
            parts.append(filler * left + text + filler * (pad - left))
        lines.append("".join(parts).rstrip())
    return "\n".join(lines)
