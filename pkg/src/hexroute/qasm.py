"""OpenQASM 2.0 subset: parser and emitter.

Supported statements: the version header, `include "qelib1.inc";` (a no-op),
one `qreg`, an optional `creg`, gate applications over
h,x,y,z,s,sdg,t,tdg,rx,ry,rz,u3,cx,cz,swap, plus `measure` and `barrier`.
Parameter expressions allow numeric literals, `pi`, + - * /, unary minus
and parentheses, folded to floats at parse time.

Not supported (out of scope): `gate` definitions, `if`, `opaque`, OpenQASM 3.
"""
from __future__ import annotations

import math

from .circuit import Gate, GateKind, QuantumCircuit


class QasmError(ValueError):
    """Parse failure with 1-based source position."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


_GATES = {
    "h": (GateKind.H, 1, 0),
    "x": (GateKind.X, 1, 0),
    "y": (GateKind.Y, 1, 0),
    "z": (GateKind.Z, 1, 0),
    "s": (GateKind.S, 1, 0),
    "sdg": (GateKind.SDG, 1, 0),
    "t": (GateKind.T, 1, 0),
    "tdg": (GateKind.TDG, 1, 0),
    "rx": (GateKind.RX, 1, 1),
    "ry": (GateKind.RY, 1, 1),
    "rz": (GateKind.RZ, 1, 1),
    "u3": (GateKind.U3, 1, 3),
    "cx": (GateKind.CNOT, 2, 0),
    "cz": (GateKind.CZ, 2, 0),
    "swap": (GateKind.SWAP, 2, 0),
}

_SYMBOLS = (";", ",", "(", ")", "[", "]", "+", "-", "*", "/", "->")


class _Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind, self.text, self.line, self.col = kind, text, line, col


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    line, col, i = 1, 1, 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        if c == '"':
            j = text.find('"', i + 1)
            if j < 0:
                raise QasmError("unterminated string", line, col)
            tokens.append(_Token("string", text[i + 1 : j], line, col))
            col += j + 1 - i
            i = j + 1
            continue
        if text.startswith("->", i):
            tokens.append(_Token("->", "->", line, col))
            i += 2
            col += 2
            continue
        if c in ";,()[]+-*/":
            tokens.append(_Token(c, c, line, col))
            i += 1
            col += 1
            continue
        if c.isdigit() or (c == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            seen_e = False
            while j < n and (
                text[j].isdigit()
                or text[j] == "."
                or text[j] in "eE"
                or (seen_e and text[j] in "+-" and text[j - 1] in "eE")
            ):
                if text[j] in "eE":
                    seen_e = True
                j += 1
            tokens.append(_Token("number", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("ident", text[i:j], line, col))
            col += j - i
            i = j
            continue
        raise QasmError(f"unexpected character {c!r}", line, col)
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.pos = 0
        self.qreg: tuple[str, int] | None = None
        self.creg: tuple[str, int] | None = None
        self.gates: list[Gate] = []

    def peek(self) -> _Token:
        return self.toks[self.pos]

    def next(self) -> _Token:
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, what: str | None = None) -> _Token:
        tok = self.next()
        if tok.kind != kind:
            raise QasmError(f"expected {what or kind}, found {tok.text!r}", tok.line, tok.col)
        return tok

    def error(self, message: str, tok: _Token | None = None):
        tok = tok or self.peek()
        raise QasmError(message, tok.line, tok.col)

    # ---- statements -------------------------------------------------

    def parse(self) -> QuantumCircuit:
        head = self.expect("ident", "OPENQASM header")
        if head.text != "OPENQASM":
            self.error("file must start with OPENQASM 2.0", head)
        ver = self.expect("number", "version")
        if ver.text != "2.0":
            self.error(f"unsupported OPENQASM version {ver.text}", ver)
        self.expect(";")
        while self.peek().kind != "eof":
            self.statement()
        if self.qreg is None:
            self.error("no quantum register declared")
        _, nq = self.qreg
        ncl = self.creg[1] if self.creg else 0
        return QuantumCircuit(nq, tuple(self.gates), ncl)

    def statement(self) -> None:
        tok = self.next()
        if tok.kind != "ident":
            self.error(f"expected statement, found {tok.text!r}", tok)
        name = tok.text
        if name == "include":
            self.expect("string", "include file name")
            self.expect(";")
        elif name in ("qreg", "creg"):
            self.register(name, tok)
        elif name == "measure":
            self.measure_stmt(tok)
        elif name == "barrier":
            self.barrier_stmt(tok)
        elif name in _GATES:
            self.gate_stmt(name, tok)
        else:
            self.error(f"unknown gate or statement {name!r}", tok)

    def register(self, which: str, at: _Token) -> None:
        name = self.expect("ident", "register name").text
        self.expect("[")
        size_tok = self.expect("number", "register size")
        try:
            size = int(size_tok.text)
        except ValueError:
            self.error("register size must be an integer", size_tok)
        self.expect("]")
        self.expect(";")
        if size < 1:
            self.error("register size must be positive", size_tok)
        if which == "qreg":
            if self.qreg is not None:
                self.error("only one quantum register is supported", at)
            self.qreg = (name, size)
        else:
            if self.creg is not None:
                self.error("only one classical register is supported", at)
            self.creg = (name, size)

    def operand(self, which: str) -> tuple[str, int | None]:
        """A register reference: `name[i]` or bare `name` (whole register)."""
        name_tok = self.expect("ident", f"{which} operand")
        reg = self.qreg if which == "qubit" else self.creg
        if reg is None or name_tok.text != reg[0]:
            self.error(f"undeclared register {name_tok.text!r}", name_tok)
        if self.peek().kind != "[":
            return name_tok.text, None
        self.expect("[")
        idx_tok = self.expect("number", "index")
        try:
            idx = int(idx_tok.text)
        except ValueError:
            self.error("index must be an integer", idx_tok)
        self.expect("]")
        if not 0 <= idx < reg[1]:
            self.error(f"{which} index {idx} out of range for {reg[0]}[{reg[1]}]", idx_tok)
        return name_tok.text, idx

    def gate_stmt(self, name: str, at: _Token) -> None:
        kind, nq, nparams = _GATES[name]
        params: tuple[float, ...] = ()
        if self.peek().kind == "(":
            self.next()
            vals = [self.expr()]
            while self.peek().kind == ",":
                self.next()
                vals.append(self.expr())
            self.expect(")")
            params = tuple(vals)
        if len(params) != nparams:
            self.error(f"{name} takes {nparams} parameter(s), got {len(params)}", at)
        operands = [self.operand("qubit")]
        while self.peek().kind == ",":
            self.next()
            operands.append(self.operand("qubit"))
        self.expect(";")
        idxs = [i for _, i in operands]
        if nq == 1 and len(idxs) == 1 and idxs[0] is None:
            # whole-register broadcast, e.g. `h q;`
            for q in range(self.qreg[1]):
                self.gates.append(Gate(kind, (q,), params))
            return
        if len(idxs) != nq or any(i is None for i in idxs):
            self.error(f"{name} needs {nq} indexed qubit operand(s)", at)
        if len(set(idxs)) != len(idxs):
            self.error(f"{name} operands must be distinct qubits", at)
        self.gates.append(Gate(kind, tuple(idxs), params))

    def measure_stmt(self, at: _Token) -> None:
        _, qi = self.operand("qubit")
        self.expect("->")
        if self.creg is None:
            self.error("measure requires a classical register", at)
        _, ci = self.operand("clbit")
        self.expect(";")
        if (qi is None) != (ci is None):
            self.error("measure operands must both be indexed or both whole registers", at)
        if qi is None:
            if self.qreg[1] > self.creg[1]:
                self.error("classical register too small for whole-register measure", at)
            for q in range(self.qreg[1]):
                self.gates.append(Gate(GateKind.MEASURE, (q,), clbit=q))
        else:
            self.gates.append(Gate(GateKind.MEASURE, (qi,), clbit=ci))

    def barrier_stmt(self, at: _Token) -> None:
        operands = [self.operand("qubit")]
        while self.peek().kind == ",":
            self.next()
            operands.append(self.operand("qubit"))
        self.expect(";")
        qubits: list[int] = []
        for _, i in operands:
            if i is None:
                qubits.extend(range(self.qreg[1]))
            else:
                qubits.append(i)
        # Gate arity caps barriers at 2 qubits; wider fences become runs of
        # single-qubit barriers, which layering treats as one fence each.
        if len(qubits) == 2 and qubits[0] != qubits[1]:
            self.gates.append(Gate(GateKind.BARRIER, tuple(qubits)))
        else:
            for q in qubits:
                self.gates.append(Gate(GateKind.BARRIER, (q,)))

    # ---- parameter expressions --------------------------------------

    def expr(self) -> float:
        val = self.term()
        while self.peek().kind in ("+", "-"):
            op = self.next().kind
            rhs = self.term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def term(self) -> float:
        val = self.factor()
        while self.peek().kind in ("*", "/"):
            op = self.next()
            rhs = self.factor()
            if op.kind == "/":
                if rhs == 0:
                    self.error("division by zero in parameter", op)
                val = val / rhs
            else:
                val = val * rhs
        return val

    def factor(self) -> float:
        tok = self.next()
        if tok.kind == "-":
            return -self.factor()
        if tok.kind == "number":
            try:
                return float(tok.text)
            except ValueError:
                self.error(f"malformed number {tok.text!r}", tok)
        if tok.kind == "ident" and tok.text == "pi":
            return math.pi
        if tok.kind == "(":
            val = self.expr()
            self.expect(")")
            return val
        self.error(f"malformed parameter expression at {tok.text!r}", tok)


def parse_qasm(text: str) -> QuantumCircuit:
    """Parse OpenQASM 2.0 source into a QuantumCircuit."""
    return _Parser(text).parse()


def emit_qasm(circuit: QuantumCircuit) -> str:
    """Emit OpenQASM 2.0 such that parse_qasm(emit_qasm(c)) == c.

    Angles use repr(), which round-trips doubles exactly.
    """
    lines = ['OPENQASM 2.0;', 'include "qelib1.inc";', f"qreg q[{circuit.num_qubits}];"]
    if circuit.num_clbits:
        lines.append(f"creg c[{circuit.num_clbits}];")
    for g in circuit.gates:
        if g.kind is GateKind.MEASURE:
            lines.append(f"measure q[{g.qubits[0]}] -> c[{g.clbit}];")
            continue
        name = g.kind.value
        params = f"({','.join(repr(p) for p in g.params)})" if g.params else ""
        args = ",".join(f"q[{q}]" for q in g.qubits)
        lines.append(f"{name}{params} {args};")
    return "\n".join(lines) + "\n"
