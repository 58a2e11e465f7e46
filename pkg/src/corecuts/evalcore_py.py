"""Pure-Python evaluation kernel for flattened expression programs.

This is the fallback backend; the compiled Cython kernel in
``_evalcore`` implements exactly the same stack machine.  Both must
produce bit-identical doubles: n-ary operations fold left in push
order, Dot accumulates from 0.0 in index order, and a zero denominator
aborts with ok=False instead of raising.
"""

from __future__ import annotations

OP_CONST = 0
OP_VAR = 1
OP_ADD = 2
OP_MUL = 3
OP_DIV = 4
OP_SQUARE = 5
OP_DOT = 6


def run_program(code, consts, values, stack):
    """Execute one program; returns (ok, value)."""
    pc = 0
    sp = 0
    length = len(code)
    while pc < length:
        op = code[pc]
        if op == OP_CONST:
            stack[sp] = consts[code[pc + 1]]
            sp += 1
            pc += 2
        elif op == OP_VAR:
            stack[sp] = values[code[pc + 1]]
            sp += 1
            pc += 2
        elif op == OP_ADD:
            n = code[pc + 1]
            base = sp - n
            acc = stack[base]
            for i in range(1, n):
                acc = acc + stack[base + i]
            stack[base] = acc
            sp = base + 1
            pc += 2
        elif op == OP_MUL:
            n = code[pc + 1]
            base = sp - n
            acc = stack[base]
            for i in range(1, n):
                acc = acc * stack[base + i]
            stack[base] = acc
            sp = base + 1
            pc += 2
        elif op == OP_DIV:
            den = stack[sp - 1]
            if den == 0.0:
                return False, 0.0
            stack[sp - 2] = stack[sp - 2] / den
            sp -= 1
            pc += 1
        elif op == OP_SQUARE:
            v = stack[sp - 1]
            stack[sp - 1] = v * v
            pc += 1
        elif op == OP_DOT:
            n = code[pc + 1]
            acc = 0.0
            p = pc + 2
            for _ in range(n):
                acc = acc + consts[code[p]] * values[code[p + 1]]
                p += 2
            stack[sp] = acc
            sp += 1
            pc = p
        else:
            raise ValueError(f"bad opcode {op}")
    return True, stack[0]
