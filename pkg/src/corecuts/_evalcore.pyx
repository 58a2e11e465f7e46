# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled evaluation kernel; mirrors evalcore_py.run_program exactly.

The contract is bit-exact agreement with the pure-Python backend:
identical operation order (left folds, Dot accumulation from 0.0) and
the same zero-denominator abort semantics.
"""


def run_program(const long long[::1] code, const double[::1] consts,
                const double[::1] values, double[::1] stack):
    """Execute one program; returns (ok, value)."""
    cdef Py_ssize_t pc = 0, sp = 0, base, p
    cdef Py_ssize_t length = code.shape[0]
    cdef long long op, n, i
    cdef double acc, den, v
    while pc < length:
        op = code[pc]
        if op == 0:  # CONST
            stack[sp] = consts[code[pc + 1]]
            sp += 1
            pc += 2
        elif op == 1:  # VAR
            stack[sp] = values[code[pc + 1]]
            sp += 1
            pc += 2
        elif op == 2:  # ADD
            n = code[pc + 1]
            base = sp - n
            acc = stack[base]
            for i in range(1, n):
                acc = acc + stack[base + i]
            stack[base] = acc
            sp = base + 1
            pc += 2
        elif op == 3:  # MUL
            n = code[pc + 1]
            base = sp - n
            acc = stack[base]
            for i in range(1, n):
                acc = acc * stack[base + i]
            stack[base] = acc
            sp = base + 1
            pc += 2
        elif op == 4:  # DIV
            den = stack[sp - 1]
            if den == 0.0:
                return False, 0.0
            stack[sp - 2] = stack[sp - 2] / den
            sp -= 1
            pc += 1
        elif op == 5:  # SQUARE
            v = stack[sp - 1]
            stack[sp - 1] = v * v
            pc += 1
        elif op == 6:  # DOT
            n = code[pc + 1]
            acc = 0.0
            p = pc + 2
            for i in range(n):
                acc = acc + consts[code[p]] * values[code[p + 1]]
                p += 2
            stack[sp] = acc
            sp += 1
            pc = p
        else:
            raise ValueError(f"bad opcode {op}")
    return True, stack[0]
