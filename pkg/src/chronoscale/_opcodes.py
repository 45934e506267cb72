"""Opcode and status constants shared by the expression-program kernels."""

OP_CONST = 0   # push consts[arg]
OP_X = 1       # push the evaluation point
OP_ADD = 2
OP_SUB = 3
OP_MUL = 4
OP_DIV = 5
OP_POW = 6
OP_NEG = 7
OP_EXP = 8
OP_LN = 9
OP_SIN = 10
OP_COS = 11
OP_ABS = 12
OP_SQRT = 13
OP_TAB = 14    # push tabulation #arg linearly interpolated at the point

STATUS_OK = 0
STATUS_NO_CONVERGENCE = 1
STATUS_DOMAIN = 2
STATUS_TAB_GAP = 3

STACK_CAP = 256
