"""A small term language for loop identities, and an evaluator over finite loops.

Grammar (whitespace is insignificant)::

    identity := term "=" term
    term     := factor (("*" | "\\" | "/") factor)*      # left-associative
    factor   := atom ("^r" | "^l")*
    atom     := var | "s(" term ")" | "s2(" term ")" | "(" term ")"
    var      := "x" | "y" | "z" | "u" | "v" | "w"

``a\\b`` is left division (the c with a*c = b), ``b/a`` right division,
``t^r`` and ``t^l`` the right and left inverses, ``s``/``s2`` are self-map
slots bound at evaluation time.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Mapping, Union

import numpy as np

from .core import MulOracle
from .errors import BudgetExceeded, ParseError, UnboundSigmaSlot
from .perm import SelfMap

VARIABLES = ("x", "y", "z", "u", "v", "w")
SIGMA_SLOTS = ("s", "s2")
DEFAULT_BUDGET = 10**9
CHUNK = 1 << 18


# -- AST ---------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Const:
    """A fixed element; not part of the surface grammar, used by substitutions."""
    value: int

    def __str__(self):
        return f"#{self.value}"


@dataclass(frozen=True)
class Mul:
    left: "Term"
    right: "Term"

    def __str__(self):
        return f"({self.left}*{self.right})"


@dataclass(frozen=True)
class LDiv:
    left: "Term"
    right: "Term"

    def __str__(self):
        return f"({self.left}\\{self.right})"


@dataclass(frozen=True)
class RDiv:
    left: "Term"
    right: "Term"

    def __str__(self):
        return f"({self.left}/{self.right})"


@dataclass(frozen=True)
class RInv:
    arg: "Term"

    def __str__(self):
        return f"{self.arg}^r"


@dataclass(frozen=True)
class LInv:
    arg: "Term"

    def __str__(self):
        return f"{self.arg}^l"


@dataclass(frozen=True)
class SigmaApp:
    slot: str
    arg: "Term"

    def __str__(self):
        return f"{self.slot}({self.arg})"


Term = Union[Var, Const, Mul, LDiv, RDiv, RInv, LInv, SigmaApp]


@dataclass(frozen=True)
class IdentityAst:
    lhs: Term
    rhs: Term

    def variables(self) -> tuple[str, ...]:
        found = set(_vars(self.lhs)) | set(_vars(self.rhs))
        return tuple(v for v in VARIABLES if v in found)

    def slots(self) -> tuple[str, ...]:
        found = set(_slots(self.lhs)) | set(_slots(self.rhs))
        return tuple(s for s in SIGMA_SLOTS if s in found)

    def __str__(self):
        return f"{self.lhs} = {self.rhs}"


def _children(t: Term) -> tuple:
    if isinstance(t, (Mul, LDiv, RDiv)):
        return (t.left, t.right)
    if isinstance(t, (RInv, LInv, SigmaApp)):
        return (t.arg,)
    return ()


def _vars(t: Term):
    if isinstance(t, Var):
        yield t.name
    for c in _children(t):
        yield from _vars(c)


def _slots(t: Term):
    if isinstance(t, SigmaApp):
        yield t.slot
    for c in _children(t):
        yield from _slots(c)


def substitute_sigma(t, slot: str, fn: Callable[[Term], Term]):
    """Replace every ``slot(arg)`` by ``fn(arg)``, innermost first."""
    if isinstance(t, IdentityAst):
        return IdentityAst(substitute_sigma(t.lhs, slot, fn), substitute_sigma(t.rhs, slot, fn))
    if isinstance(t, (Mul, LDiv, RDiv)):
        return type(t)(substitute_sigma(t.left, slot, fn), substitute_sigma(t.right, slot, fn))
    if isinstance(t, (RInv, LInv)):
        return type(t)(substitute_sigma(t.arg, slot, fn))
    if isinstance(t, SigmaApp):
        inner = substitute_sigma(t.arg, slot, fn)
        return fn(inner) if t.slot == slot else SigmaApp(t.slot, inner)
    return t


# -- parser ------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def fail(self, message: str, expected):
        self.skip()
        raise ParseError(message, self.pos, tuple(expected))

    def identity(self) -> IdentityAst:
        lhs = self.term()
        if self.peek() != "=":
            self.fail("unbalanced parenthesis" if self.peek() == ")" else "expected '='",
                      ("=", "*", "\\", "/", "^r", "^l"))
        self.pos += 1
        rhs = self.term()
        if self.peek():
            self.fail(f"unexpected {self.peek()!r}", ("*", "\\", "/", "^r", "^l", "end of input"))
        return IdentityAst(lhs, rhs)

    def term(self) -> Term:
        t = self.factor()
        ops = {"*": Mul, "\\": LDiv, "/": RDiv}
        while self.peek() in ops:
            op = ops[self.peek()]
            self.pos += 1
            t = op(t, self.factor())
        return t

    def factor(self) -> Term:
        t = self.atom()
        while self.peek() == "^":
            self.pos += 1
            c = self.text[self.pos] if self.pos < len(self.text) else ""
            if c == "r":
                t = RInv(t)
            elif c == "l":
                t = LInv(t)
            else:
                self.fail("bad inverse suffix", ("^r", "^l"))
            self.pos += 1
        return t

    def atom(self) -> Term:
        c = self.peek()
        atoms = ("x", "y", "z", "u", "v", "w", "s(", "s2(", "(")
        if c == "(":
            self.pos += 1
            t = self.term()
            if self.peek() != ")":
                self.fail("unbalanced parenthesis", (")", "*", "\\", "/", "^r", "^l"))
            self.pos += 1
            return t
        if c == "s":
            for slot in ("s2", "s"):
                if self.text.startswith(slot + "(", self.pos):
                    self.pos += len(slot) + 1
                    t = self.term()
                    if self.peek() != ")":
                        self.fail("unbalanced parenthesis", (")", "*", "\\", "/", "^r", "^l"))
                    self.pos += 1
                    return SigmaApp(slot, t)
            self.fail("expected '(' after sigma slot", ("s(", "s2("))
        if c and c in VARIABLES:
            self.pos += 1
            return Var(c)
        if not c:
            self.fail("unexpected end of input", atoms)
        self.fail(f"unexpected {c!r}", atoms)


def parse_identity(text: str) -> IdentityAst:
    return _Parser(text).identity()


def parse_system(text: str) -> list[IdentityAst]:
    """One or more identities separated by ';' (all must hold)."""
    parts = text.split(";")
    out = []
    offset = 0
    for part in parts:
        try:
            out.append(parse_identity(part))
        except ParseError as exc:
            raise ParseError(str(exc).split(" at position")[0], exc.position + offset,
                             exc.expected) from None
        offset += len(part) + 1
    return out


# -- catalog -----------------------------------------------------------------

_CATALOG = (
    ("right-bol", "((x*y)*z)*y = x*((y*z)*y)", "right Bol law"),
    ("left-bol", "y*(z*(y*x)) = (y*(z*y))*x", "left Bol law"),
    ("moufang", "(x*y)*(z*x) = (x*(y*z))*x", "Moufang law"),
    ("rip", "(y*x)*x^r = y", "right inverse property"),
    ("lip", "x^l*(x*y) = y", "left inverse property"),
    ("aip", "(x*y)^r = x^r*y^r", "automorphic inverse property"),
    ("gen-right-bol", "((x*y)*z)*s(y) = x*((y*z)*s(y))", "generalized right Bol law"),
    ("gen-left-bol", "s(y)*(z*(y*x)) = (s(y)*(z*y))*x", "generalized left Bol law"),
    ("m-loop", "(x*y)*(z*s(x)) = (x*(y*z))*s(x)", "M-loop law"),
    ("sigma-flexible", "(x*y)*s(x) = x*(y*s(x))", "sigma-flexibility (bind s to sigma after delta)"),
    ("bruck-condition", "((x*y)*z)*y = x*((y*z)*y) ; (x*y)^r = x^r*y^r",
     "right Bol together with the automorphic inverse property"),
    ("associative", "(x*y)*z = x*(y*z)", "associativity"),
    ("commutative", "x*y = y*x", "commutativity"),
    ("flexible", "(x*y)*x = x*(y*x)", "flexibility"),
)


def catalog() -> list[tuple[str, str, str]]:
    return list(_CATALOG)


def lookup(name: str) -> str:
    for key, text, _ in _CATALOG:
        if key == name:
            return text
    raise KeyError(f"unknown identity {name!r}; known: {', '.join(k for k, _, _ in _CATALOG)}")


# -- evaluation --------------------------------------------------------------

@dataclass(frozen=True)
class Exhaustive:
    def __str__(self):
        return "exhaustive"


@dataclass(frozen=True)
class Sampled:
    count: int
    seed: int

    def __str__(self):
        return f"sample:{self.count}:{self.seed}"


@dataclass(frozen=True)
class Scan:
    """The first ``count`` assignments in lexicographic order."""
    count: int

    def __str__(self):
        return f"scan:{self.count}"


Mode = Union[Exhaustive, Sampled, Scan]


def parse_mode(text: str) -> Mode:
    if text == "exhaustive":
        return Exhaustive()
    parts = text.split(":")
    if len(parts) == 3 and parts[0] == "sample":
        count, seed = int(parts[1]), int(parts[2])
        if count <= 0:
            raise ValueError("sample count must be positive")
        return Sampled(count, seed)
    if len(parts) == 2 and parts[0] == "scan":
        count = int(parts[1])
        if count <= 0:
            raise ValueError("scan count must be positive")
        return Scan(count)
    raise ValueError(f"bad mode {text!r}; use exhaustive, scan:COUNT or sample:COUNT:SEED")


@dataclass
class CheckResult:
    holds: bool
    witness: dict[str, int] | None
    assignments_checked: int
    mode: str
    seed: int | None = None
    count: int | None = None
    values: tuple[int, int] | None = None
    name: str = ""

    def to_record(self) -> dict:
        rec = {"name": self.name, "holds": self.holds}
        if self.witness is not None:
            rec["witness"] = dict(self.witness)
            rec["values"] = list(self.values) if self.values else None
        rec["assignments"] = self.assignments_checked
        rec["mode"] = self.mode
        if self.seed is not None:
            rec["seed"] = self.seed
        return rec


def _compile(t: Term, L: MulOracle, maps: Mapping[str, np.ndarray]):
    if isinstance(t, Var):
        name = t.name
        return lambda env: env[name]
    if isinstance(t, Const):
        val = t.value
        return lambda env: np.full(env["#size"], val, dtype=np.int64)
    if isinstance(t, (Mul, LDiv, RDiv)):
        a, b = _compile(t.left, L, maps), _compile(t.right, L, maps)
        if isinstance(t, Mul):
            return lambda env: L._mul(a(env), b(env))
        if isinstance(t, LDiv):
            return lambda env: L._ldiv(a(env), b(env))
        return lambda env: L._rdiv(a(env), b(env))
    if isinstance(t, RInv):
        a = _compile(t.arg, L, maps)
        return lambda env: L.right_inverse(a(env))
    if isinstance(t, LInv):
        a = _compile(t.arg, L, maps)
        return lambda env: L.left_inverse(a(env))
    if isinstance(t, SigmaApp):
        if t.slot not in maps:
            raise UnboundSigmaSlot(f"sigma slot {t.slot!r} is not bound")
        table = maps[t.slot]
        a = _compile(t.arg, L, maps)
        return lambda env: table[a(env)]
    raise TypeError(f"not a term: {t!r}")


def _sigma_arrays(L: MulOracle, ast: IdentityAst, sigma) -> dict[str, np.ndarray]:
    sigma = dict(sigma or {})
    maps = {}
    for slot in ast.slots():
        if slot not in sigma or sigma[slot] is None:
            raise UnboundSigmaSlot(f"sigma slot {slot!r} is not bound")
        m = sigma[slot]
        arr = np.asarray(m.images if isinstance(m, SelfMap) else m, dtype=np.int64)
        if arr.shape != (L.order,):
            raise UnboundSigmaSlot(f"sigma slot {slot!r} has {arr.shape[0]} images, loop order {L.order}")
        maps[slot] = arr
    return maps


def evaluate_term(L: MulOracle, t: Term, env: Mapping[str, int], sigma=None) -> int:
    maps = {k: np.asarray(v.images if isinstance(v, SelfMap) else v, dtype=np.int64)
            for k, v in (sigma or {}).items() if v is not None}
    fn = _compile(t, L, maps)
    arr_env = {k: np.array([v], dtype=np.int64) for k, v in env.items()}
    arr_env["#size"] = 1
    return int(fn(arr_env)[0])


def eval_identity(L: MulOracle, ast: IdentityAst, sigma_bindings=None,
                  mode: Mode | str = Exhaustive(), budget: int = DEFAULT_BUDGET,
                  workers: int = 1, name: str = "") -> CheckResult:
    """Check ``ast`` over every (or a seeded sample of) variable assignment.

    The witness on failure is the first falsifying assignment in lexicographic
    order (exhaustive, scan) or in draw order (sampled), whatever ``workers`` is.
    """
    if isinstance(mode, str):
        mode = parse_mode(mode)
    maps = _sigma_arrays(L, ast, sigma_bindings)
    lhs = _compile(ast.lhs, L, maps)
    rhs = _compile(ast.rhs, L, maps)
    names = ast.variables()
    k = len(names)
    n = L.order

    def check(block: np.ndarray):
        env = {v: block[i] for i, v in enumerate(names)}
        env["#size"] = block.shape[1]
        a, b = lhs(env), rhs(env)
        bad = np.nonzero(np.asarray(a) != np.asarray(b))[0]
        if bad.size:
            j = int(bad[0])
            return j, int(np.asarray(a)[j]), int(np.asarray(b)[j])
        return None

    if isinstance(mode, (Exhaustive, Scan)):
        total = n ** k if isinstance(mode, Exhaustive) else min(n ** k, mode.count)
        label = str(mode).split(":")[0]
        if total > budget:
            raise BudgetExceeded(
                f"{total} assignments exceed the budget of {budget}; use sample:COUNT:SEED")
        weights = np.array([n ** (k - 1 - i) for i in range(k)], dtype=np.int64)

        def block_at(start: int):
            idx = np.arange(start, min(start + CHUNK, total), dtype=np.int64)
            return (idx[None, :] // weights[:, None]) % n

        def job(start):
            return start, check(block_at(start))

        starts = range(0, total, CHUNK)
        hit = _first_hit(job, starts, workers)
        if hit is None:
            return CheckResult(True, None, total, label, name=name)
        start, (j, a, b) = hit
        pos = start + j
        witness = {v: int((pos // int(weights[i])) % n) for i, v in enumerate(names)}
        return CheckResult(False, witness, pos + 1, label, values=(a, b), name=name)

    rng = np.random.default_rng(mode.seed)
    sizes = [min(CHUNK, mode.count - s) for s in range(0, mode.count, CHUNK)]
    offsets = [s for s in range(0, mode.count, CHUNK)]

    def draws():
        for off, size in zip(offsets, sizes):
            yield off, rng.integers(0, n, size=(k, size), dtype=np.int64)

    def job(item):
        off, block = item
        res = check(block)
        if res is None:
            return off, None
        j = res[0]
        return off, (res, {v: int(block[i, j]) for i, v in enumerate(names)})

    hit = _first_hit(job, draws(), workers)
    if hit is None:
        return CheckResult(True, None, mode.count, "sampled", seed=mode.seed, count=mode.count, name=name)
    off, ((j, a, b), witness) = hit
    return CheckResult(False, witness, off + j + 1, "sampled", seed=mode.seed,
                       count=mode.count, values=(a, b), name=name)


def _first_hit(job, items, workers: int):
    """Run ``job`` over ``items`` in order; return the first non-None result by item order."""
    if workers <= 1:
        for item in items:
            key, res = job(item)
            if res is not None:
                return key, res
        return None
    it = iter(items)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        while True:
            wave = [item for _, item in zip(range(workers), it)]
            if not wave:
                return None
            for key, res in pool.map(job, wave):
                if res is not None:
                    return key, res


def check_named(L: MulOracle, name: str, sigma=None, mode: Mode | str = Exhaustive(),
                budget: int = DEFAULT_BUDGET, workers: int = 1) -> CheckResult:
    """Evaluate a catalog entry; conjunctions report their first failing member."""
    return check_text(L, lookup(name), sigma, mode, budget, workers, name=name)


def check_text(L: MulOracle, text: str, sigma=None, mode: Mode | str = Exhaustive(),
               budget: int = DEFAULT_BUDGET, workers: int = 1, name: str = "") -> CheckResult:
    asts = parse_system(text)
    checked = 0
    last = None
    for ast in asts:
        res = eval_identity(L, ast, sigma, mode, budget, workers, name=name or str(ast))
        checked += res.assignments_checked
        if not res.holds:
            res.assignments_checked = checked
            return res
        last = res
    last.assignments_checked = checked
    return last


def holds(L: MulOracle, name_or_text: str, sigma=None, **kw) -> bool:
    text = name_or_text if "=" in name_or_text else lookup(name_or_text)
    return check_text(L, text, sigma if sigma is None or isinstance(sigma, Mapping) else {"s": sigma},
                      **kw).holds
