"""Compile parsed expressions into closures at a fixed value of q.

Subtrees that mention no parameter are folded to constants once, so the
closures left over only do the parameter-dependent work.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Mapping

from .. import expr as E
from ..cyclo import Cyclotomic, QContext, gauss_sum, real_part, sqrt_cyclo, zeta

Env = Mapping[str, int]
Value = "Fraction | Cyclotomic"


class EvalError(ValueError):
    pass


def _is_param(name: str) -> bool:
    return len(name) > 1 and name[0] in "klt" and name[1:].isdigit()


def _has_params(node) -> bool:
    return any(_is_param(v) for v in E.free_vars(node))


def _to_int(v, what: str = "value") -> int:
    if isinstance(v, Cyclotomic):
        if not v.is_rational():
            raise EvalError(f"{what} {v} is not rational")
        v = v.to_fraction()
    if isinstance(v, int):
        return v
    if v.denominator != 1:
        raise EvalError(f"{what} {v} is not an integer")
    return v.numerator


def _simplify(v):
    if isinstance(v, Cyclotomic) and v.n == 1:
        return Fraction(v.c.get(0, 0))
    return v


class Compiler:
    """Turns expression trees into functions of a parameter environment."""

    def __init__(self, ctx: QContext):
        self.ctx = ctx
        if ctx.d == 1:
            self.qval = Fraction(ctx.c)
        else:
            self.qval = sqrt_cyclo(ctx.d) * ctx.c
        self._cache: dict = {}

    # constants

    def const(self, node):
        return self.scalar(node)({})

    def const_int(self, node) -> int:
        return _to_int(self.const(node), "constant")

    def const_text(self, text: str):
        return self.const(E.parse(text))

    def int_text(self, text: str) -> int:
        return self.const_int(E.parse(text))

    def pred_text(self, text: str) -> bool:
        return self.pred(E.parse_pred(text))({})

    # scalar expressions

    def scalar(self, node) -> Callable[[Env], object]:
        key = ("s", node)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if not _has_params(node):
            val = _simplify(self._build_scalar(node)({}))
            fn = lambda env, val=val: val
        else:
            fn = self._build_scalar(node)
        self._cache[key] = fn
        return fn

    def _build_scalar(self, node):
        kind = node[0]
        if kind == "num":
            v = node[1]
            return lambda env: v
        if kind == "var":
            name = node[1]
            if name == "q":
                v = self.qval
                return lambda env: v
            if name == "gauss":
                if self.ctx.d != 1:
                    raise EvalError("gauss needs an untwisted context")
                v = gauss_sum(self.ctx.c)
                return lambda env: v
            if name in ("sqrt2", "sqrt3"):
                v = sqrt_cyclo(int(name[-1]))
                return lambda env: v
            if _is_param(name):
                return lambda env: Fraction(env[name])
            raise EvalError(f"unknown name {name!r}")
        if kind == "call":
            return self._build_call(node)
        if kind in ("add", "sub", "mul", "div"):
            a, b = self.scalar(node[1]), self.scalar(node[2])
            if kind == "add":
                return lambda env: a(env) + b(env)
            if kind == "sub":
                return lambda env: a(env) - b(env)
            if kind == "mul":
                return lambda env: a(env) * b(env)

            def div(env):
                den = b(env)
                if isinstance(den, Cyclotomic):
                    den = den if not den.is_rational() else den.to_fraction()
                return a(env) / den
            return div
        if kind == "neg":
            a = self.scalar(node[1])
            return lambda env: -a(env)
        if kind == "pow":
            a = self.scalar(node[1])
            k = self.integer(node[2])
            return lambda env: a(env) ** k(env)
        if kind == "case":
            arms = [(self.pred(p), self.scalar(e)) for p, e in node[1]]

            def case(env):
                for p, e in arms:
                    if p(env):
                        return e(env)
                raise EvalError("no case arm applies")
            return case
        raise EvalError(f"cannot evaluate node {kind!r}")

    def _build_call(self, node):
        name, args = node[1], node[2]
        if name == "zeta":
            if len(args) != 2:
                raise EvalError("zeta takes a modulus and an exponent")
            m = self.integer(args[0])
            e = self.integer(args[1])
            if not _has_params(args[0]):
                mv = m({})
                if mv < 1:
                    raise EvalError(f"zeta modulus {mv} is not positive")
                if mv == 1:
                    return lambda env: Fraction(1)
                return lambda env: Cyclotomic._raw(mv, {e(env) % mv: 1})
            return lambda env: zeta(m(env), e(env))
        if len(args) != 1:
            raise EvalError(f"{name} takes one argument")
        a = self.scalar(args[0])
        if name == "re":
            def re_(env):
                v = a(env)
                return v if not isinstance(v, Cyclotomic) else real_part(v)
            return re_
        if name == "conj":
            def conj_(env):
                v = a(env)
                return v if not isinstance(v, Cyclotomic) else v.conj()
            return conj_
        raise EvalError(f"unknown function {name!r}")

    # integer expressions (moduli, exponents)

    def integer(self, node) -> Callable[[Env], int]:
        key = ("i", node)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if not _has_params(node):
            v = _to_int(self.scalar(node)({}), "integer expression")
            fn = lambda env, v=v: v
        else:
            fn = self._build_rational(node)
            inner = fn
            fn = lambda env: _to_int(inner(env), "exponent")
        self._cache[key] = fn
        return fn

    def _build_rational(self, node):
        # parameter-dependent parts stay in Fraction arithmetic
        if not _has_params(node):
            v = self.scalar(node)({})
            if isinstance(v, Cyclotomic):
                if not v.is_rational():
                    raise EvalError(f"irrational constant {v} in an integer expression")
                v = v.to_fraction()
            return lambda env: v
        kind = node[0]
        if kind == "var":
            name = node[1]
            return lambda env: env[name]
        if kind in ("add", "sub", "mul", "div"):
            a, b = self._build_rational(node[1]), self._build_rational(node[2])
            if kind == "add":
                return lambda env: a(env) + b(env)
            if kind == "sub":
                return lambda env: a(env) - b(env)
            if kind == "mul":
                return lambda env: a(env) * b(env)
            return lambda env: Fraction(a(env)) / b(env)
        if kind == "neg":
            a = self._build_rational(node[1])
            return lambda env: -a(env)
        if kind == "pow":
            a = self._build_rational(node[1])
            k = self.integer(node[2])
            return lambda env: a(env) ** k(env)
        raise EvalError(f"{kind!r} is not allowed in an integer expression")

    # predicates

    def pred(self, node) -> Callable[[Env], bool]:
        kind = node[0]
        if kind == "else":
            return lambda env: True
        if kind == "and":
            a, b = self.pred(node[1]), self.pred(node[2])
            return lambda env: a(env) and b(env)
        if kind == "divides":
            m, x, neg = self.integer(node[1]), self.integer(node[2]), node[3]

            def divides(env):
                mv = m(env)
                ok = (x(env) == 0) if mv == 0 else (x(env) % mv == 0)
                return ok != neg
            return divides
        raise EvalError(f"{kind!r} is not a predicate")
