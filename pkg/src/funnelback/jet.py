"""First-order forward-mode jets with a dense seed registry.

A jet carries a value together with its vector of first partial derivatives
with respect to a fixed, ordered list of independent variables (the "seeds").
Arithmetic propagates the partials by the product/quotient/chain rules, so
evaluating any closed-form expression on lifted inputs yields the expression's
exact gradient (up to floating point).

Two properties matter for the controller recursion built on top of this:

* values and partials are generic: they may be floats, or other Jet
  instances.  Nesting jets inside jets is how second-derivative information
  is obtained without a second-order tape -- the inner evaluation computes a
  first derivative, the outer jet differentiates *through* that computation.
* everything is deterministic and side-effect free.  Identical inputs give
  bitwise-identical outputs.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "SeedRegistry",
    "Jet",
    "JetDomainError",
    "UnknownSeedError",
    "lift",
    "lift_point",
    "constant",
    "evaluate_with_gradient",
    "sqrt",
    "exp",
    "log",
    "sin",
    "cos",
    "tan",
    "tanh",
    "atan",
    "atanh",
    "leading_value",
]


class UnknownSeedError(KeyError):
    """Raised when lifting against an identifier the registry does not know."""


class JetDomainError(ZeroDivisionError):
    """Division (or log/sqrt/...) hit a value where the derivative blows up."""


class SeedRegistry:
    """Ordered, immutable list of independent-variable identifiers."""

    __slots__ = ("names", "_index")

    def __init__(self, names):
        names = tuple(str(n) for n in names)
        if len(set(names)) != len(names):
            raise ValueError("seed identifiers must be unique: %r" % (names,))
        self.names = names
        self._index = {n: i for i, n in enumerate(names)}

    def __len__(self):
        return len(self.names)

    def __contains__(self, name):
        return name in self._index

    def index_of(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownSeedError(
                "seed %r not registered (have %r)" % (name, self.names)
            ) from None

    def __repr__(self):
        return "SeedRegistry(%r)" % (self.names,)


def _is_zero(v) -> bool:
    """True when the leading (innermost) value of ``v`` is exactly zero."""
    while isinstance(v, Jet):
        v = v.value
    if isinstance(v, np.ndarray):
        return bool(np.any(v == 0.0))
    return v == 0.0


def leading_value(v) -> float:
    """Strip nesting: the plain float underneath a (possibly nested) jet."""
    while isinstance(v, Jet):
        v = v.value
    return v


class Jet:
    """Value plus dense first partials over a :class:`SeedRegistry`."""

    __slots__ = ("registry", "value", "partials")

    def __init__(self, registry: SeedRegistry, value, partials):
        self.registry = registry
        self.value = value
        self.partials = partials  # list, same length as registry

    # -- helpers ----------------------------------------------------------

    def _chain(self, value, dfdx):
        """New jet with ``value`` and partials ``dfdx * self.partials``."""
        return Jet(self.registry, value, [dfdx * p for p in self.partials])

    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.registry is not self.registry:
                raise ValueError("jets belong to different seed registries")
            return other
        return None

    def gradient(self) -> np.ndarray:
        """Partials as a float array (only valid for unnested jets)."""
        return np.array([float(p) for p in self.partials], dtype=float)

    # -- ring operations --------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is not None:
            return Jet(
                self.registry,
                self.value + o.value,
                [a + b for a, b in zip(self.partials, o.partials)],
            )
        return Jet(self.registry, self.value + other, list(self.partials))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is not None:
            return Jet(
                self.registry,
                self.value - o.value,
                [a - b for a, b in zip(self.partials, o.partials)],
            )
        return Jet(self.registry, self.value - other, list(self.partials))

    def __rsub__(self, other):
        return Jet(
            self.registry, other - self.value, [-p for p in self.partials]
        )

    def __mul__(self, other):
        o = self._coerce(other)
        if o is not None:
            return Jet(
                self.registry,
                self.value * o.value,
                [
                    a * o.value + self.value * b
                    for a, b in zip(self.partials, o.partials)
                ],
            )
        return Jet(
            self.registry, self.value * other, [p * other for p in self.partials]
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is not None:
            if _is_zero(o.value):
                raise JetDomainError("division by a jet with zero value")
            inv = 1.0 / o.value
            val = self.value * inv
            return Jet(
                self.registry,
                val,
                [(a - val * b) * inv for a, b in zip(self.partials, o.partials)],
            )
        if _is_zero(other):
            raise JetDomainError("division by zero")
        inv = 1.0 / other
        return Jet(self.registry, self.value * inv, [p * inv for p in self.partials])

    def __rtruediv__(self, other):
        if _is_zero(self.value):
            raise JetDomainError("division by a jet with zero value")
        inv = 1.0 / self.value
        val = other * inv
        return self._chain(val, -val * inv)

    def __pow__(self, p):
        if isinstance(p, Jet):
            # a**b = exp(b log a); rarely needed, keep it exact
            return exp(p * log(self))
        if p == 2:
            return self * self
        if isinstance(p, int) or float(p).is_integer():
            n = int(p)
            val = self.value**n
            return self._chain(val, n * self.value ** (n - 1))
        if _is_zero(self.value):
            raise JetDomainError("fractional power of a jet with zero value")
        val = self.value**p
        return self._chain(val, p * self.value ** (p - 1.0))

    def __neg__(self):
        return Jet(self.registry, -self.value, [-p for p in self.partials])

    def __pos__(self):
        return self

    def __abs__(self):
        if leading_value(self.value) < 0.0:
            return -self
        return self

    def __repr__(self):
        return "Jet(%r, d=%r)" % (self.value, self.partials)


def lift(value, seed: str, registry: SeedRegistry) -> Jet:
    """Lift ``value`` as the independent variable ``seed``: unit partial."""
    i = registry.index_of(seed)
    partials = [0.0] * len(registry)
    partials[i] = 1.0
    if isinstance(value, int):
        value = float(value)
    return Jet(registry, value, partials)


def constant(value, registry: SeedRegistry) -> Jet:
    """Lift ``value`` with zero partials (a constant w.r.t. every seed)."""
    return Jet(registry, value, [0.0] * len(registry))


def lift_point(registry: SeedRegistry, point: dict) -> dict:
    """Lift an assignment ``{seed: value}`` covering every registered seed."""
    for name in point:
        registry.index_of(name)  # raises UnknownSeedError on typos
    return {name: lift(value, name, registry) for name, value in point.items()}


def evaluate_with_gradient(f, point: dict, registry: SeedRegistry):
    """Evaluate ``f`` on lifted seeds, returning ``(value, gradient)``.

    ``f`` receives a dict mapping seed names to jets and must combine them
    through the arithmetic of this module.  The gradient is ordered like the
    registry.
    """
    env = lift_point(registry, point)
    out = f(env)
    if not isinstance(out, Jet):
        return float(out), np.zeros(len(registry))
    return out.value, out.gradient()


# -- elementary functions (dispatch on Jet / array / scalar) ---------------


def _apply(x, scalar_fn, array_fn, jet_rule):
    if isinstance(x, Jet):
        return jet_rule(x)
    if isinstance(x, np.ndarray):
        return array_fn(x)
    return scalar_fn(x)


def sqrt(x):
    def rule(j):
        if leading_value(j.value) <= 0.0:
            raise JetDomainError("sqrt of a jet with non-positive value")
        r = sqrt(j.value)
        return j._chain(r, 0.5 / r)

    return _apply(x, math.sqrt, np.sqrt, rule)


def exp(x):
    def rule(j):
        e = exp(j.value)
        return j._chain(e, e)

    return _apply(x, math.exp, np.exp, rule)


def log(x):
    def rule(j):
        if leading_value(j.value) <= 0.0:
            raise JetDomainError("log of a jet with non-positive value")
        return j._chain(log(j.value), 1.0 / j.value)

    return _apply(x, math.log, np.log, rule)


def sin(x):
    def rule(j):
        return j._chain(sin(j.value), cos(j.value))

    return _apply(x, math.sin, np.sin, rule)


def cos(x):
    def rule(j):
        return j._chain(cos(j.value), -sin(j.value))

    return _apply(x, math.cos, np.cos, rule)


def tan(x):
    def rule(j):
        t = tan(j.value)
        return j._chain(t, 1.0 + t * t)

    return _apply(x, math.tan, np.tan, rule)


def tanh(x):
    def rule(j):
        t = tanh(j.value)
        return j._chain(t, 1.0 - t * t)

    return _apply(x, math.tanh, np.tanh, rule)


def atan(x):
    def rule(j):
        return j._chain(atan(j.value), 1.0 / (1.0 + j.value * j.value))

    return _apply(x, math.atan, np.arctan, rule)


def atanh(x):
    def rule(j):
        if abs(leading_value(j.value)) >= 1.0:
            raise JetDomainError("atanh of a jet with |value| >= 1")
        return j._chain(atanh(j.value), 1.0 / (1.0 - j.value * j.value))

    return _apply(x, math.atanh, np.arctanh, rule)
