"""Tagged descriptors for the distribution families.

A :class:`DistributionSpec` names one of eight positive laws together with
its parameters. It is shared by the Mellin registry, the samplers and the
verification layer, so it lives in its own module to avoid import cycles.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping

from .errors import DomainError

__all__ = ["Family", "DistributionSpec"]


class Family(str, enum.Enum):
    EXPONENTIAL = "exponential"
    GAMMA = "gamma"
    WEIBULL = "weibull"
    STABLE = "stable"
    MWRIGHT = "mwright"
    FOXH = "foxh"
    GAUSSIAN_RESIDUAL = "gaussian_residual"
    HALFNORMAL = "halfnormal"


# Parameter names per family, in canonical order.
_PARAMS = {
    Family.EXPONENTIAL: (),
    Family.GAMMA: ("r",),
    Family.WEIBULL: ("k",),
    Family.STABLE: ("beta",),
    Family.MWRIGHT: ("beta",),
    Family.FOXH: ("r", "alpha"),
    Family.GAUSSIAN_RESIDUAL: ("alpha",),
    Family.HALFNORMAL: (),
}

_ALIASES = {
    "exp": Family.EXPONENTIAL,
    "exponential": Family.EXPONENTIAL,
    "gamma": Family.GAMMA,
    "weibull": Family.WEIBULL,
    "stable": Family.STABLE,
    "onesidedstable": Family.STABLE,
    "mwright": Family.MWRIGHT,
    "m-wright": Family.MWRIGHT,
    "foxh": Family.FOXH,
    "foxhresidual": Family.FOXH,
    "gaussian_residual": Family.GAUSSIAN_RESIDUAL,
    "gaussianresidual": Family.GAUSSIAN_RESIDUAL,
    "gaussres": Family.GAUSSIAN_RESIDUAL,
    "halfnormal": Family.HALFNORMAL,
    "half-normal": Family.HALFNORMAL,
}


def _unit_open(name, value):
    if not 0.0 < value < 1.0:
        raise DomainError(f"{name} must lie in (0, 1), got {value!r}")


def _positive(name, value):
    if not value > 0.0:
        raise DomainError(f"{name} must be positive, got {value!r}")


@dataclass(frozen=True)
class DistributionSpec:
    """One member of the eight families, with validated parameters.

    Use the classmethod constructors rather than the raw initialiser::

        DistributionSpec.gamma(2.5)
        DistributionSpec.foxh(r=0.5, alpha=0.3)

    Parameters
    ----------
    family : Family
    params : mapping
        Family-dependent parameters, keyed by name (``r``, ``k``, ``beta``,
        ``alpha``).
    """

    family: Family
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        fam = Family(self.family)
        names = _PARAMS[fam]
        given = dict(self.params)
        if set(given) != set(names):
            raise DomainError(
                f"{fam.value} expects parameters {names}, got {tuple(given)}"
            )
        clean = {}
        for name in names:
            v = float(given[name])
            if not math.isfinite(v):
                raise DomainError(f"{name} must be finite, got {v!r}")
            clean[name] = v
        if fam in (Family.GAMMA,):
            _positive("r", clean["r"])
        elif fam is Family.WEIBULL:
            _positive("k", clean["k"])
        elif fam in (Family.STABLE, Family.MWRIGHT):
            _unit_open("beta", clean["beta"])
        elif fam is Family.FOXH:
            _positive("r", clean["r"])
            _unit_open("alpha", clean["alpha"])
        elif fam is Family.GAUSSIAN_RESIDUAL:
            _unit_open("alpha", clean["alpha"])
        object.__setattr__(self, "family", fam)
        # a tuple of pairs keeps the spec hashable
        object.__setattr__(self, "params", _FrozenParams(clean))

    # constructors ---------------------------------------------------------

    @classmethod
    def exponential(cls):
        return cls(Family.EXPONENTIAL, {})

    @classmethod
    def gamma(cls, r):
        return cls(Family.GAMMA, {"r": r})

    @classmethod
    def weibull(cls, k):
        """Weibull law with density ``k x^(k-1) exp(-x^k)``."""
        return cls(Family.WEIBULL, {"k": k})

    @classmethod
    def stable(cls, beta):
        """One-sided stable law with Laplace transform ``exp(-s^beta)``."""
        return cls(Family.STABLE, {"beta": beta})

    @classmethod
    def mwright(cls, beta):
        return cls(Family.MWRIGHT, {"beta": beta})

    @classmethod
    def foxh(cls, r, alpha):
        """Residual of the gamma(r) decomposition with exponent alpha."""
        return cls(Family.FOXH, {"r": r, "alpha": alpha})

    @classmethod
    def gaussian_residual(cls, alpha):
        return cls(Family.GAUSSIAN_RESIDUAL, {"alpha": alpha})

    @classmethod
    def halfnormal(cls):
        return cls(Family.HALFNORMAL, {})

    @classmethod
    def from_name(cls, name, **params):
        """Build a spec from a family name (aliases accepted) and keywords.

        Keywords whose value is ``None`` are ignored, which lets callers pass
        every CLI flag through unchanged.
        """
        key = str(name).strip().lower().replace(" ", "")
        try:
            fam = _ALIASES[key]
        except KeyError:
            raise DomainError(f"unknown family {name!r}") from None
        wanted = _PARAMS[fam]
        given = {k: v for k, v in params.items() if v is not None}
        missing = [p for p in wanted if p not in given]
        if missing:
            raise DomainError(f"{fam.value} requires {', '.join(missing)}")
        return cls(fam, {p: given[p] for p in wanted})

    # derived properties ---------------------------------------------------

    def __getattr__(self, name):
        # Only reached when normal lookup fails, so dataclass fields win.
        params = self.__dict__.get("params")
        if params is not None and name in params:
            return params[name]
        raise AttributeError(name)

    @property
    def head_exponent(self):
        """Exponent c with ``pdf(x) ~ const * x**(c - 1)`` as x -> 0.

        ``None`` for the stable law, whose density vanishes faster than any
        power at the origin.
        """
        fam = self.family
        if fam is Family.GAMMA or fam is Family.FOXH:
            return self.params["r"]
        if fam is Family.WEIBULL:
            return self.params["k"]
        if fam is Family.STABLE:
            return None
        return 1.0

    @property
    def strip(self):
        """Strip of analyticity of the Mellin transform of the density."""
        from .mellin import AnalyticStrip

        fam = self.family
        if fam in (Family.GAMMA, Family.FOXH):
            return AnalyticStrip(1.0 - self.params["r"], math.inf)
        if fam is Family.WEIBULL:
            return AnalyticStrip(1.0 - self.params["k"], math.inf)
        if fam is Family.STABLE:
            return AnalyticStrip(-math.inf, 1.0 + self.params["beta"])
        return AnalyticStrip(0.0, math.inf)

    def label(self):
        inner = ", ".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"{self.family.value}({inner})"

    def to_dict(self):
        return {"family": self.family.value, **dict(self.params)}

    def __repr__(self):
        return f"DistributionSpec<{self.label()}>"


class _FrozenParams(Mapping):
    """Minimal immutable, hashable mapping."""

    __slots__ = ("_items",)

    def __init__(self, data):
        self._items = tuple(data.items())

    def __getitem__(self, key):
        for k, v in self._items:
            if k == key:
                return v
        raise KeyError(key)

    def __iter__(self):
        return (k for k, _ in self._items)

    def __len__(self):
        return len(self._items)

    def __hash__(self):
        return hash(self._items)

    def __eq__(self, other):
        if isinstance(other, Mapping):
            return dict(self._items) == dict(other)
        return NotImplemented

    def __repr__(self):
        return repr(dict(self._items))
