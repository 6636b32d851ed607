"""Registry of built-in methods: named schemes, linear families, optimized fixtures."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from functools import lru_cache
from importlib import resources

from .conditions import certified_orders
from .errors import UnknownMethod
from .monotonicity import ssp_radius
from .optimizer import table_value
from .tableau import NAMED_METHODS, ButcherTableau, family_tableau, make_named, tableau_from_json

FAMILY_RANGE = {"plin_eq_s": range(1, 13), "plin_eq_s_minus_1": range(2, 13)}
FAMILY_C = {"plin_eq_s": 1.0, "plin_eq_s_minus_1": 2.0}
NAMED_C = {"ssprk22": 1.0, "ssprk33": 1.0, "ssprk54": 1.508, "ssprk104": 6.0}
ALIASES = {"fe": "plin_eq_s/1", "euler": "plin_eq_s/1"}


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    s: int
    p_lin: int
    p: int
    C: float
    reference: float | None
    source: str

    def to_dict(self) -> dict:
        return asdict(self)


def _fixture_names() -> list[str]:
    files = resources.files("ssplab").joinpath("data")
    names = [f.name[:-5] for f in files.iterdir() if f.name.startswith("lnl-") and f.name.endswith(".json")]

    def key(n):
        return tuple(int(v) for v in n.split("-")[1:])

    return sorted(names, key=key)


def method_names() -> list[str]:
    names = list(NAMED_METHODS)
    for kind, rng in FAMILY_RANGE.items():
        names += [f"{kind}/{s}" for s in rng]
    return names + _fixture_names()


@lru_cache(maxsize=None)
def get_method(name: str) -> ButcherTableau:
    """Tableau for a catalog name: ``ssprk104``, ``plin_eq_s/5``, ``lnl-9-6-4``, ..."""
    key = ALIASES.get(name.lower(), name.lower())
    if key in NAMED_METHODS:
        return make_named(key)
    if "/" in key:
        kind, _, s = key.partition("/")
        kind = kind.replace("-", "_")
        if kind in FAMILY_RANGE and s.isdigit():
            return family_tableau(int(s), kind)
    if key.startswith("lnl-"):
        path = resources.files("ssplab").joinpath("data", f"{key}.json")
        if path.is_file():
            return tableau_from_json(path.read_text()).with_label(key)
    raise UnknownMethod(f"unknown method {name!r}; see `ssplab catalog`")


def _reference(name: str, s: int) -> float | None:
    if name in NAMED_C:
        return NAMED_C[name]
    kind = name.partition("/")[0]
    if kind in FAMILY_C:
        return FAMILY_C[kind]
    if name.startswith("lnl-"):
        _, s_, p_lin, p = name.split("-")
        try:
            return table_value(int(s_), int(p_lin), int(p))
        except KeyError:
            return None
    return None


def _source(name: str) -> str:
    if name in NAMED_METHODS:
        return "named"
    if name.startswith("lnl-"):
        return "optimized"
    return "family"


@lru_cache(maxsize=None)
def describe(name: str) -> CatalogEntry:
    tab = get_method(name)
    p_lin, p = certified_orders(tab, q_max=tab.s + 1)
    return CatalogEntry(name, tab.s, p_lin, p, ssp_radius(tab).radius, _reference(name, tab.s), _source(name))


def catalog() -> list[CatalogEntry]:
    return [describe(n) for n in method_names()]
