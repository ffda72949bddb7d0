"""Object catalog: kinds, default dimensions, and the named color palette."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import RangeError, UnknownKind
from .geometry import Vec3


@dataclass(frozen=True)
class ColorRGBA:
    r: float
    g: float
    b: float
    a: float = 1.0

    def __post_init__(self):
        for name in ("r", "g", "b", "a"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise RangeError(f"color channel {name}={v} outside [0, 1]")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.r, self.g, self.b, self.a)

    @staticmethod
    def of(value) -> "ColorRGBA":
        if isinstance(value, ColorRGBA):
            return value
        if isinstance(value, str):
            return palette_color(value)
        seq = list(value)
        if len(seq) == 3:
            seq.append(1.0)
        if len(seq) != 4:
            raise RangeError(f"color needs 3 or 4 channels, got {len(seq)}")
        return ColorRGBA(*(float(c) for c in seq))


# Fixed 12-entry named palette; color words in prompts resolve here, and
# object colors map back to their nearest term by RGB distance.
PALETTE: dict[str, ColorRGBA] = {
    "red": ColorRGBA(1.0, 0.0, 0.0),
    "green": ColorRGBA(0.0, 0.8, 0.0),
    "blue": ColorRGBA(0.0, 0.0, 1.0),
    "yellow": ColorRGBA(1.0, 0.9, 0.0),
    "orange": ColorRGBA(1.0, 0.55, 0.0),
    "purple": ColorRGBA(0.55, 0.0, 0.8),
    "pink": ColorRGBA(1.0, 0.6, 0.8),
    "brown": ColorRGBA(0.55, 0.35, 0.15),
    "white": ColorRGBA(1.0, 1.0, 1.0),
    "gray": ColorRGBA(0.5, 0.5, 0.5),
    "black": ColorRGBA(0.0, 0.0, 0.0),
    "cyan": ColorRGBA(0.0, 0.8, 0.9),
}


def palette_color(term: str) -> ColorRGBA:
    try:
        return PALETTE[term]
    except KeyError:
        raise RangeError(f"unknown color term {term!r}") from None


def nearest_color_term(color: ColorRGBA) -> str:
    best, best_d = None, None
    for term, c in PALETTE.items():
        d = (c.r - color.r) ** 2 + (c.g - color.g) ** 2 + (c.b - color.b) ** 2
        if best_d is None or d < best_d:
            best, best_d = term, d
    return best


@dataclass(frozen=True)
class ObjectKind:
    name: str
    size: Vec3  # (w, h, d) meters
    color: ColorRGBA
    category: str  # animal | furniture | primitive
    wall_mountable: bool = False


def _k(name, w, h, d, color, category, wall=False):
    return ObjectKind(name, Vec3(w, h, d), palette_color(color), category, wall)


_DEFAULT_KINDS = [
    # animals
    _k("dog", 0.4, 0.55, 0.8, "brown", "animal"),
    _k("cat", 0.25, 0.35, 0.6, "gray", "animal"),
    _k("horse", 0.6, 1.6, 2.0, "brown", "animal"),
    _k("elephant", 1.4, 2.4, 2.8, "gray", "animal"),
    _k("rabbit", 0.2, 0.25, 0.4, "white", "animal"),
    # furniture
    _k("desk", 1.2, 0.75, 0.6, "brown", "furniture"),
    _k("table", 1.0, 0.8, 0.6, "brown", "furniture"),
    _k("chair", 0.45, 0.9, 0.5, "brown", "furniture"),
    _k("couch", 2.0, 0.85, 0.9, "blue", "furniture"),
    _k("lamp", 0.3, 0.5, 0.3, "yellow", "furniture", wall=True),
    _k("cabinet", 0.8, 1.8, 0.45, "brown", "furniture"),
    _k("door", 0.9, 2.1, 0.06, "brown", "furniture", wall=True),
    _k("painting", 0.8, 0.6, 0.04, "white", "furniture", wall=True),
    _k("plant", 0.3, 0.45, 0.3, "green", "furniture"),
    _k("switch", 0.4, 0.02, 0.4, "gray", "furniture"),
    # primitives
    _k("cube", 0.5, 0.5, 0.5, "white", "primitive"),
    _k("sphere", 0.5, 0.5, 0.5, "white", "primitive"),
    _k("pyramid", 0.5, 0.5, 0.5, "white", "primitive"),
]


class Catalog:
    def __init__(self, kinds=None):
        self._kinds: dict[str, ObjectKind] = {}
        for kind in kinds if kinds is not None else _DEFAULT_KINDS:
            self._kinds[kind.name] = kind

    def has(self, name: str) -> bool:
        return name in self._kinds

    def get(self, name: str) -> ObjectKind:
        try:
            return self._kinds[name]
        except KeyError:
            raise UnknownKind(f"unknown object kind {name!r}") from None

    def names(self) -> list[str]:
        return list(self._kinds)

    def of_category(self, category: str) -> list[str]:
        return [k.name for k in self._kinds.values() if k.category == category]

    @property
    def categories(self) -> list[str]:
        seen = []
        for k in self._kinds.values():
            if k.category not in seen:
                seen.append(k.category)
        return seen


def default_catalog() -> Catalog:
    return Catalog()
