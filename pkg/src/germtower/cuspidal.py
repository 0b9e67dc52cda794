"""Toroidal compactification into exponential-sum semimodules and correspondences.

Compactifying a semisheaf turns every section into one Fourier-like mode
``r * exp(sign * pi * i * mu * x)`` with sign +1 on the left and -1 on the
right.  The summed modes form an elliptic semimodule; paired left/right modes
at the same class behave like the two strings of a harmonic bistring whose
pointwise modulus is constant.  The correspondence records pair a Weil-side
class listing with the compactified reduced and orthogonal cuspidal parts,
one record per level.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Callable, Sequence

from .sheaves import Bisemisheaf, Semisheaf, emergent_project, endo_split
from .tower import LEFT, RIGHT, ClassIndex

AmplitudeRule = Callable[[ClassIndex], float]


def unit_amplitude(_: ClassIndex) -> float:
    return 1.0


@dataclass(frozen=True)
class Mode:
    """One exponential mode ``amplitude * exp(sign * pi * i * mu * x)``."""

    mu: int
    m: int
    amplitude: float
    sign: int

    def __post_init__(self):
        if self.sign not in (-1, 1):
            raise ValueError("mode sign must be +1 (left) or -1 (right)")
        if self.amplitude < 0:
            raise ValueError("mode amplitude must be non-negative")


@dataclass(frozen=True)
class EllipticSemimodule:
    """A one-sided sum of semicircle phasor modes."""

    side: str
    modes: tuple[Mode, ...]
    source_level: str
    source_nature: str
    quantum_modulus: int

    def evaluate(self, x: float) -> complex:
        return sum(
            (
                mode.amplitude * cmath.exp(1j * mode.sign * cmath.pi * mode.mu * x)
                for mode in self.modes
            ),
            complex(0),
        )

    def mode_degree(self, mode: Mode) -> int:
        # Toroidal completions drop the offset: the compactified degree is mu*N.
        return mode.mu * self.quantum_modulus

    def mode_indices(self) -> tuple[ClassIndex, ...]:
        return tuple(ClassIndex(mode.mu, mode.m) for mode in self.modes)

    def to_json(self) -> list[dict]:
        return [
            {"mu": mode.mu, "m": mode.m, "amplitude": mode.amplitude, "sign": mode.sign}
            for mode in self.modes
        ]


def compactify(
    s: Semisheaf,
    amplitude_rule: AmplitudeRule | None = None,
    even_only: bool = False,
) -> EllipticSemimodule:
    """Compactify a semisheaf into its elliptic semimodule.

    One mode per section; the amplitude rule defaults to 1 everywhere.  With
    ``even_only`` set (the even-class convention) odd classes are skipped and
    a retained class ``mu = 2k`` keeps its doubled degree ``2kN``.
    """
    if not s.sections:
        raise ValueError("cannot compactify an empty semisheaf")
    rule = amplitude_rule or unit_amplitude
    sign = 1 if s.side == LEFT else -1
    modes = []
    for sec in s.sections:
        if even_only and sec.index.mu % 2 != 0:
            continue
        amplitude = float(rule(sec.index))
        if amplitude < 0:
            raise ValueError(f"amplitude rule is negative at class {sec.index}")
        modes.append(Mode(sec.index.mu, sec.index.m, amplitude, sign))
    if not modes:
        raise ValueError("the even-class convention removed every section")
    return EllipticSemimodule(
        s.side, tuple(modes), s.level, s.nature, s.tower.quantum_modulus
    )


def evaluate(esm: EllipticSemimodule, x: float) -> complex:
    return esm.evaluate(x)


def bistring_modulus(
    right_mode: Mode, left_mode: Mode, samples: Sequence[float]
) -> list[float]:
    """Pointwise modulus of a matched bistring product.

    The right string rotates with sign -1 and the left with +1 at the same
    class, so the product's modulus is the constant ``r_R * r_L``.
    """
    if right_mode.sign != -1 or left_mode.sign != 1:
        raise ValueError("a bistring pairs a right (-1) mode with a left (+1) mode")
    if right_mode.mu != left_mode.mu:
        raise ValueError("matched bistring modes must share their class mu")
    out = []
    for x in samples:
        zr = right_mode.amplitude * cmath.exp(-1j * cmath.pi * right_mode.mu * x)
        zl = left_mode.amplitude * cmath.exp(1j * cmath.pi * left_mode.mu * x)
        out.append(abs(zr * zl))
    return out


@dataclass(frozen=True)
class WeilDescriptor:
    """One Weil-side class: an index with its completion degree."""

    mu: int
    m: int
    degree: int


@dataclass(frozen=True)
class LevelRecord:
    label: str
    weil_side: tuple[WeilDescriptor, ...]
    reduced: tuple[EllipticSemimodule, EllipticSemimodule]
    orthogonal: tuple[EllipticSemimodule, EllipticSemimodule] | None = None

    def mode_pair_count(self) -> int:
        count = len(self.reduced[0].modes)
        if self.orthogonal is not None:
            count += len(self.orthogonal[0].modes)
        return count

    def bijection_holds(self) -> bool:
        """Weil classes and cuspidal mode pairs are in bijection."""
        pairs_match = len(self.reduced[0].modes) == len(self.reduced[1].modes)
        if self.orthogonal is not None:
            pairs_match = pairs_match and (
                len(self.orthogonal[0].modes) == len(self.orthogonal[1].modes)
            )
        return pairs_match and len(self.weil_side) == self.mode_pair_count()

    def cusp_mode_indices(self) -> tuple[ClassIndex, ...]:
        indices = list(self.reduced[1].mode_indices())
        if self.orthogonal is not None:
            indices.extend(self.orthogonal[1].mode_indices())
        return tuple(sorted(indices))


@dataclass(frozen=True)
class Correspondence:
    levels: tuple[LevelRecord, ...]

    def bijection_holds(self) -> bool:
        return all(level.bijection_holds() for level in self.levels)


def _weil_descriptors(b: Bisemisheaf, even_only: bool) -> tuple[WeilDescriptor, ...]:
    out = []
    for idx in b.indices():
        if even_only and idx.mu % 2 != 0:
            continue
        out.append(WeilDescriptor(idx.mu, idx.m, b.tower.real_degree(idx)))
    return tuple(out)


def lgc(
    b: Bisemisheaf,
    amplitude_rule: AmplitudeRule | None = None,
    even_only: bool = False,
) -> Correspondence:
    """One-level correspondence: the whole bisemisheaf compactified.

    The Weil side lists every class descriptor; the cuspidal side is the
    (right, left) semimodule pair, in bijection with it.
    """
    record = LevelRecord(
        b.level,
        _weil_descriptors(b, even_only),
        (
            compactify(b.right, amplitude_rule, even_only),
            compactify(b.left, amplitude_rule, even_only),
        ),
        None,
    )
    return Correspondence((record,))


def lggc_st(
    b: Bisemisheaf,
    reduce: Callable[[ClassIndex], bool] | None = None,
    orth_dims: int = 3,
    amplitude_rule: AmplitudeRule | None = None,
    even_only: bool = False,
) -> Correspondence:
    """Two-part correspondence: split first, then compactify each route.

    The endomorphism split keeps the reduced part in place and projects the
    complementary part to the orthogonal complement; both parts are then
    compactified.  Splitting and compactifying commute on mode indices, so
    the union of the two parts' modes equals the plain compactification's.
    """
    red_r, comp_r = endo_split(b.right, reduce)
    red_l, comp_l = endo_split(b.left, reduce)
    if not red_r.sections:
        raise ValueError("the reduce predicate left the reduced part empty")
    reduced = (
        compactify(red_r, amplitude_rule, even_only),
        compactify(red_l, amplitude_rule, even_only),
    )
    orthogonal = None
    if comp_r.sections:
        proj_r = emergent_project(comp_r, orth_dims)
        proj_l = emergent_project(comp_l, orth_dims)
        orthogonal = (
            compactify(proj_r, amplitude_rule, even_only),
            compactify(proj_l, amplitude_rule, even_only),
        )
    record = LevelRecord(b.level, _weil_descriptors(b, even_only), reduced, orthogonal)
    return Correspondence((record,))
