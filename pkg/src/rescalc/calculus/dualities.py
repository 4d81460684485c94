"""The three dualities checked against the axiom database."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .axioms import AxiomDB, axioms
from .resources import Inequality
from .rules import relabel, reverse, time_reverse


@dataclass(frozen=True)
class DualityCheck:
    duality: str
    source: str
    image: Inequality
    matches: tuple          # axiom names equivalent to the image or to its reverse

    @property
    def holds(self) -> bool:
        return bool(self.matches)

    def to_json(self) -> dict:
        return {"duality": self.duality, "source": self.source, "image": self.image.to_text(),
                "matches": list(self.matches), "holds": self.holds}


def _match(db: AxiomDB, image: Inequality, group: str) -> tuple:
    found = db.matches(image, group) + db.matches(reverse(image), group)
    return tuple(dict.fromkeys(found))


def classical_dualities(db: Optional[AxiomDB] = None) -> list[DualityCheck]:
    """Resource reversal, source-channel and time-reversal images of the classical axioms.

    Reversal maps the reverse Shannon theorem onto feedback channel coding.
    Replacing the source by Alice's input or reversing time in Slepian-Wolf
    lands on nothing in the classical database.
    """
    db = db or axioms()
    crs = db.get("classical-reverse-shannon").statement
    sw = db.get("slepian-wolf").statement
    out = [DualityCheck("reversal", "classical-reverse-shannon", reverse(crs),
                        tuple(db.matches(reverse(crs), "classical")))]
    src = relabel(sw, {"X_S": "X_A'", "Y_S": "Y_A'"})
    out.append(DualityCheck("source-channel", "slepian-wolf", src, _match(db, src, "classical")))
    tr = time_reverse(sw)
    out.append(DualityCheck("time-reversal", "slepian-wolf", tr, _match(db, tr, "classical")))
    return out
