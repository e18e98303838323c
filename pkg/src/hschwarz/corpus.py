"""The bundled corpus of map documents.

``data/corpus.jsonl`` is generated by :func:`build_documents` (run
``python -m hschwarz.corpus`` to rewrite it). The ten single-map documents
come first; the remaining documents hold pairs used by the equality checks.
"""

from __future__ import annotations

import cmath
import sys
from importlib import resources
from typing import Dict, List

from .analytic import Compose, Constant, Exp, Identity, Mobius, MobiusLeaf, Polynomial, Scale
from .documents import MapDocument, MapSpec, emit_text, parse_text
from .harmonic import AffineMap, post_affine, rotate_antianalytic

#: witness used for the bundled equal pair
WITNESS_AFFINE = AffineMap(0.4, 1, 1 - 1j)
WITNESS_MU = cmath.exp(1j * cmath.pi / 3)

#: names of the single-map documents, in file order
BASE_NAMES = (
    "exp",
    "mobius",
    "poly",
    "const_real",
    "const_complex",
    "omega_z",
    "omega_z2",
    "omega_form",
    "exp_pair",
    "mobius_pair",
)
#: base maps whose dilatation is constant (analytic maps have omega = 0)
CONSTANT_NAMES = BASE_NAMES[:5]
NONCONSTANT_NAMES = BASE_NAMES[5:]


def _poly(*cs):
    return Polynomial(tuple(cs))


def _base_specs() -> Dict[str, MapSpec]:
    zero = Constant(0)
    cubic = _poly(0, 1, 0, 0.1)
    exp_m1 = Exp() - 1
    return {
        "exp": MapSpec(h=Exp(), g=zero),
        "mobius": MapSpec(h=MobiusLeaf(Mobius(1, 0, -0.5, 1)), g=zero),
        "poly": MapSpec(h=_poly(0, 1, 0.25, 0.1), g=zero),
        "const_real": MapSpec(h=cubic, g=Scale(0.3, cubic)),
        "const_complex": MapSpec(h=exp_m1, g=Scale(0.2 - 0.1j, exp_m1)),
        "omega_z": MapSpec(h=_poly(0, 1), g=_poly(0, 0, 0.5)),
        "omega_z2": MapSpec(h=_poly(0, 1), g=_poly(0, 0, 0, 1 / 3)),
        "omega_form": MapSpec(h=_poly(0, 1, 0.5), omega=_poly(0, 1)),
        "exp_pair": MapSpec(h=Exp(), g=Scale(0.15, Compose(Exp(), Scale(2, Identity())))),
        "mobius_pair": MapSpec(h=MobiusLeaf(Mobius(1, 0, -1 / 3, 1)), g=_poly(0, 0, 0.25)),
    }


def _spec_of(f) -> MapSpec:
    return MapSpec(h=f.h, g=f.g)


def build_documents() -> List[MapDocument]:
    base = _base_specs()
    docs = [MapDocument({name: base[name]}) for name in BASE_NAMES]

    f1 = base["omega_z"].build()
    f2 = post_affine(WITNESS_AFFINE, rotate_antianalytic(WITNESS_MU, f1))
    docs.append(MapDocument({"f1": base["omega_z"], "f2": _spec_of(f2)}))

    docs.append(MapDocument({"f1": base["omega_z"], "f2": base["omega_z2"]}))

    # alpha conj(h) + h + gamma  <->  g = conj(alpha) h + conj(gamma)
    h = _poly(0, 1, 0, 0.1)
    Th = Compose(MobiusLeaf(Mobius(1, 0.1, -0.3, 1)), h)
    docs.append(
        MapDocument(
            {
                "f1": MapSpec(h=h, g=Scale(0.3, h) + Constant(-0.1j)),
                "f2": MapSpec(h=Th, g=Scale(0.2 + 0.1j, Th) + Constant(0.2)),
            }
        )
    )
    return docs


def load_corpus() -> List[MapDocument]:
    text = resources.files("hschwarz").joinpath("data/corpus.jsonl").read_text(encoding="utf-8")
    return parse_text(text)


def corpus_maps() -> Dict[str, MapSpec]:
    """The ten single-map corpus entries by name."""
    docs = load_corpus()
    return {name: docs[k].maps[name] for k, name in enumerate(BASE_NAMES)}


def corpus_pairs() -> Dict[str, MapDocument]:
    docs = load_corpus()[len(BASE_NAMES):]
    return dict(zip(("witness", "omega_z_vs_z2", "constant_family"), docs))


def main(argv=None):
    out = sys.argv[1] if argv is None and len(sys.argv) > 1 else (argv or [None])[0]
    text = emit_text(build_documents())
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    main()
