"""Regenerate the JSON fixtures shipped in src/conesheaf/fixtures."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from conesheaf import groups
from conesheaf.finspace import FinMap, FinSpace, cone_from_dicts, pushforward, product_space
from conesheaf.matstar import SIGMA_X, SIGMA_Y, SIGMA_Z, PartitionOfUnity
from conesheaf.piecewise import ks18_system
from conesheaf.serialize import (
    SCHEMA,
    cone_to_json,
    dumps,
    group_to_json,
    matrix_to_json,
    pou_to_json,
    quotient_to_json,
    rays_to_json,
)

OUT = Path(__file__).resolve().parents[1] / "src" / "conesheaf" / "fixtures"


def write(name: str, doc) -> None:
    (OUT / name).write_text(dumps(doc), encoding="utf-8")


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    X = FinSpace("X", ("0", "1", "2", "3"))
    Y = FinSpace("Y", ("01", "2", "3"))
    Z = FinSpace("Z", ("0", "1", "23"))
    ex = cone_from_dicts(
        X,
        [(Y, {"0": "01", "1": "01", "2": "2", "3": "3"}), (Z, {"0": "0", "1": "1", "2": "23", "3": "23"})],
    )
    write("ex4to3.json", cone_to_json(ex))
    Xp = FinSpace("Xp", ("0", "12", "3"))
    merge = FinMap.from_dict(X, Xp, {"0": "0", "1": "12", "2": "12", "3": "3"})
    write("ex4to3_merge.json", quotient_to_json(merge))
    write("ex4to3_pushed.json", cone_to_json(pushforward(ex, merge)))
    write("identity_quotient.json", quotient_to_json(FinMap(X, FinSpace("Xid", X.points), tuple(range(4)))))

    bit = FinSpace("bit", ("0", "1"))
    cube = product_space([bit, bit, bit], "cube")
    sq = FinSpace("sq", ("00", "01", "10", "11"))
    legs = []
    for i, j in ((0, 1), (0, 2), (1, 2)):
        legs.append((sq, {p: p[1 + 2 * i] + p[1 + 2 * j] for p in cube.points}))
    face = cone_from_dicts(cube, legs)
    write("facecone.json", cone_to_json(face))
    D = FinSpace("D", ("0", "1", "2", "3"))
    digits = FinMap.from_dict(cube, D, {p: str(sum(int(c) for c in p if c in "01")) for p in cube.points})
    write("digitsum.json", quotient_to_json(digits))

    two = FinSpace("T", ("0", "1"))
    sq2 = product_space([two, two], "P")
    prod = cone_from_dicts(sq2, [(two, {p: p[1] for p in sq2.points}), (two, {p: p[3] for p in sq2.points})])
    write("prodcone22.json", cone_to_json(prod))

    three = FinSpace("X", ("0", "1", "2"))
    legs3 = []
    for k, name in enumerate(("Y1", "Y2", "Y3")):
        cod = FinSpace(name, ("0", "1"))
        legs3.append((cod, {p: "1" if int(p) == k else "0" for p in three.points}))
    write("three_surj.json", cone_to_json(cone_from_dicts(three, legs3)))

    for g in groups.small_groups().values():
        write(f"{g.name.lower()}.json", group_to_json(g))

    write("ks18.json", rays_to_json(ks18_system()))

    write(
        "pauli.json",
        {"schema": SCHEMA, "matrices": [matrix_to_json(m) for m in (SIGMA_X, SIGMA_Y, SIGMA_Z)]},
    )
    write(
        "commuting_pair.json",
        {"schema": SCHEMA, "matrices": [matrix_to_json(np.diag([1, 2])), matrix_to_json(np.diag([3, 4]))]},
    )
    write(
        "fc_identity_table.json",
        {
            "schema": SCHEMA,
            "matrix": matrix_to_json(np.diag([1, 2])),
            "matrix2": matrix_to_json(np.diag([3, 4])),
            "table": [[[1.0, 0.0], [1.0, 0.0]], [[2.0, 0.0], [2.0, 0.0]]],
        },
    )
    p = PartitionOfUnity.from_dict(two, {"0": np.diag([1, 0]), "1": np.diag([0, 1])})
    h = 0.5 * np.ones((2, 2))
    q = PartitionOfUnity.from_dict(two, {"0": h, "1": np.eye(2) - h})
    doc = {"schema": SCHEMA, "cone": cone_to_json(prod), "family": [pou_to_json(p), pou_to_json(q)]}
    write("prodcone_family.json", doc)


if __name__ == "__main__":
    main()
