"""JSON schemas for matrices, tuples, POVMs and certificates.

Matrix: ``{"d": 2, "re": [[...], ...], "im": [[...], ...]}`` (row-major,
``im`` optional). Every other object nests matrices:

* tuple: ``{"g", "d", "components": [matrix, ...]}``
* effect tuple: ``{"g", "d", "effects": [matrix, ...]}``
* POVM family: ``{"g", "d", "outcome_counts", "povms": [[matrix, ...], ...]}``
* joint POVM: ``{"kind", "d", "labels": [[...], ...], "operators": [matrix, ...]}``
* witness certificate: ``{"value", "state": matrix, "components": tuple}``

Artifacts are written at full double precision so they re-ingest exactly.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import InvalidInput
from .hermit import hermitian
from .measure import EffectTuple, GeneralPovmFamily, JointPovm
from .norms import CompatDecomposition, ObservableTuple, WitnessCertificate


def _field(doc: dict, key: str, where: str):
    if not isinstance(doc, dict):
        raise InvalidInput(f"{where}: expected a JSON object")
    if key not in doc:
        raise InvalidInput(f"{where}: missing field '{key}'")
    return doc[key]


def matrix_to_json(a: np.ndarray) -> dict:
    a = np.asarray(a, dtype=complex)
    return {"d": int(a.shape[0]), "re": a.real.tolist(), "im": a.imag.tolist()}


def matrix_from_json(doc: dict, where: str = "matrix") -> np.ndarray:
    d = _field(doc, "d", where)
    try:
        re = np.asarray(_field(doc, "re", where), dtype=float)
        im = np.asarray(doc.get("im", np.zeros_like(re)), dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"{where}: 're'/'im' must be numeric arrays ({exc})") from None
    if re.shape != (d, d):
        raise InvalidInput(f"{where}.re: expected shape {(d, d)}, got {re.shape}")
    if im.shape != (d, d):
        raise InvalidInput(f"{where}.im: expected shape {(d, d)}, got {im.shape}")
    try:
        return hermitian(re + 1j * im)
    except InvalidInput as exc:
        raise InvalidInput(f"{where}: {exc}") from None


def _matrix_list(docs, where: str) -> np.ndarray:
    if not isinstance(docs, list) or not docs:
        raise InvalidInput(f"{where}: expected a non-empty list of matrices")
    mats = [matrix_from_json(m, f"{where}[{i}]") for i, m in enumerate(docs)]
    d = mats[0].shape[0]
    for i, m in enumerate(mats):
        if m.shape[0] != d:
            raise InvalidInput(f"{where}[{i}]: dimension {m.shape[0]} differs from {d}")
    return np.array(mats)


def _check_gd(doc: dict, arr: np.ndarray, where: str) -> None:
    g, d = doc.get("g"), doc.get("d")
    if g is not None and g != arr.shape[0]:
        raise InvalidInput(f"{where}.g = {g} but {arr.shape[0]} matrices were given")
    if d is not None and d != arr.shape[1]:
        raise InvalidInput(f"{where}.d = {d} but matrices have dimension {arr.shape[1]}")


def tuple_to_json(a: ObservableTuple) -> dict:
    return {"g": a.g, "d": a.d, "components": [matrix_to_json(c) for c in a]}


def tuple_from_json(doc: dict, where: str = "tuple") -> ObservableTuple:
    arr = _matrix_list(_field(doc, "components", where), f"{where}.components")
    _check_gd(doc, arr, where)
    return ObservableTuple(arr)


def effects_to_json(e: EffectTuple) -> dict:
    return {"g": e.g, "d": e.d, "effects": [matrix_to_json(x) for x in e.effects]}


def effects_from_json(doc: dict, where: str = "effects") -> EffectTuple:
    arr = _matrix_list(_field(doc, "effects", where), f"{where}.effects")
    _check_gd(doc, arr, where)
    return EffectTuple(arr)


def povms_to_json(f: GeneralPovmFamily) -> dict:
    return {
        "g": f.g,
        "d": f.d,
        "outcome_counts": list(f.outcome_counts),
        "povms": [[matrix_to_json(x) for x in p] for p in f.povms],
    }


def povms_from_json(doc: dict, where: str = "povms") -> GeneralPovmFamily:
    povms = _field(doc, "povms", where)
    if not isinstance(povms, list) or not povms:
        raise InvalidInput(f"{where}.povms: expected a non-empty list")
    arrs = tuple(_matrix_list(p, f"{where}.povms[{i}]") for i, p in enumerate(povms))
    counts = doc.get("outcome_counts")
    if counts is not None and list(counts) != [a.shape[0] for a in arrs]:
        raise InvalidInput(f"{where}.outcome_counts does not match the POVM lengths")
    return GeneralPovmFamily(arrs)


def family_from_json(doc: dict, where: str = "input") -> GeneralPovmFamily:
    """Accept either an effect tuple or a POVM family."""
    if isinstance(doc, dict) and "effects" in doc:
        return effects_from_json(doc, where).to_povms()
    return povms_from_json(doc, where)


def joint_to_json(j: JointPovm) -> dict:
    return {
        "kind": j.kind,
        "d": int(j.operators.shape[1]),
        "labels": [list(lab) for lab in j.labels],
        "operators": [matrix_to_json(x) for x in j.operators],
    }


def joint_from_json(doc: dict, where: str = "joint") -> JointPovm:
    labels = tuple(tuple(int(v) for v in lab) for lab in _field(doc, "labels", where))
    ops = _matrix_list(_field(doc, "operators", where), f"{where}.operators")
    if len(labels) != len(ops):
        raise InvalidInput(f"{where}: {len(labels)} labels for {len(ops)} operators")
    return JointPovm(labels, ops, kind=doc.get("kind", "signs"))


def witness_to_json(w: WitnessCertificate) -> dict:
    return {"value": w.value, "state": matrix_to_json(w.state), "components": tuple_to_json(w.components)}


def witness_from_json(doc: dict, where: str = "witness") -> WitnessCertificate:
    state = matrix_from_json(_field(doc, "state", where), f"{where}.state")
    comps = tuple_from_json(_field(doc, "components", where), f"{where}.components")
    return WitnessCertificate(state, comps, float(doc.get("value", "nan")))


def decomposition_to_json(c: CompatDecomposition) -> dict:
    return {
        "value": c.value,
        "signs": c.signs.astype(int).tolist(),
        "blocks": [matrix_to_json(k) for k in c.blocks],
    }


def decomposition_from_json(doc: dict, where: str = "decomposition") -> CompatDecomposition:
    signs = np.asarray(_field(doc, "signs", where), dtype=float)
    blocks = _matrix_list(_field(doc, "blocks", where), f"{where}.blocks")
    return CompatDecomposition(signs, blocks, float(_field(doc, "value", where)))


def load_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def save_json(doc: dict, path) -> str:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
    return str(path)
