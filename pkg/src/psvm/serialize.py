"""JSON fit artifacts.

Floats are written with ``repr`` precision, so a round trip reproduces
predictions bit for bit.  Every artifact carries ``spec_version``; loading
a different version raises :class:`SchemaMismatch`.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .exceptions import SchemaMismatch
from .kernel import KernelBasis, KernelFit, KernelSpec, gram
from .linear import SdrFit

__all__ = ["SPEC_VERSION", "fit_to_dict", "fit_from_dict", "save_fit", "load_fit"]

SPEC_VERSION = "1.0"


def _arr(a) -> list | None:
    return None if a is None else np.asarray(a, dtype=float).tolist()


def fit_to_dict(fit, **meta) -> dict:
    """Serializable form of a linear/baseline :class:`SdrFit` or a :class:`KernelFit`."""
    if isinstance(fit, SdrFit):
        out = {
            "spec_version": SPEC_VERSION,
            "kind": "linear",
            "method": fit.method,
            "scheme": fit.scheme,
            "cost": fit.cost,
            "h": fit.h,
            "n_features": int(fit.directions.shape[0]),
            "dim": fit.dim,
            "eigvals": _arr(fit.eigvals),
            "directions": _arr(fit.directions),
            "m_hat": _arr(fit.m_hat),
        }
    elif isinstance(fit, KernelFit):
        b = fit.basis
        out = {
            "spec_version": SPEC_VERSION,
            "kind": "kernel",
            "method": "kpsvm",
            "scheme": fit.scheme,
            "cost": fit.cost,
            "h": fit.h,
            "n_features": int(b.anchors.shape[1]),
            "dim": fit.dim,
            "kernel": b.spec.to_dict(),
            "k": b.k,
            "rank_deficient": b.rank_deficient,
            "basis_eigvals": _arr(b.eigvals),
            "w": _arr(b.w),
            "anchors": _arr(b.anchors),
            "kbar": _arr(b.kbar),
            "col_means": _arr(fit.col_means),
            "col_sds": _arr(fit.col_sds),
            "coefs": _arr(fit.coefs),
            "eigvals": _arr(fit.eigvals),
            "v": _arr(fit.v),
        }
    else:
        raise TypeError(f"cannot serialize {type(fit).__name__}")
    out.update(meta)
    return out


def _need(doc: dict, *keys):
    missing = [k for k in keys if k not in doc]
    if missing:
        raise SchemaMismatch(f"artifact lacks fields {missing}")
    return [doc[k] for k in keys]


def _mat(v) -> np.ndarray:
    return np.asarray(v, dtype=float)


def fit_from_dict(doc: dict):
    version = doc.get("spec_version")
    if version != SPEC_VERSION:
        raise SchemaMismatch(f"artifact spec_version {version!r}, expected {SPEC_VERSION!r}")
    kind = doc.get("kind")
    if kind == "linear":
        method, eigvals, directions, m_hat = _need(doc, "method", "eigvals", "directions", "m_hat")
        return SdrFit(
            method=method,
            m_hat=_mat(m_hat),
            eigvals=_mat(eigvals),
            directions=_mat(directions),
            scheme=doc.get("scheme"),
            cost=doc.get("cost"),
            h=doc.get("h"),
        )
    if kind == "kernel":
        kern, w, anchors, ev, v, coefs = _need(doc, "kernel", "w", "anchors", "basis_eigvals", "v", "coefs")
        spec = KernelSpec(**kern)
        anchors = _mat(anchors)
        if "kbar" in doc:
            kbar = _mat(doc["kbar"])
        else:
            K = gram(spec, anchors, anchors)
            kbar = ((K + K.T) / 2).mean(axis=0)
        basis = KernelBasis(
            spec=spec,
            anchors=anchors,
            eigvals=_mat(ev),
            w=_mat(w),
            kbar=kbar,
            rank_deficient=bool(doc.get("rank_deficient", False)),
        )
        mu, sd = doc.get("col_means"), doc.get("col_sds")
        return KernelFit(
            basis=basis,
            coefs=_mat(coefs),
            eigvals=_mat(doc.get("eigvals", [])),
            v=_mat(v),
            scheme=doc.get("scheme"),
            cost=doc.get("cost"),
            h=doc.get("h"),
            col_means=None if mu is None else _mat(mu),
            col_sds=None if sd is None else _mat(sd),
        )
    raise SchemaMismatch(f"unknown artifact kind {kind!r}")


def save_fit(fit, path: str | Path, **meta) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(fit_to_dict(fit, **meta), fh, indent=1)
        fh.write("\n")


def load_fit(path: str | Path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaMismatch(f"not a JSON artifact: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaMismatch("artifact must be a JSON object")
    return fit_from_dict(doc)
