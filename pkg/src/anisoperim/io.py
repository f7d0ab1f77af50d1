"""Plain-text readers and writers for curves, fields, profiles and reports.

All writers emit deterministic output: fixed column order, LF newlines and
shortest round-trip float formatting, so repeated runs produce byte
identical files.

Formats
-------
curve      text, one "x y" vertex per line, "#" starts a comment
field      CSV with header x,y,u in grid order, plus a JSON sidecar
           (suffix .meta.json) holding origin, spacing, shape and the
           name of the domain curve file stored alongside
profile    CSV t,mu,lambda,lambda_prime,mu_prime
radial     CSV s,value,derivative
checks     CSV check,value,tolerance,status
compare    CSV s,u_sharp,v_sharp,margin
"""

from __future__ import annotations

import csv
import json
import os

import numpy as np

from .errors import InvalidDataError
from .fields import ScalarField
from .geometry import ConvexCurve
from .rearrange import RadialProfile


def _fmt(x) -> str:
    return f"{float(x):.17g}"


def write_curve(path, curve: ConvexCurve, comment=""):
    with open(path, "w", newline="\n") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        for x, y in curve.vertices:
            fh.write(f"{_fmt(x)} {_fmt(y)}\n")


def read_curve(path) -> ConvexCurve:
    rows = []
    with open(path) as fh:
        for line in fh:
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            parts = body.split()
            if len(parts) != 2:
                raise InvalidDataError(f"expected 'x y' per line, got {line!r}")
            rows.append([float(parts[0]), float(parts[1])])
    if len(rows) < 3:
        raise InvalidDataError(f"{path}: fewer than three vertices")
    return ConvexCurve(np.asarray(rows))


def _meta_path(field_path) -> str:
    return str(field_path) + ".meta.json"


def write_field(path, field: ScalarField):
    """Write grid values as CSV plus the sidecar metadata and domain files."""
    path = str(path)
    domain_name = os.path.basename(path) + ".domain.txt"
    write_curve(os.path.join(os.path.dirname(path) or ".", domain_name),
                field.domain)
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["x", "y", "u"])
        for i in range(field.nx):
            x = field.xs[i]
            for j in range(field.ny):
                out.writerow([_fmt(x), _fmt(field.ys[j]), _fmt(field.values[i, j])])
    meta = {
        "origin": [field.origin[0], field.origin[1]],
        "h": field.h,
        "nx": field.nx,
        "ny": field.ny,
        "domain": domain_name,
        "name": field.name,
    }
    with open(_meta_path(path), "w", newline="\n") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_field(path) -> ScalarField:
    path = str(path)
    try:
        with open(_meta_path(path)) as fh:
            meta = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidDataError(f"cannot load field metadata: {exc}") from exc
    domain = read_curve(os.path.join(os.path.dirname(path) or ".", meta["domain"]))
    nx, ny = int(meta["nx"]), int(meta["ny"])
    values = np.empty((nx, ny))
    with open(path, newline="") as fh:
        rows = csv.reader(fh)
        header = next(rows, None)
        if header != ["x", "y", "u"]:
            raise InvalidDataError(f"{path}: expected header x,y,u")
        flat = [row[2] for row in rows]
    if len(flat) != nx * ny:
        raise InvalidDataError(f"{path}: expected {nx * ny} rows, got {len(flat)}")
    values[:] = np.asarray(flat, dtype=float).reshape(nx, ny)
    return ScalarField.from_grid(domain, meta["origin"], float(meta["h"]),
                                 values, name=meta.get("name", ""))


def write_table(path, header, rows):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(header)
        for row in rows:
            out.writerow([cell if isinstance(cell, str) else _fmt(cell)
                          for cell in row])


def write_profile(path, profile):
    write_table(path, ["t", "mu", "lambda", "lambda_prime", "mu_prime"],
               zip(profile.t, profile.mu, profile.lam,
                   profile.lam_prime, profile.mu_prime))


def write_radial(path, profile: RadialProfile):
    write_table(path, ["s", "value", "derivative"],
               zip(profile.s, profile.value, profile.derivative))


def read_radial(path, kind="radial", strict_domain=False) -> RadialProfile:
    s, value, deriv = [], [], []
    with open(path, newline="") as fh:
        rows = csv.reader(fh)
        header = next(rows, None)
        if header != ["s", "value", "derivative"]:
            raise InvalidDataError(f"{path}: expected header s,value,derivative")
        for row in rows:
            s.append(float(row[0]))
            value.append(float(row[1]))
            deriv.append(float(row[2]))
    return RadialProfile(kind, np.asarray(s), np.asarray(value),
                         np.asarray(deriv), strict_domain=strict_domain)


def write_checks(path, rows):
    """rows: iterables (name, value, tolerance, passed)."""
    write_table(path, ["check", "value", "tolerance", "status"],
               [(name, value, tol, "pass" if ok else "fail")
                for name, value, tol, ok in rows])


def write_comparison(path, rows):
    """rows: iterables (s, u_sharp, v_sharp, margin)."""
    write_table(path, ["s", "u_sharp", "v_sharp", "margin"], rows)
