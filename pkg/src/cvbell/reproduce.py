"""Datasets behind the tables, figures and critical values, plus I/O helpers."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Any

import numpy as np

from . import approx, imperfect, noise
from .imperfect import FaultyGenerator, SuppressionModel
from .pseudospin import chi_of, gain
from .specfun import DEFAULT, SeriesControl
from .states import PhotonVariedState

TABLE_R = (0.2, 0.5, 0.8, 1.2)
TABLE_K = (2, 5, 10, 15)


@dataclass
class Dataset:
    columns: list[str]
    rows: list[tuple] = field(default_factory=list)

    def add(self, *row):
        if len(row) != len(self.columns):
            raise ValueError(f"row has {len(row)} fields, expected {len(self.columns)}")
        self.rows.append(row)


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isinf(v) or math.isnan(v):
            return str(v)
        return format(v, ".12g")
    return str(v)


def to_csv(ds: Dataset) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ds.columns)
    for row in ds.rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return None if math.isnan(v) else float(fmt(v)) if math.isfinite(v) else str(v)
    if isinstance(v, np.integer):
        return int(v)
    return v


def to_json(obj: Dataset | dict) -> str:
    if isinstance(obj, Dataset):
        obj = [dict(zip(obj.columns, row)) for row in obj.rows]
    return json.dumps(_jsonable(obj), indent=2, sort_keys=isinstance(obj, dict)) + "\n"


# ---------------------------------------------------------------- configs

def parse_value(text: str) -> list:
    """``a, b, c`` lists and inclusive integer ranges ``lo:hi``."""
    out: list = []
    for part in (p.strip() for p in text.split(",")):
        if not part:
            continue
        if ":" in part:
            lo, hi = (int(t) for t in part.split(":"))
            out.extend(range(lo, hi + 1))
        else:
            num = float(part)
            out.append(int(num) if num.is_integer() and "." not in part else num)
    if not out:
        raise ValueError(f"empty value {text!r}")
    return out


def parse_config(text: str) -> dict[str, Any]:
    cfg: dict[str, Any] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        cfg[key] = val
    return cfg


def load_figure_config(fig: int, overrides: dict[str, str] | None = None) -> dict[str, list]:
    text = resources.files("cvbell.configs").joinpath(f"fig{fig}.cfg").read_text()
    raw = parse_config(text)
    raw.update(overrides or {})
    return {k: (parse_value(v) if k != "policy" and k != "model" else v) for k, v in raw.items()}


# ---------------------------------------------------------------- table and figures

def table1(ctrl: SeriesControl = DEFAULT) -> Dataset:
    """Gain of the k-photon-added over the bare squeezed state, in percent."""
    ds = Dataset(["r", "k", "gain_percent", "rounded"])
    for r in TABLE_R:
        ref = chi_of(PhotonVariedState.from_r(r), ctrl)
        for k in TABLE_K:
            g = 100 * gain(chi_of(PhotonVariedState.from_r(r, k, 0), ctrl), ref)
            ds.add(r, k, g, f"{g:.1f}")
    return ds


def fig1(cfg, ctrl):
    ds = Dataset(["r", "k", "series", "chi"])
    for r in cfg["r"]:
        for k in cfg["k"]:
            ds.add(r, k, "add", chi_of(PhotonVariedState.from_r(r, k, 0), ctrl))
    return ds


def fig2(cfg, ctrl):
    ds = Dataset(["r", "k", "series", "chi"])
    kmax = cfg["k_max"][0]
    for r in cfg["r"]:
        for label, start in (("even", 0), ("odd", 1)):
            for k in range(start, kmax + 1, 2):
                ds.add(r, k, label, chi_of(PhotonVariedState.from_r(r, k, 0), ctrl))
    return ds


def _distributed(ds, r, total, ctrl):
    for k in range(total + 1):
        ds.add(r, total, k, "add", chi_of(PhotonVariedState.from_r(r, k, total - k), ctrl))
        ds.add(r, total, k, "sub", chi_of(PhotonVariedState.from_r(r, -k, k - total), ctrl))


def fig3(cfg, ctrl):
    ds = Dataset(["r", "total", "k", "series", "chi"])
    for r in cfg["r"]:
        for total in cfg["total"]:
            _distributed(ds, r, total, ctrl)
    return ds


def fig4(cfg, ctrl):
    ds = Dataset(["r", "total", "k", "series", "chi"])
    for total in cfg["total"]:
        for r in cfg["r"]:
            _distributed(ds, r, total, ctrl)
    return ds


def fig5(cfg, ctrl):
    ds = Dataset(["panel", "r", "r_actual", "k", "series", "chi"])
    r = cfg["r"][0]
    for rp in cfg["r_actual"]:
        gen = FaultyGenerator(r, rp)
        for k in cfg["k"]:
            ds.add("a", r, rp, k, "perfect", imperfect.chi_faulty_added(gen, k, ctrl))
    gen = FaultyGenerator(r, cfg["r_actual_b"][0])
    for kind, key in (("exponential", "lambda"), ("gaussian", "sigma")):
        for d in cfg[key]:
            label = f"{'ES' if kind == 'exponential' else 'GS'}_{fmt(d)}"
            for k in cfg["k"]:
                chi = imperfect.chi_imperfect_faulty(gen, k, SuppressionModel(kind, d, k), ctrl)
                ds.add("b", r, gen.r_actual, k, label, chi)
    return ds


def fig6(cfg, ctrl):
    ds = Dataset(["panel", "r", "p", "beta1", "beta2", "k", "series", "chi"])
    for panel in ("a", "b"):
        r, p, b1, b2 = cfg[f"panel_{panel}"]
        base = noise.thermal_model(r, p, b1, b2)
        for k in cfg["k"]:
            ds.add(panel, r, p, b1, b2, k, "perfect",
                   noise.chi_known(noise.ab_of(base.with_k(k), ctrl)))
        for kind, key in (("exponential", "lambda"), ("gaussian", "sigma")):
            for d in cfg[key]:
                label = f"{'ES' if kind == 'exponential' else 'GS'}_{fmt(d)}"
                for k in cfg["k"]:
                    chi = imperfect.chi_imperfect_noisy(base, k, SuppressionModel(kind, d, k), ctrl)
                    ds.add(panel, r, p, b1, b2, k, label, chi)
    return ds


FIGURES = {1: fig1, 2: fig2, 3: fig3, 4: fig4, 5: fig5, 6: fig6}


def figure(fig: int, overrides: dict[str, str] | None = None,
           ctrl: SeriesControl = DEFAULT) -> Dataset:
    if fig not in FIGURES:
        raise ValueError(f"unknown figure {fig}; choose 1-6")
    return FIGURES[fig](load_figure_config(fig, overrides), ctrl)


# ---------------------------------------------------------------- reports

def criticals(ctrl: SeriesControl = DEFAULT) -> dict:
    def pack(res: approx.CriticalResult) -> dict:
        return {"x": res.x_critical, "r": res.r_critical, "bracket_width": res.bracket_width}

    out: dict[str, Any] = {}
    for name, fn in approx.CRITICALS.items():
        a, e = fn(False, ctrl), fn(True, ctrl)
        out[name] = {"approx": pack(a), "exact": pack(e), "r_gap": e.r_critical - a.r_critical}
    out["faulty_r0.75"] = imperfect.critical_rprime(0.75)
    out["faulty_epr"] = 0.5 * math.atanh(math.sqrt(2) - 1)
    return out


def thresholds(model: str = "thermal", r: float = 1.25, beta1: float = 3.0,
               beta2: float = 5.0, sigma1: float = 1.0, sigma2: float = 1.0, k: int = 0,
               ctrl: SeriesControl = DEFAULT) -> dict:
    """Critical mixing probabilities under both policies."""
    if model == "thermal":
        m = noise.thermal_model(r, 0.0, beta1, beta2, k)
        params = {"r": r, "beta1": beta1, "beta2": beta2, "k": k}
    elif model == "gaussian":
        m = noise.gaussian_model(r, 0.0, sigma1, sigma2, k)
        params = {"r": r, "sigma1": sigma1, "sigma2": sigma2, "k": k}
    elif model == "correlated":
        m = noise.correlated_model(r, 0.0, k=k)
        params = {"r": r, "k": k}
    else:
        raise ValueError(f"unknown noise model {model!r}")
    a, b = noise.threshold_parameters(m, ctrl)
    return {
        "model": model, "params": params, "a": a, "b": b,
        "known": noise.p_threshold(a, b, "known"),
        "unknown": noise.p_threshold(a, b, "unknown"),
    }


# ---------------------------------------------------------------- sweeps

SWEEP_KEYS = {"model", "policy", "r", "r_actual", "k", "l", "p", "beta1", "beta2",
              "sigma1", "sigma2", "lambda", "sigma", "m"}


def sweep(cfg_text: str, overrides: dict[str, str] | None = None,
          ctrl: SeriesControl = DEFAULT) -> Dataset:
    """Grid evaluation from a key=value configuration.

    ``model`` is one of pure, thermal, gaussian, correlated, faulty.
    Suppression (``lambda`` or ``sigma`` with cutoff ``m``) applies to the
    thermal, gaussian, correlated and faulty models.
    """
    raw = parse_config(cfg_text)
    raw.update(overrides or {})
    unknown = set(raw) - SWEEP_KEYS
    if unknown:
        raise ValueError(f"unknown sweep keys: {', '.join(sorted(unknown))}")
    model = raw.pop("model", "pure").strip()
    policy = raw.pop("policy", "known").strip()
    if policy not in ("known", "unknown"):
        raise ValueError(f"policy must be known or unknown, got {policy!r}")
    grid = {k: parse_value(v) for k, v in raw.items()}
    if "lambda" in grid and "sigma" in grid:
        raise ValueError("give either lambda or sigma, not both")
    defaults = {"pure": {"k": [0], "l": [0]},
                "thermal": {"k": [0], "p": [0.0], "beta1": [1.0], "beta2": [1.0]},
                "gaussian": {"k": [0], "p": [0.0], "sigma1": [1.0], "sigma2": [1.0]},
                "correlated": {"k": [0], "p": [0.0]},
                "faulty": {"k": [0]}}
    if model not in defaults:
        raise ValueError(f"unknown model {model!r}")
    if "r" not in grid:
        raise ValueError("sweep needs r")
    if model == "faulty" and "r_actual" not in grid:
        raise ValueError("faulty sweeps need r_actual")
    for key, val in defaults[model].items():
        grid.setdefault(key, val)
    sup_key = "lambda" if "lambda" in grid else "sigma" if "sigma" in grid else None
    keys = sorted(grid)
    ds = Dataset(keys + ["series", "chi"])
    for combo in _product([grid[k] for k in keys]):
        point = dict(zip(keys, combo))
        ds.add(*combo, model, _evaluate(model, policy, point, sup_key, ctrl))
    return ds


def _product(lists):
    if not lists:
        yield ()
        return
    for head in lists[0]:
        for tail in _product(lists[1:]):
            yield (head,) + tail


def _evaluate(model, policy, pt, sup_key, ctrl):
    k = int(pt["k"])
    sup = None
    if sup_key:
        kind = "exponential" if sup_key == "lambda" else "gaussian"
        sup = SuppressionModel(kind, pt[sup_key], int(pt.get("m", abs(k))))
    if model == "pure":
        return chi_of(PhotonVariedState.from_r(pt["r"], k, int(pt["l"])), ctrl)
    if model == "faulty":
        gen = FaultyGenerator(pt["r"], pt["r_actual"])
        if sup is None:
            return imperfect.chi_faulty_added(gen, k, ctrl)
        return imperfect.chi_imperfect_faulty(gen, k, sup, ctrl)
    if model == "thermal":
        m = noise.thermal_model(pt["r"], pt["p"], pt["beta1"], pt["beta2"], k, policy)
    elif model == "gaussian":
        m = noise.gaussian_model(pt["r"], pt["p"], pt["sigma1"], pt["sigma2"], k, policy)
    else:
        m = noise.correlated_model(pt["r"], pt["p"], k=k, policy=policy)
    if sup is None:
        return noise.chi_model(m, ctrl)
    if policy != "known":
        raise ValueError("imperfect operations are evaluated with known p only")
    return imperfect.chi_imperfect_noisy(m, k, sup, ctrl)
