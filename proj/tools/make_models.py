#!/usr/bin/env python3
"""Writes the model files under data/models.

The four large models only reproduce the dimensions (states, modes,
coupling degree) of published systems. Their couplings are synthetic
placeholders drawn from a seeded generator at typical magnitudes; they are
not physical parameters of those molecules.
"""

import argparse
import json
from pathlib import Path

import numpy as np

PLACEHOLDER_NOTE = (
    "Synthetic placeholder couplings at typical magnitudes; only the number of "
    "states, modes and the coupling degree correspond to the named system."
)


def coupling(bra, ket, powers, value):
    return {"bra": bra, "ket": ket, "powers": [list(p) for p in powers], "value": round(float(value), 6)}


def vibronic_model(name, n_states, n_modes, degree, seed, *, linear_fraction, bilinear_fraction, scale=1.0,
                   freq_range=(0.02, 0.20)):
    """Random LVC (degree 1) or QVC (degree 2) model in eV.

    Every state gets a vertical energy and intrastate gradients on a subset
    of modes; every state pair gets a constant coupling and interstate
    gradients on a smaller subset. QVC models add diagonal curvature on every
    mode and a sparse set of bilinear terms. `scale` multiplies every
    coupling and `freq_range` bounds the mode frequencies; together they set
    the empirical Trotter step count.
    """
    rng = np.random.default_rng(seed)
    modes = np.sort(rng.uniform(*freq_range, n_modes))[::-1]
    records = []
    energies = np.sort(rng.uniform(0.0, 0.6, n_states))[::-1]
    for j in range(n_states):
        records.append(coupling(j, j, [], energies[j]))
        for r in range(n_modes):
            if rng.random() < linear_fraction:
                records.append(coupling(j, j, [(r, 1)], rng.normal(0.0, 0.06)))
            if degree >= 2:
                records.append(coupling(j, j, [(r, 2)], rng.normal(0.0, 0.004)))
        if degree >= 2:
            for r in range(n_modes):
                for s in range(r + 1, n_modes):
                    if rng.random() < bilinear_fraction:
                        records.append(coupling(j, j, [(r, 1), (s, 1)], rng.normal(0.0, 0.003)))
    for j in range(n_states):
        for i in range(j + 1, n_states):
            records.append(coupling(j, i, [], rng.normal(0.0, 0.05)))
            for r in range(n_modes):
                if rng.random() < 0.5 * linear_fraction:
                    records.append(coupling(j, i, [(r, 1)], rng.normal(0.0, 0.02)))
    for rec in records:
        rec["value"] = round(rec["value"] * scale, 6)
    return {
        "name": name,
        "note": PLACEHOLDER_NOTE,
        "states": n_states,
        "unit": "eV",
        "max_degree": degree,
        "modes": [round(float(w), 6) for w in modes],
        "couplings": records,
    }


def toy_models():
    """Small hand-written models for tests and demos."""
    out = {}
    out["toy_2state"] = {
        "name": "two-state toy",
        "states": 2,
        "unit": "au",
        "max_degree": 2,
        "modes": [1.0],
        "couplings": [
            coupling(0, 0, [], 0.3),
            coupling(1, 1, [], -0.2),
            coupling(0, 0, [(0, 1)], 0.4),
            coupling(1, 1, [(0, 1)], -0.3),
            coupling(0, 1, [], 0.25),
            coupling(0, 1, [(0, 1)], 0.1),
            coupling(1, 1, [(0, 2)], 0.05),
        ],
    }
    out["rabi"] = {
        "name": "two-state Rabi model",
        "note": "Constant coupling lambda = 0.05 au between degenerate states; the mode is decoupled.",
        "states": 2,
        "unit": "au",
        "max_degree": 0,
        "modes": [0.01],
        "couplings": [coupling(0, 1, [], 0.05)],
        "dipole": [[0.0, 1.0], [1.0, 0.0]],
    }
    out["spectrum_2state"] = {
        "name": "two-state absorption model",
        "states": 2,
        "unit": "eV",
        "max_degree": 1,
        "modes": [0.15],
        "couplings": [
            coupling(1, 1, [], 2.0),
            coupling(1, 1, [(0, 1)], 0.08),
            coupling(0, 1, [(0, 1)], 0.03),
        ],
        "dipole": [[0.0, 1.0], [1.0, 0.0]],
    }
    out["three_state"] = {
        "name": "three-state LVC toy",
        "states": 3,
        "unit": "eV",
        "max_degree": 1,
        "modes": [0.12, 0.2],
        "couplings": [
            coupling(0, 0, [], 0.1),
            coupling(1, 1, [], 0.3),
            coupling(2, 2, [], 0.45),
            coupling(0, 0, [(0, 1)], 0.05),
            coupling(1, 1, [(1, 1)], -0.06),
            coupling(2, 2, [(0, 1)], 0.04),
            coupling(0, 1, [], 0.04),
            coupling(1, 2, [(1, 1)], 0.03),
            coupling(0, 2, [(0, 1)], 0.02),
        ],
    }
    return out


MODELS = {
    "no4_anth": dict(name="(NO)4-Anth", n_states=5, n_modes=19, degree=2, seed=11,
                     linear_fraction=0.6, bilinear_fraction=0.0),
    "no4_anth_dimer": dict(name="(NO)4-Anth dimer", n_states=6, n_modes=21, degree=2, seed=12,
                           linear_fraction=0.6, bilinear_fraction=0.0, scale=0.3),
    "anth_c60_m11": dict(name="Anth/C60 (M=11)", n_states=4, n_modes=11, degree=1, seed=13,
                         linear_fraction=0.7, bilinear_fraction=0.0, scale=0.06, freq_range=(0.005, 0.08)),
    "anth_c60_m246": dict(name="Anth/C60 (M=246)", n_states=4, n_modes=246, degree=1, seed=14,
                          linear_fraction=0.7, bilinear_fraction=0.0, scale=0.15, freq_range=(0.005, 0.08)),
}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "data" / "models")
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    docs = {key: vibronic_model(**params) for key, params in MODELS.items()}
    docs.update(toy_models())
    for key, doc in docs.items():
        path = args.out / f"{key}.json"
        path.write_text(json.dumps(doc, indent=1) + "\n")
        print(f"wrote {path} ({len(doc['couplings'])} couplings)")


if __name__ == "__main__":
    main()
