"""Shipped experiment presets.

The SVM presets use the regularisation constants of the CCAT, COV1 and
ASTRO-PH setups (1e-4, 1e-6, 5e-5) with polynomial-decay parameter 3, but on
generated data since the original corpora are not bundled.
"""

import copy

_ALL_SCHEMES = ["last", "uniform", "suffix(0.5)", "polydecay(3)"]


def _svm(lam):
    return {
        "objective": {
            "variant": "svm",
            "dim": 50,
            "seed": 0,
            "lambda": lam,
            "n_examples": 2000,
            "margin": 0.1,
            "flip_prob": 0.05,
        },
        "domain": {"kind": "unbounded"},
        "schedule": {"kind": "strongly_convex"},
        "schemes": list(_ALL_SCHEMES),
        "T": 100_000,
        "repetitions": 10,
        "seed": 1,
        "reference": {"steps": 1_000_000, "eta": 3},
    }


PRESETS = {
    "strongly-convex-demo": {
        "objective": {
            "variant": "quadratic",
            "dim": 5,
            "seed": 0,
            "lambda": 1.0,
            "noise_sigma": 0.5,
            "optimum_radius": 0.5,
            "optimum_on_sphere": True,
        },
        "domain": {"kind": "ball", "radius": 1.0},
        "schedule": {"kind": "strongly_convex"},
        "schemes": list(_ALL_SCHEMES),
        "T": 10_000,
        "repetitions": 100,
        "seed": 1,
        "bounds": ["last_strongly_convex", "suffix", "polydecay"],
    },
    "convex-demo": {
        "objective": {
            "variant": "l1",
            "dim": 5,
            "seed": 0,
            "noise_sigma": 0.5,
            "optimum_radius": 1.0,
        },
        "domain": {"kind": "ball", "radius": 2.0},
        # c left unset: resolves to D / G
        "schedule": {"kind": "general_convex"},
        "schemes": list(_ALL_SCHEMES),
        "T": 10_000,
        "repetitions": 100,
        "seed": 1,
        "bounds": ["last_convex"],
    },
    "svm-synthetic-ccat": _svm(1e-4),
    "svm-synthetic-cov1": _svm(1e-6),
    "svm-synthetic-astro": _svm(5e-5),
}

ALIASES = {"svm-synthetic": "svm-synthetic-ccat"}


def preset(name):
    name = ALIASES.get(name, name)
    if name not in PRESETS:
        raise KeyError(name)
    return copy.deepcopy(PRESETS[name])
