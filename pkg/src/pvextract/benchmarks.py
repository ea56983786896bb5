"""Standard search ranges, DE settings and literature reference values."""

from __future__ import annotations

from .objective import ModelKind, ParamBounds

# (iph [A], i0 [uA], n, rs [ohm], rp [ohm]) ranges per dataset.
_SDM_RANGES = {
    "rtc_france": ((0.0, 0.0, 1.0, 0.0, 0.0), (1.0, 1.0, 2.0, 0.5, 100.0)),
    "photowatt_pwp201": ((0.0, 0.0, 1.0, 0.0, 0.0), (2.0, 50.0, 50.0, 2.0, 2000.0)),
}


def _ddm_from_sdm(lo, hi):
    # [iph, i0, n, rs, rp] -> [iph, i01, i02, n1, n2, rs, rp]
    pick = (0, 1, 1, 2, 2, 3, 4)
    return tuple(lo[j] for j in pick), tuple(hi[j] for j in pick)


def default_bounds(model, dataset_name: str) -> ParamBounds:
    """Literature-standard search range for ``model`` on a benchmark dataset."""
    model = ModelKind.parse(model)
    if dataset_name not in _SDM_RANGES:
        raise KeyError(f"no built-in bounds for dataset {dataset_name!r}")
    lo, hi = _SDM_RANGES[dataset_name]
    if model is ModelKind.DDM:
        lo, hi = _ddm_from_sdm(lo, hi)
    return ParamBounds(lo, hi)


# Np, Cr, F, G
DE_SETTINGS = {
    ModelKind.SDM: dict(np=50, cr=0.6, f=0.9, g=800),
    ModelKind.DDM: dict(np=50, cr=0.6, f=0.9, g=1600),
}

# Best RMSE over 30 DE runs (min, mean, max) at 5 significant digits.
REFERENCE_RMSE = {
    ("sdm", "rtc_france"): ("9.8602E-4", "9.8602E-4", "9.8602E-4"),
    ("sdm", "photowatt_pwp201"): ("2.4250E-3", "2.4250E-3", "2.4250E-3"),
    ("ddm", "rtc_france"): ("9.8248E-4", "9.8267E-4", "9.8602E-4"),
    ("ddm", "photowatt_pwp201"): ("2.4250E-3", "2.4250E-3", "2.4250E-3"),
}

# Parameter vectors reported for a typical DE run.
TYPICAL_DE_THETA = {
    ("sdm", "rtc_france"): (0.760775, 0.323021, 1.481184, 0.036377, 53.71852),
    ("sdm", "photowatt_pwp201"): (1.03051, 3.48226, 48.6428, 1.20127, 981.982),
    ("ddm", "rtc_france"): (0.760781, 0.225974, 0.749344, 1.45101, 1.99999, 0.0367404, 55.4854),
    ("ddm", "photowatt_pwp201"): (1.03051, 9.77791e-3, 3.47248, 48.64284, 48.64283, 1.20127, 981.982),
}

# Interval branch-and-bound RMSE enclosures (lower, upper) and their incumbents.
CERTIFIED_RMSE = {
    ("sdm", "rtc_france"): (9.860250397955652e-4, 9.860250417458982e-4),
    ("sdm", "photowatt_pwp201"): (2.425076598320144e-3, 2.425076599532477e-3),
    ("ddm", "rtc_france"): (0.0, 9.83581875679e-4),
    ("ddm", "photowatt_pwp201"): (0.0, 1.61865668151e-3),
}

CERTIFIED_THETA = {
    ("sdm", "rtc_france"): (0.760779120136, 0.322873926858, 1.48113747635, 0.0363792207867, 53.7009537057),
    ("sdm", "photowatt_pwp201"): (1.03052020484, 3.48287904343, 48.6435574734, 1.20123680201, 981.263690780),
    ("ddm", "rtc_france"): (0.760815738919, 0.217867184041, 0.781454995330, 1.44827388213,
                           1.98183166760, 0.0367359827333, 55.8931982861),
    ("ddm", "photowatt_pwp201"): (1.0339286971, 1.86575472010e-23, 0.535399234849, 9.58860778809,
                                 42.6724488388, 1.63619822583, 607.690281231),
}

# bench case id -> (model, dataset)
CASES = {
    "sdm-rtc": ("sdm", "rtc_france"),
    "sdm-pw": ("sdm", "photowatt_pwp201"),
    "ddm-rtc": ("ddm", "rtc_france"),
    "ddm-pw": ("ddm", "photowatt_pwp201"),
}
