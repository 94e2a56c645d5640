"""Named verification suites run by ``ggmech verify``.

Each check draws from its own stream, derived from the seed and the
check's name, so adding or reordering checks never perturbs the others and
the verdict stream depends only on (suite, overrides, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analysis import estimators as E
from .analysis import quadrature as Q
from .analysis.verdicts import Verdict
from .calibration import PrivacyBudget, calibrate_sigma_ggauss, empirical_calibrate
from .distributions import GGammaParams, sample_gamma, sample_ggamma
from .streams import RandomStream

SUITES = ("distributions", "spherecap", "subgamma", "privacy", "errors", "composed")
ALL = "all"


@dataclass
class SuiteConfig:
    """Overrides from the command line; ``None`` keeps each check's default."""

    seed: int = 0
    trials: int | None = None
    k: int | None = None
    p: float | None = None
    q: float | None = None
    eps: float | None = None
    delta: float | None = None
    t: float | None = None
    c_sigma: float = 1.0
    log_base: str = "natural"

    def n(self, default: int) -> int:
        return int(self.trials) if self.trials is not None else default

    def budget(self, eps: float, delta: float) -> PrivacyBudget:
        return PrivacyBudget(self.eps if self.eps is not None else eps,
                             self.delta if self.delta is not None else delta)

    def ks(self, default):
        return [self.k] if self.k is not None else list(default)

    def ps(self, default):
        return [self.p] if self.p is not None else list(default)


def _distributions(cfg, rs):
    yield from Q.ggamma_moment_check(GGammaParams(1 / 3, 4 / 3), [1, 2, 3], cfg.n(200_000), rs("moments_mc"))
    yield from Q.ggamma_moment_check(GGammaParams(1 / 3, 4 / 3), [1, 2, 3])
    yield from Q.ggamma_moment_check(GGammaParams(1.0, 1.0), [1, 2])
    for k in cfg.ks((64, 256)):
        for p in cfg.ps((4, 8)):
            yield from E.radius_law_check(k, p, cfg.n(100_000), rs(f"radius/{k}/{p}"))
    yield from E.reduction_checks(cfg.n(200_000), rs("reductions"))


def _spherecap(cfg, rs):
    yield from E.exact_circle_check(cfg.n(200_000), rs("circle"))
    grid = [0.2, 0.3, 0.4, 0.5, 0.7]
    for k in cfg.ks((50,)):
        for p in cfg.ps((2, 4)):
            yield from E.sphere_cap_check(k, p, grid, cfg.n(200_000), rs(f"cap/{k}/{p}"))
            yield from E.linf_union_check(k, p, [0.5, 0.8], cfg.n(100_000), rs(f"union/{k}/{p}"))
    for k in cfg.ks((256, 4096)):
        yield E.linf_expectation_check(k, cfg.p or 4, cfg.n(20_000), rs(f"linf/{k}"))
    for k in cfg.ks((50,)):
        k = max(k, 2)
        p = cfg.p or 4
        yield E.negative_association_check(k, p, cfg.q or min(2, p), 0.3, cfg.n(100_000),
                                           rs(f"negassoc/{k}"))


def _subgamma(cfg, rs):
    yield from Q.mu_bounds_check(range(2, 65))
    for p in cfg.ps((4, 6, 8)):
        mu = 1.0 / math.gamma(1.0 / p)
        yield from Q.mgf_subgamma_check(p, Q.SubGammaSpec(mu, 1.0, "right"),
                                        np.round(np.arange(0.1, 0.95, 0.1), 1))
        yield from Q.mgf_subgamma_check(p, Q.SubGammaSpec(mu, 1.5, "left"),
                                        np.round(np.arange(0.1, 0.65, 0.1), 1))
    n = cfg.n(200_000)
    yield from E.gamma_tail_check(lambda m, s: sample_gamma(5.0, s, size=m), Q.SubGammaSpec(5.0, 1.0, "right"),
                                  5.0, [0, 1, 2, 4], n, rs("gamma5/right"), label="gamma_tail_gamma5")
    yield from E.gamma_tail_check(lambda m, s: sample_gamma(5.0, s, size=m), Q.SubGammaSpec(5.0, 0.0, "left"),
                                  5.0, [1, 2, 4], n, rs("gamma5/left"), label="gamma_tail_gamma5")
    params = GGammaParams(1 / 3, 4 / 3)
    mu = params.mean
    draw = lambda m, s: sample_ggamma(params, s, size=(m, 100)).sum(axis=1)  # noqa: E731
    for spec in (Q.SubGammaSpec(100 * mu, 1.0, "right"), Q.SubGammaSpec(100 * mu, 1.5, "left")):
        yield from E.gamma_tail_check(draw, spec, 100 * mu, [1, 2, 4], n // 4,
                                      rs(f"ggamma_sum/{spec.side}"), label="gamma_tail_ggamma_sum")


def _privacy(cfg, rs):
    k = cfg.k or 64
    p = cfg.p or 4
    budget = cfg.budget(1.0, 0.01)
    n = cfg.n(100_000)
    shift = np.ones(k)
    sigma = empirical_calibrate(k, p, budget, n, rs("calibrate"))
    yield E.privacy_loss_tail(k, p, sigma, budget.epsilon, budget.delta, shift, n, rs("tail/empirical"))
    analytic = calibrate_sigma_ggauss(k, p, budget, c_sigma=4.0, log_base=cfg.log_base)
    yield E.privacy_loss_tail(k, p, analytic, budget.epsilon, budget.delta, shift, n, rs("tail/analytic"))
    yield E.privacy_loss_tail(k, p, sigma, budget.epsilon, budget.delta, np.zeros(k), n // 10, rs("tail/zero"))


def _errors(cfg, rs):
    budget = cfg.budget(1.0, 1e-3)
    k = cfg.k or 1024
    p = cfg.p or 4
    sigma = calibrate_sigma_ggauss(k, p, budget, cfg.c_sigma, cfg.log_base)
    yield from E.lq_chain_check(k, p, sigma, [1, 2, p], cfg.n(5_000), rs("lq_chain"))
    t_grid = [cfg.t] if cfg.t is not None else [0.0, 0.5, 1.0, 2.0]
    yield from E.linf_tail_check(k, p, budget, t_grid, cfg.n(5_000), rs("main_tail"),
                                         c=2.0, c_sigma=cfg.c_sigma, log_base=cfg.log_base)
    n = cfg.n(2_000)
    yield from E.scaling_exponent_check([4, 8, 16], lambda x: 1024, lambda x: x, budget, n,
                                        rs("scaling/p"), 0.35, 0.65, "scaling_exponent_p", cfg.c_sigma)
    yield from E.scaling_exponent_check([2 ** 8, 2 ** 10, 2 ** 12], lambda x: x, lambda x: 4, budget, n,
                                        rs("scaling/k"), 0.4, 0.6, "scaling_exponent_k", cfg.c_sigma)


def _composed(cfg, rs):
    k = cfg.k or 4096
    p = cfg.p or 4
    budget = cfg.budget(1.0, 1e-4)
    t = cfg.t if cfg.t is not None else 1.0
    yield from E.sv_accuracy_check(1000, 5, 8, 0.05, 1.0, 1e-3, cfg.n(2_000), rs("sv_accuracy"))
    yield from E.sv_tail_check(1000, 8, 1.0, 1e-3, 0.05, [2.0, 4.0, 8.0], cfg.n(2_000), rs("sv_tail"))
    yield from E.composed_decomposition_check(k, p, budget, t, cfg.n(2_000), rs("decomposition"),
                                              cfg.c_sigma, cfg.log_base)
    yield from E.linf_tail_check(k, p, budget, [t], cfg.n(2_000), rs("composed_tail"), c=2.0,
                                         c_sigma=cfg.c_sigma, log_base=cfg.log_base,
                                         composed_trials=cfg.n(500))


_RUNNERS = {
    "distributions": _distributions,
    "spherecap": _spherecap,
    "subgamma": _subgamma,
    "privacy": _privacy,
    "errors": _errors,
    "composed": _composed,
}


def suite_names(name: str) -> list[str]:
    if name == ALL:
        return list(SUITES)
    if name not in _RUNNERS:
        raise KeyError(name)
    return [name]


def run_suite(name: str, cfg: SuiteConfig):
    """Yield the verdicts of suite ``name`` (or every suite for ``"all"``) in a fixed order."""
    root = RandomStream(cfg.seed)
    for suite in suite_names(name):
        def rs(check, suite=suite):
            return root.named(f"{suite}/{check}")

        for v in _RUNNERS[suite](cfg, rs):
            v.suite = suite
            v.seed = cfg.seed
            yield v


def summarize(verdicts: list[Verdict]) -> dict:
    counts = {"pass": 0, "fail": 0, "info": 0}
    for v in verdicts:
        counts[v.verdict] += 1
    return counts
