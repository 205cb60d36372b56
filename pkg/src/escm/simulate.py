"""Data generators for heavy-tailed structural causal models.

Three families:

* probabilistic sum-/max-linear SCMs with Pareto innovations and randomised
  edge coefficients (``simulate_scm``),
* pre-limit versions of extremal SCMs (max-linear with propagating noise,
  Husler-Reiss) driven by Pareto activations (``simulate_escm_prelimit``),
* exact draws from the exponent-measure law conditioned on one activation
  exceeding 1 (``sample_escm_conditional``),

plus a bivariate generator with a lighter off-support radial tail used to
test the support estimator (``sample_second_order_pair``).
"""

from __future__ import annotations

import functools
import math
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.optimize import bisect
from scipy.stats import norm

from .graph import Dag
from .io import DataError, parse_key_values


def pareto(rng: np.random.Generator, alpha: float, size) -> np.ndarray:
    """Standard Pareto draws, ``P(X > x) = x ** -alpha`` for ``x >= 1``."""
    return (1.0 - rng.random(size)) ** (-1.0 / alpha)


# ---------------------------------------------------------------- coefficient laws

@functools.lru_cache(maxsize=64)
def lognormal_matched_params(l: float, u: float, coverage: float = 0.95) -> tuple[float, float]:
    """Lognormal with median ``(l + u) / 2`` putting mass ``coverage`` on ``[l, u]``.

    Returns ``(log_median, sigma)``; sigma is found by bisection to 1e-10.
    """
    if not (0 < l < u):
        raise ValueError(f"need 0 < l < u, got l={l}, u={u}")
    if not (0 < coverage < 1):
        raise ValueError(f"coverage must lie in (0, 1), got {coverage}")
    mu = math.log((l + u) / 2)

    def excess(sigma: float) -> float:
        return norm.cdf((math.log(u) - mu) / sigma) - norm.cdf((math.log(l) - mu) / sigma) - coverage

    lo, hi = 1e-8, 10.0
    if excess(lo) * excess(hi) > 0:
        raise ValueError(f"no sigma in ({lo}, {hi}) gives coverage {coverage} on [{l}, {u}]")
    return mu, bisect(excess, lo, hi, xtol=1e-10)


_LAW_RE = re.compile(r"^\s*(\w+)\s*\(([^)]*)\)\s*$")


@dataclass(frozen=True)
class CoeffLaw:
    """Distribution of a random positive coefficient.

    ``kind`` is one of ``uniform(l, u)``, ``lognormal_matched(l, u, coverage)``,
    ``lognormal(mu, sigma)`` (log-scale parameters) or ``constant(c)``.
    """

    kind: str
    params: tuple[float, ...]

    def __post_init__(self):
        p = self.params
        if self.kind == "uniform":
            if len(p) != 2 or not (0 < p[0] < p[1]):
                raise ValueError(f"uniform law needs 0 < l < u, got {p}")
        elif self.kind == "lognormal_matched":
            if len(p) != 3 or not (0 < p[0] < p[1]) or not (0 < p[2] < 1):
                raise ValueError(f"lognormal_matched needs 0 < l < u and coverage in (0,1), got {p}")
        elif self.kind == "lognormal":
            if len(p) != 2 or p[1] < 0:
                raise ValueError(f"lognormal law needs (mu, sigma >= 0), got {p}")
        elif self.kind == "constant":
            if len(p) != 1 or not p[0] > 0:
                raise ValueError(f"constant law needs c > 0, got {p}")
        else:
            raise ValueError(f"unknown coefficient law {self.kind!r}")

    @classmethod
    def uniform(cls, l: float, u: float) -> "CoeffLaw":
        return cls("uniform", (float(l), float(u)))

    @classmethod
    def lognormal_matched(cls, l: float, u: float, coverage: float = 0.95) -> "CoeffLaw":
        return cls("lognormal_matched", (float(l), float(u), float(coverage)))

    @classmethod
    def lognormal(cls, mu: float, sigma: float) -> "CoeffLaw":
        return cls("lognormal", (float(mu), float(sigma)))

    @classmethod
    def constant(cls, c: float) -> "CoeffLaw":
        return cls("constant", (float(c),))

    @classmethod
    def parse(cls, text: str) -> "CoeffLaw":
        """Parse e.g. ``"uniform(0.04, 0.4)"``."""
        m = _LAW_RE.match(text)
        if not m:
            raise ValueError(f"cannot parse coefficient law {text!r}")
        args = tuple(float(a) for a in m.group(2).split(",") if a.strip())
        return cls(m.group(1).lower(), args)

    def __str__(self) -> str:
        return f"{self.kind}({', '.join(repr(p) for p in self.params)})"

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        p = self.params
        if self.kind == "uniform":
            return rng.uniform(p[0], p[1], size)
        if self.kind == "lognormal_matched":
            mu, sigma = lognormal_matched_params(*p)
            return rng.lognormal(mu, sigma, size)
        if self.kind == "lognormal":
            return rng.lognormal(p[0], p[1], size)
        return np.full(size, p[0])


SL0_LAW = CoeffLaw.uniform(0.04, 0.4)
SL1_LAW = CoeffLaw.lognormal_matched(0.04, 0.4, 0.95)


# ---------------------------------------------------------------- probabilistic SCMs

@dataclass(frozen=True)
class ScmSpec:
    dag: Dag
    model: str  # "sum" or "max"
    coeff: CoeffLaw = SL0_LAW
    noise_alpha0: float = 3.0

    def __post_init__(self):
        if self.model not in ("sum", "max"):
            raise ValueError(f"model must be 'sum' or 'max', got {self.model!r}")
        if not self.noise_alpha0 > 0:
            raise ValueError("noise_alpha0 must be positive")


def simulate_scm(spec: ScmSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` rows of the sum- or max-linear SCM.

    Innovations are i.i.d. Pareto(``noise_alpha0``); each edge coefficient is
    redrawn for every row.
    """
    dag = spec.dag
    zeta = pareto(rng, spec.noise_alpha0, (n, dag.node_count))
    x = np.zeros((n, dag.node_count))
    for v in dag.topological_order():
        pa = [u - 1 for u in dag.parents(v)]
        if not pa:
            x[:, v - 1] = zeta[:, v - 1]
            continue
        contrib = spec.coeff.sample(rng, (n, len(pa))) * x[:, pa]
        if spec.model == "sum":
            x[:, v - 1] = contrib.sum(axis=1) + zeta[:, v - 1]
        else:
            x[:, v - 1] = np.maximum(contrib.max(axis=1), zeta[:, v - 1])
    return x


# ---------------------------------------------------------------- extremal SCMs

STRUCTURAL_KINDS = ("sum", "max", "max_noise", "hr")


@dataclass(frozen=True)
class EscmSpec:
    """An extremal SCM ``Y_v = a_v * eta_v + h_v(Y_pa(v))``.

    ``structural`` selects ``h_v``:

    * ``sum``: ``sum_u c_uv y_u``
    * ``max``: ``max_u c_uv y_u``
    * ``max_noise``: ``eps_v * max_u c_uv y_u`` with ``eps_v ~ eps_law``
    * ``hr``: ``prod_u y_u ** c_uv * exp(Z_v)``, ``Z_v ~ N(mu_v, sigma_v**2)``

    ``coeffs`` maps each edge ``(u, v)`` to ``c_uv``.
    """

    dag: Dag
    activation: tuple[float, ...]
    structural: str
    coeffs: Mapping[tuple[int, int], float]
    alpha: float = 2.0
    eps_law: CoeffLaw | None = None
    mu: tuple[float, ...] | None = None
    sigma: tuple[float, ...] | None = None

    def __post_init__(self):
        d = self.dag.node_count
        object.__setattr__(self, "activation", tuple(float(a) for a in self.activation))
        object.__setattr__(self, "coeffs", {(int(u), int(v)): float(c) for (u, v), c in self.coeffs.items()})
        if len(self.activation) != d:
            raise ValueError(f"need {d} activation coefficients, got {len(self.activation)}")
        if any(a < 0 for a in self.activation) or not any(a > 0 for a in self.activation):
            raise ValueError("activation coefficients must be >= 0 with at least one positive")
        if self.structural not in STRUCTURAL_KINDS:
            raise ValueError(f"structural must be one of {STRUCTURAL_KINDS}, got {self.structural!r}")
        if set(self.coeffs) != set(self.dag.edges):
            raise ValueError("coeffs must give exactly one coefficient per DAG edge")
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        for v in self.dag.nodes:
            if not self.dag.parents(v) and self.activation[v - 1] == 0:
                raise ValueError(f"node {v} has no parents and zero activation; it would be identically 0")

        if self.structural == "hr":
            self._check_hr()
        elif any(c <= 0 for c in self.coeffs.values()):
            raise ValueError("edge coefficients must be positive")
        if self.structural == "max_noise" and self.eps_law is None:
            object.__setattr__(self, "eps_law", CoeffLaw.constant(1.0))

    def _check_hr(self):
        d = self.dag.node_count
        roots = [v for v in self.dag.nodes if not self.dag.parents(v)]
        active = [v for v in self.dag.nodes if self.activation[v - 1] > 0]
        if len(roots) != 1 or active != roots:
            raise ValueError("Husler-Reiss eSCM needs a single root, which alone has positive activation")
        for v in self.dag.nodes:
            pa = self.dag.parents(v)
            if pa and not math.isclose(sum(self.coeffs[(u, v)] for u in pa), 1.0, abs_tol=1e-9):
                raise ValueError(f"Husler-Reiss coefficients into node {v} must sum to 1")
            if pa and any(self.coeffs[(u, v)] == 0 for u in pa):
                raise ValueError("Husler-Reiss edge coefficients must be nonzero")
        mu = self.mu if self.mu is not None else (0.0,) * d
        sigma = self.sigma if self.sigma is not None else (1.0,) * d
        if len(mu) != d or len(sigma) != d or any(s < 0 for s in sigma):
            raise ValueError("mu and sigma need one entry per node, sigma >= 0")
        object.__setattr__(self, "mu", tuple(map(float, mu)))
        object.__setattr__(self, "sigma", tuple(map(float, sigma)))


@dataclass(frozen=True)
class Randomizers:
    """Per-row, per-node randomness consumed by the structural functions."""

    eps: np.ndarray | None = None
    z: np.ndarray | None = None


def draw_randomizers(spec: EscmSpec, n: int, rng: np.random.Generator) -> Randomizers:
    d = spec.dag.node_count
    if spec.structural == "max_noise":
        return Randomizers(eps=spec.eps_law.sample(rng, (n, d)))
    if spec.structural == "hr":
        return Randomizers(z=rng.normal(spec.mu, spec.sigma, (n, d)))
    return Randomizers()


def propagate(spec: EscmSpec, eta: np.ndarray, rnd: Randomizers = Randomizers()) -> np.ndarray:
    """Evaluate the structural equations for activations ``eta`` (``n x d``).

    Activation and parental terms are combined by ``max`` for the max-type
    models and by ``+`` otherwise; under a single activation both agree.
    Each ``h_v`` is positively homogeneous, so scaling ``eta`` by ``c``
    scales the output by ``c``.
    """
    dag = spec.dag
    eta = np.asarray(eta, dtype=float)
    y = np.zeros_like(eta)
    act = np.asarray(spec.activation)
    for v in dag.topological_order():
        j = v - 1
        base = act[j] * eta[:, j]
        pa = dag.parents(v)
        if not pa:
            y[:, j] = base
            continue
        c = np.array([spec.coeffs[(u, v)] for u in pa])
        ypa = y[:, [u - 1 for u in pa]]
        if spec.structural == "sum":
            y[:, j] = base + ypa @ c
        elif spec.structural == "max":
            y[:, j] = np.maximum(base, (ypa * c).max(axis=1))
        elif spec.structural == "max_noise":
            y[:, j] = np.maximum(base, rnd.eps[:, j] * (ypa * c).max(axis=1))
        else:
            positive = np.all(ypa > 0, axis=1)
            h = np.zeros(eta.shape[0])
            h[positive] = np.exp(np.log(ypa[positive]) @ c + rnd.z[positive, j])
            y[:, j] = base + h
    return y


def simulate_escm_prelimit(spec: EscmSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    """Probabilistic data whose extremes follow ``spec``.

    Every node receives an i.i.d. Pareto(``alpha``) innovation scaled by its
    activation coefficient, then the structural equations are applied.
    """
    zeta = pareto(rng, spec.alpha, (n, spec.dag.node_count))
    return propagate(spec, zeta, draw_randomizers(spec, n, rng))


def sample_escm_conditional(spec: EscmSpec, n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Draw from the eSCM law restricted to ``{eta_v > 1}`` for a random activated node ``v``.

    ``v`` is chosen with probability proportional to ``a_v ** alpha``; the
    activated coordinate is ``a_v`` times a standard Pareto(``alpha``) draw
    and every non-descendant of ``v`` is exactly 0. Returns the sample and
    the 1-based activated node per row.
    """
    d = spec.dag.node_count
    weights = np.asarray(spec.activation) ** spec.alpha
    labels = rng.choice(d, size=n, p=weights / weights.sum())
    eta = np.zeros((n, d))
    eta[np.arange(n), labels] = pareto(rng, spec.alpha, n)
    y = propagate(spec, eta, draw_randomizers(spec, n, rng))
    return y, labels + 1


# ---------------------------------------------------------------- second-order pairs

@dataclass(frozen=True)
class SecondOrderPairSpec:
    """Bivariate law with angular support ``[a, b]`` and a lighter tail outside it.

    With probability ``1 - off_mass`` the angle comes from ``in_cone`` on
    ``[a, b]`` (``"uniform"`` or ``"endpoints"``) and the radius is
    Pareto(``alpha``); otherwise the angle is uniform off ``[a, b]`` and the
    radius is Pareto(``(1 + rho) * alpha``).
    """

    a: float = 0.2
    b: float = 0.7
    alpha: float = 2.0
    rho: float = 1.0
    off_mass: float = 0.1
    in_cone: str = "uniform"

    def __post_init__(self):
        if not (0 <= self.a <= self.b <= 1):
            raise ValueError(f"need 0 <= a <= b <= 1, got a={self.a}, b={self.b}")
        if not (self.alpha > 0 and self.rho > 0):
            raise ValueError("alpha and rho must be positive")
        if not (0 <= self.off_mass < 1):
            raise ValueError("off_mass must lie in [0, 1)")
        if self.off_mass > 0 and self.a == 0 and self.b == 1:
            raise ValueError("support [0, 1] leaves no off-cone region for off_mass > 0")
        if self.in_cone not in ("uniform", "endpoints"):
            raise ValueError(f"in_cone must be 'uniform' or 'endpoints', got {self.in_cone!r}")


def sample_second_order_pair_polar(spec: SecondOrderPairSpec, n: int,
                                   rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Angles, radii and the off-cone indicator behind :func:`sample_second_order_pair`."""
    off = rng.random(n) < spec.off_mass
    w = np.empty(n)
    r = np.empty(n)
    n_in = int((~off).sum())
    if spec.in_cone == "uniform":
        w[~off] = rng.uniform(spec.a, spec.b, n_in)
    else:
        w[~off] = np.where(rng.random(n_in) < 0.5, spec.a, spec.b)
    r[~off] = pareto(rng, spec.alpha, n_in)
    n_off = n - n_in
    if n_off:
        left = spec.a
        u = rng.uniform(0.0, left + (1.0 - spec.b), n_off)
        w[off] = np.where(u < left, u, spec.b + (u - left))
        r[off] = pareto(rng, (1 + spec.rho) * spec.alpha, n_off)
    return w, r, off


def sample_second_order_pair(spec: SecondOrderPairSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    w, r, _ = sample_second_order_pair_polar(spec, n, rng)
    return np.column_stack([r * w, r * (1 - w)])


# ---------------------------------------------------------------- named models

SCM_MODELS = {
    "sl0": ("sum", SL0_LAW),
    "sl1": ("sum", SL1_LAW),
    "ml0": ("max", SL0_LAW),
    "ml1": ("max", SL1_LAW),
}
MODEL_NAMES = (*SCM_MODELS, "mlnoise", "hr", "escm", "so2pair")


def scm_spec_for(model: str, dag: Dag, alpha0: float) -> ScmSpec:
    kind, law = SCM_MODELS[model]
    return ScmSpec(dag, kind, law, alpha0)


def single_rooted(dag: Dag) -> Dag:
    """Connect the first node in topological order to every other root."""
    first = dag.topological_order()[0]
    extra = [(first, v) for v in dag.nodes if v != first and not dag.parents(v)]
    return Dag(dag.node_count, set(dag.edges) | set(extra))


def default_escm_spec(model: str, dag: Dag, rng: np.random.Generator, alpha: float = 2.0) -> EscmSpec:
    """Spec used when ``mlnoise``, ``hr`` or ``escm`` is requested without a spec file.

    Edge coefficients are drawn once from Uniform(0.04, 0.4); ``mlnoise``
    uses lognormal(0, 0.5) noise, ``hr`` equal weights into each node with
    ``Z_v ~ N(0, 0.5**2)`` on a single-rooted version of ``dag``.
    """
    d = dag.node_count
    if model == "hr":
        dag = single_rooted(dag)
        root = dag.topological_order()[0]
        coeffs = {(u, v): 1.0 / len(dag.parents(v)) for u, v in dag.edges}
        act = [1.0 if v == root else 0.0 for v in dag.nodes]
        return EscmSpec(dag, act, "hr", coeffs, alpha, mu=(0.0,) * d, sigma=(0.5,) * d)
    edges = sorted(dag.edges)
    coeffs = dict(zip(edges, SL0_LAW.sample(rng, len(edges)).tolist()))
    if model == "mlnoise":
        return EscmSpec(dag, [1.0] * d, "max_noise", coeffs, alpha, eps_law=CoeffLaw.lognormal(0.0, 0.5))
    if model == "escm":
        return EscmSpec(dag, [1.0] * d, "sum", coeffs, alpha)
    raise ValueError(f"no default eSCM for model {model!r}")


# ---------------------------------------------------------------- spec files

_SPEC_KEYS = {"model", "d", "alpha", "alpha0", "coeff", "activation", "structural", "eps",
              "mu", "sigma", "a", "b", "rho", "q", "in_cone"}


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",") if x.strip())


def parse_spec(text: str):
    """Build a spec object from ``key = value`` text.

    Edges are given as ``edge u v [coeff]`` lines. Returns
    ``(model, spec)`` where ``spec`` is a :class:`ScmSpec`,
    :class:`EscmSpec` or :class:`SecondOrderPairSpec`.
    """
    kv, directives = parse_key_values(text)
    unknown = set(kv) - _SPEC_KEYS
    if unknown:
        raise DataError(f"unknown spec keys: {sorted(unknown)}")
    model = kv.get("model", "").lower()
    if model not in MODEL_NAMES:
        raise DataError(f"spec needs model = one of {MODEL_NAMES}")
    try:
        if model == "so2pair":
            return model, SecondOrderPairSpec(
                a=float(kv.get("a", 0.2)), b=float(kv.get("b", 0.7)), alpha=float(kv.get("alpha", 2.0)),
                rho=float(kv.get("rho", 1.0)), off_mass=float(kv.get("q", 0.1)),
                in_cone=kv.get("in_cone", "uniform"))
        d = int(kv["d"])
        edges, coeffs = [], {}
        for parts in directives:
            if parts[0].lower() != "edge" or len(parts) not in (3, 4):
                raise DataError(f"bad spec line {' '.join(parts)!r}; expected 'edge u v [coeff]'")
            e = (int(parts[1]), int(parts[2]))
            edges.append(e)
            if len(parts) == 4:
                coeffs[e] = float(parts[3])
        dag = Dag(d, edges)
        if model in SCM_MODELS:
            kind, law = SCM_MODELS[model]
            if "coeff" in kv:
                law = CoeffLaw.parse(kv["coeff"])
            return model, ScmSpec(dag, kind, law, float(kv.get("alpha0", 3.0)))
        structural = kv.get("structural", {"mlnoise": "max_noise", "hr": "hr", "escm": "sum"}[model])
        return model, EscmSpec(
            dag,
            _floats(kv["activation"]) if "activation" in kv else [1.0] * d,
            structural,
            coeffs,
            float(kv.get("alpha", 2.0)),
            eps_law=CoeffLaw.parse(kv["eps"]) if "eps" in kv else None,
            mu=_floats(kv["mu"]) if "mu" in kv else None,
            sigma=_floats(kv["sigma"]) if "sigma" in kv else None,
        )
    except KeyError as exc:
        raise DataError(f"spec is missing required key {exc.args[0]!r}") from None
    except ValueError as exc:
        if isinstance(exc, DataError):
            raise
        raise DataError(f"invalid spec: {exc}") from None


# ---------------------------------------------------------------- chunked seeding

def chunk_rng(key: int | Sequence[int], index: int) -> np.random.Generator:
    key = [int(key)] if np.isscalar(key) else [int(x) for x in key]
    return np.random.default_rng(np.random.SeedSequence([*key, int(index)]))


def _run_chunk(args):
    fn, rows, seed, index = args
    return fn(rows, chunk_rng(seed, index))


def simulate_chunked(fn: Callable[[int, np.random.Generator], np.ndarray], n: int,
                     seed: int | Sequence[int],
                     chunk_size: int = 10_000, workers: int = 1) -> np.ndarray:
    """Generate ``n`` rows as fixed-size chunks, each with its own derived seed.

    ``fn(rows, rng)`` must return ``rows`` rows; chunk ``i`` is seeded from
    ``(*seed, i)``. The output depends only on ``(fn, n, seed, chunk_size)``,
    never on ``workers``. With ``workers > 1`` ``fn`` has to be picklable
    (e.g. a ``functools.partial`` of a module-level function).
    """
    sizes = [min(chunk_size, n - start) for start in range(0, n, chunk_size)]
    tasks = [(fn, rows, seed, i) for i, rows in enumerate(sizes)]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(workers) as pool:
            parts = list(pool.map(_run_chunk, tasks))
    else:
        parts = [_run_chunk(t) for t in tasks]
    return np.concatenate(parts, axis=0)
