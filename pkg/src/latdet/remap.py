"""Detector chains and out-of-lattice remapping strategies.

A chain is preprocessing (sorted QR, optionally followed by lattice
reduction), one tree search or nearest-plane pass, and a policy for
relaxed estimates that land outside the finite symbol box:

* naive: discard the estimate and declare an error;
* quantize: clamp each rail onto the box;
* cvr: solve a finite-lattice closest-vector problem with the relaxed
  estimate playing the role of the received point;
* two_stage: fall back to a full finite-lattice ML search on the original
  received vector.

Chain strings follow ``[lll+](sesd|rsesd|sic|rsic)[:remap]``, e.g. "sesd",
"rsesd:naive", "lll+sesd:cvr", "lll+sic:naive". A remap suffix or an lll+
prefix implies the relaxed search domain.
"""

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import lll as lll_mod
from .channel import ChannelInstance
from .constellation import SymbolVector, contains, unmap_from_lattice
from .detectors import SearchProblem, babai_sic, sesd_finite, sesd_relaxed
from .errors import ConfigError
from .numerics import sqrd

_REMAPS = ("naive", "quantize", "cvr", "two_stage")


@dataclass(frozen=True)
class ChainSpec:
    preprocessing: str  # "sqrd" | "sqrd+lll"
    search: str         # "sesd" | "sic"
    domain: str         # "finite" | "relaxed"
    remap: Optional[str] = None

    def __post_init__(self):
        if self.preprocessing not in ("sqrd", "sqrd+lll"):
            raise ConfigError(f"unknown preprocessing {self.preprocessing!r}")
        if self.search not in ("sesd", "sic"):
            raise ConfigError(f"unknown search {self.search!r}")
        if self.domain not in ("finite", "relaxed"):
            raise ConfigError(f"unknown domain {self.domain!r}")
        if self.domain == "relaxed":
            if self.remap not in _REMAPS:
                raise ConfigError("relaxed chains need a remap strategy")
        elif self.remap is not None:
            raise ConfigError("finite chains take no remap strategy")
        if self.preprocessing == "sqrd+lll" and self.domain == "finite":
            raise ConfigError("the reduced basis only supports relaxed search")

    @property
    def label(self):
        head = self.search if self.domain == "finite" else "r" + self.search
        if self.preprocessing == "sqrd+lll":
            head = "lll+" + self.search
        return head if self.remap is None else f"{head}:{self.remap}"


def parse_chain(text):
    """Parse a chain string into a validated ChainSpec."""
    s = text.strip().lower()
    head, sep, remap = s.partition(":")
    remap = remap.strip() if sep else None
    if remap is not None and remap not in _REMAPS:
        raise ConfigError(f"unknown remap strategy {remap!r} in {text!r}")
    pre = "sqrd"
    if head.startswith("lll+"):
        pre = "sqrd+lll"
        head = head[4:]
    relaxed = pre == "sqrd+lll" or remap is not None
    if head in ("rsesd", "rsic"):
        relaxed = True
        head = head[1:]
    if head not in ("sesd", "sic"):
        raise ConfigError(f"unknown search {head!r} in chain {text!r}")
    if relaxed and remap is None:
        raise ConfigError(f"chain {text!r} searches the relaxed domain "
                          "and needs a remap suffix")
    return ChainSpec(preprocessing=pre, search=head,
                     domain="relaxed" if relaxed else "finite", remap=remap)


@dataclass(frozen=True, eq=False)
class ChainResult:
    estimate: Optional[SymbolVector]       # modulated domain, None on error
    estimate_grid: Optional[np.ndarray]    # same decision in grid coords
    declared_error: bool
    total_nodes: int
    out_of_lattice: bool
    stage2_invoked: bool


class Prepared:
    """Per-trial cache of factorizations and search results.

    All chains of one trial share the same channel realization; sharing
    the sorted QR, the reduced basis, and any search a previous chain
    already ran keeps the sweep affordable and guarantees that identical
    sub-steps of different chains agree bit for bit.
    """

    def __init__(self, inst: ChannelInstance, cst, delta=0.75):
        self.inst = inst
        self.cst = cst
        self.delta = delta
        self._qr = None
        self._rb = None
        self._rt = {}
        self._searches = {}

    def qr(self):
        if self._qr is None:
            self._qr = sqrd(self.inst.generator)
        return self._qr

    def reduced(self):
        if self._rb is None:
            self._rb = lll_mod.reduce(self.qr(), self.delta)
        return self._rb

    def factors(self, basis):
        if basis == "lll":
            rb = self.reduced()
            return rb.q, rb.r
        qr = self.qr()
        return qr.q, qr.r

    def rotated_target(self, basis):
        if basis not in self._rt:
            q, _ = self.factors(basis)
            self._rt[basis] = np.ascontiguousarray(
                np.conj(q.T) @ self.inst.target)
        return self._rt[basis]

    def search(self, kind, domain, basis):
        key = (kind, domain, basis)
        if key not in self._searches:
            q, r = self.factors(basis)
            cst = self.cst if domain == "finite" else None
            p = SearchProblem(r_mat=r, target=self.rotated_target(basis),
                              m=r.shape[0], cst=cst)
            if kind == "sesd":
                fn = sesd_finite if domain == "finite" else sesd_relaxed
                self._searches[key] = fn(p)
            else:
                self._searches[key] = babai_sic(p)
        return self._searches[key]

    def cvr_search(self, xp_rel):
        # finite CVP with the relaxed estimate as the target, formed
        # directly as r_mat @ xp_rel (exact in the triangular frame)
        qr = self.qr()
        p = SearchProblem(r_mat=qr.r,
                          target=np.ascontiguousarray(qr.r @ xp_rel),
                          m=qr.r.shape[0], cst=self.cst)
        return sesd_finite(p)


def _unpermute(xp, perm):
    x = np.empty_like(xp)
    x[perm] = xp
    return x


def quantize(x_rel, cst):
    """Clamp each rail of a relaxed vector onto the grid box."""
    v = np.asarray(x_rel, dtype=np.complex128)
    re = np.clip(v.real, cst.k_min, cst.k_max)
    im = np.clip(v.imag, cst.k_min, cst.k_max)
    return re + 1j * im


def cvr(x_rel, generator, cst):
    """Closest grid-box lattice point to a relaxed lattice point.

    Returns (grid vector, nodes visited by the embedded finite search).
    """
    qr = sqrd(np.asarray(generator, dtype=np.complex128))
    xp = np.asarray(x_rel, dtype=np.complex128)[qr.perm]
    p = SearchProblem(r_mat=qr.r, target=np.ascontiguousarray(qr.r @ xp),
                      m=qr.r.shape[0], cst=cst)
    res = sesd_finite(p)
    return _unpermute(res.solution, qr.perm), res.nodes_visited


def _finish(x_grid, cst, nodes, out_of_lattice, stage2):
    return ChainResult(
        estimate=unmap_from_lattice(x_grid, cst),
        estimate_grid=x_grid,
        declared_error=False,
        total_nodes=nodes,
        out_of_lattice=out_of_lattice,
        stage2_invoked=stage2,
    )


def run_chain(spec: ChainSpec, inst: ChannelInstance, cst,
              cache: Optional[Prepared] = None, delta=0.75) -> ChainResult:
    """Run one detector chain on one channel realization."""
    if cache is None:
        cache = Prepared(inst, cst, delta)
    perm = cache.qr().perm

    if spec.domain == "finite":
        res = cache.search(spec.search, "finite", "sqrd")
        x = _unpermute(res.solution, perm)
        return _finish(x, cst, res.nodes_visited, False, False)

    basis = "lll" if spec.preprocessing == "sqrd+lll" else "sqrd"
    res = cache.search(spec.search, "relaxed", basis)
    nodes = res.nodes_visited
    xp_rel = res.solution
    if basis == "lll":
        xp_rel = lll_mod.from_reduced_coords(xp_rel, cache.reduced())
    x_rel = _unpermute(xp_rel, perm)

    if contains(x_rel, cst):
        return _finish(x_rel, cst, nodes, False, False)

    if spec.remap == "naive":
        return ChainResult(estimate=None, estimate_grid=None,
                           declared_error=True, total_nodes=nodes,
                           out_of_lattice=True, stage2_invoked=False)
    if spec.remap == "quantize":
        return _finish(quantize(x_rel, cst), cst, nodes, True, False)
    if spec.remap == "cvr":
        fix = cache.cvr_search(xp_rel)
        x = _unpermute(fix.solution, perm)
        return _finish(x, cst, nodes + fix.nodes_visited, True, False)
    # two_stage: rerun as plain finite ML on the original received vector
    stage2 = cache.search("sesd", "finite", "sqrd")
    x = _unpermute(stage2.solution, perm)
    return _finish(x, cst, nodes + stage2.nodes_visited, True, True)


def two_stage(inst: ChannelInstance, first_stage: ChainSpec, cst,
              cache: Optional[Prepared] = None) -> ChainResult:
    """Relaxed first stage with a finite-ML fallback.

    The first stage runs as given (its remap field is ignored); an
    out-of-lattice result triggers a finite search on the received vector.
    """
    if first_stage.domain != "relaxed":
        raise ConfigError("two_stage needs a relaxed first stage")
    spec = replace(first_stage, remap="two_stage")
    return run_chain(spec, inst, cst, cache=cache)
