"""Post-solve checks: vortex detection, structure identities, asymptotic comparisons.

Identity residuals are evaluated in the computational log-polar coordinates
ζ = s + iθ with s = ln|w|. Every identity involved is conformally natural, and
in these coordinates a Blaschke-type core is smooth, so refinement orders are
not spoiled by the r^ε singularity. Residual norms use the measure ds dθ.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .boundary import BoundaryMap
from .disc import mobius, mobius_derivative, winding_number
from .energy import DiscreteEnergy, EnergyBreakdown
from .errors import (DegenerateLoopError, InvalidParameterError, InvalidProbeError,
                     ResolutionError, UndefinedRatioError, UndersampledError)
from .harmonic import VortexConfig, canonical_harmonic_map, dirichlet_phi0
from .mesh import Field2D

BOUNDARY_WARNING_CELLS = 3
PROBE_MARGIN_CELLS = 4
SPLIT_LEVELS = 40
SPLIT_RATIO = 0.85


def default_beta(D: int) -> float:
    """Detection threshold max(0.75, √(D/(D+1)) + 0.02)."""
    D = abs(int(D))
    return max(0.75, float(np.sqrt(D / (D + 1.0))) + 0.02)


def _check_beta(beta: float, D: int) -> float:
    lower = max(1 / np.sqrt(2), np.sqrt(abs(D) / (abs(D) + 1.0)))
    if not lower < beta < 1.0:
        raise InvalidParameterError(f"beta must lie in ({lower:.4f}, 1) for degree {D}")
    return float(beta)


# vortex detection

@dataclass(frozen=True)
class Vortex:
    center: complex
    radius: float
    degree: int
    min_modulus: float
    n_nodes: int
    near_boundary: bool = False

    def to_dict(self) -> dict:
        return {"center": [self.center.real, self.center.imag], "radius": self.radius,
                "degree": self.degree, "min_modulus": self.min_modulus,
                "n_nodes": self.n_nodes, "near_boundary": self.near_boundary}


@dataclass
class VortexDetection:
    vortices: tuple
    beta: float
    warnings: list = field(default_factory=list)

    @property
    def total_degree(self) -> int:
        return sum(v.degree for v in self.vortices)

    def __len__(self) -> int:
        return len(self.vortices)

    def to_dict(self) -> dict:
        return {"beta": self.beta, "count": len(self.vortices), "total_degree": self.total_degree,
                "vortices": [v.to_dict() for v in self.vortices], "warnings": self.warnings}


def _components(mask: np.ndarray, center_node: bool) -> tuple[int, np.ndarray]:
    """Label connected components of masked nodes, angles periodic.

    Node index n_rows * n_theta stands for the disc inside ring 0 (the origin of
    a uniform mesh or the core of a log mesh); it joins every masked ring-0 node.
    """
    rows, m = mask.shape
    idx = np.arange(rows * m).reshape(rows, m)
    src, dst = [], []
    both = mask & np.roll(mask, -1, axis=1)
    src.append(idx[both]); dst.append(np.roll(idx, -1, axis=1)[both])
    both = mask[:-1] & mask[1:]
    src.append(idx[:-1][both]); dst.append(idx[1:][both])
    virtual = rows * m
    if center_node:
        ring0 = idx[0][mask[0]]
        src.append(ring0); dst.append(np.full(ring0.size, virtual))
    src = np.concatenate(src); dst = np.concatenate(dst)
    graph = coo_matrix((np.ones(src.size), (src, dst)), shape=(virtual + 1, virtual + 1))
    _, labels = connected_components(graph, directed=False)
    return labels[:-1].reshape(rows, m), labels[-1]


def _angular_arc(ms: np.ndarray, m: int) -> tuple[int, int] | None:
    """Smallest cyclic index arc (start, length) covering ``ms``; None if nearly full."""
    u = np.unique(ms)
    gaps = np.diff(np.append(u, u[0] + m))
    j = int(np.argmax(gaps))
    start = int(u[(j + 1) % u.size])
    length = m - int(gaps[j]) + 1
    if length >= m - 2:
        return None
    return start, length


def _sector_loop(i_lo: int, i_hi: int, m0: int, length: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Node indices of the positively oriented boundary of an annular sector."""
    ms = (m0 + np.arange(length)) % m
    rows = np.arange(i_lo, i_hi + 1)
    ii = np.concatenate([np.full(length - 1, i_hi), rows[::-1][:-1],
                         np.full(length - 1, i_lo), rows[:-1]])
    mm = np.concatenate([ms[:-1], np.full(rows.size - 1, ms[-1]),
                         ms[::-1][:-1], np.full(rows.size - 1, ms[0])])
    return ii, mm


def _core_center(field: Field2D, degree: int) -> complex | None:
    """Zero centroid from ring-0 Fourier modes, in computational coordinates."""
    mesh = field.mesh
    coeffs = np.fft.fft(field.u[0]) / mesh.n_theta
    top = coeffs[degree % mesh.n_theta]
    if degree < 1 or abs(top) == 0:
        return None
    w = complex(-coeffs[(degree - 1) % mesh.n_theta] / (degree * top) * mesh.r_inner)
    return w if abs(w) < mesh.r_inner else None


def _virtual_masked(field: Field2D, mask: np.ndarray) -> bool:
    mesh = field.mesh
    if mesh.core_degree > 0:
        return True
    return mesh.kind == "uniform" and bool(mask[0].any())


def _enclosing_loop(field: Field2D, nodes: np.ndarray, has_center: bool,
                    others: np.ndarray, others_center: bool, level: float):
    """Smallest ring-aligned loop around ``nodes`` with ρ > level on it and no
    foreign low-modulus node inside; None if there is none."""
    mesh = field.mesh
    rho = field.modulus
    n_ring, m = mesh.n_r, mesh.n_theta
    i_hi = int(nodes[:, 0].max()) if nodes.size else -1
    i_lo = int(nodes[:, 0].min()) if nodes.size else 0
    arc = None if has_center or not nodes.size else _angular_arc(nodes[:, 1], m)
    for k in range(1, n_ring + 1):
        top = i_hi + k
        if top > n_ring:
            return None
        if arc is None or i_lo - k < 0:
            ii, mm = np.full(m, top), np.arange(m)
            blocked = others[:top].any() or (others_center and not has_center)
        else:
            start = arc[0] - k
            length = min(arc[1] + 2 * k, m - 1)
            ii, mm = _sector_loop(i_lo - k, top, start, length, m)
            cols = (start + 1 + np.arange(length - 2)) % m
            blocked = others[i_lo - k + 1:top][:, cols].any()
        if blocked:
            return None
        if np.all(rho[ii, mm] > level):
            return ii, mm
    return None


def _detect_level(field: Field2D, region: np.ndarray, virtual: bool, level: float,
                  outside: np.ndarray) -> list[tuple]:
    """Vortices inside ``region`` = {ρ < level} ∩ (parent component).

    Components of degree at least 2 are re-examined at lower thresholds and
    replaced by their pieces when those carry nonzero degrees adding up to
    the parent degree, so nearby distinct zeros are reported separately
    while a genuine multiple zero stays whole.
    """
    mesh = field.mesh
    rho = field.modulus
    center_in = mesh.kind == "uniform" or mesh.core_degree > 0
    labels, vlabel = _components(region, center_in)
    ids = sorted(set(labels[region].tolist()) | ({int(vlabel)} if virtual else set()))
    out = []
    for cid in ids:
        own = region & (labels == cid)
        nodes = np.argwhere(own)
        has_center = virtual and cid == vlabel
        others = outside | (region & ~own)
        others_center = virtual and not has_center
        loop = _enclosing_loop(field, nodes, has_center, others, others_center, level)
        if loop is None:
            raise ResolutionError("no mesh loop isolates a vortex component")
        try:
            degree = winding_number(field.u[loop])
        except (DegenerateLoopError, UndersampledError) as exc:
            raise ResolutionError(f"enclosing loop is under-resolved: {exc}") from exc
        pieces = None
        if abs(degree) >= 2:
            pieces = _split(field, own, has_center, level, degree, others)
        if pieces is None:
            out.append((nodes, has_center, degree, loop))
        else:
            out.extend(pieces)
    return out


def _split(field: Field2D, own: np.ndarray, has_center: bool, level: float,
           degree: int, outside: np.ndarray):
    rho = field.modulus
    floor = 0.0 if (has_center and field.mesh.core_degree > 0) or not own.any() else rho[own].min()
    lvl = level
    for _ in range(SPLIT_LEVELS):
        lvl *= SPLIT_RATIO
        if lvl <= floor:
            return None
        sub = own & (rho < lvl)
        sub_virtual = has_center and (field.mesh.core_degree > 0 or bool(sub[0].any()))
        n_sub = np.unique(_components(sub, True)[0][sub]).size + (1 if sub_virtual and not sub[0].any() else 0)
        if n_sub < 2:
            continue
        try:
            pieces = _detect_level(field, sub, sub_virtual, lvl, outside)
        except ResolutionError:
            continue
        pieces = [p for p in pieces if p[2] != 0]
        if len(pieces) >= 2 and sum(p[2] for p in pieces) == degree:
            return pieces
    return None


def detect_vortices(field: Field2D, beta: float | None = None) -> VortexDetection:
    """Components of {|u| < β} with their degrees on enclosing mesh loops.

    Loops are ring-aligned annular sectors grown around each component until
    the modulus exceeds β on the whole loop; a component reaching the disc
    inside ring 0 is enclosed by a full ring instead.
    """
    mesh = field.mesh
    beta = default_beta(field.degree) if beta is None else _check_beta(beta, field.degree)
    rho = field.modulus
    mask = rho < beta
    mask[-1] = False
    pieces = _detect_level(field, mask, _virtual_masked(field, mask), beta, np.zeros_like(mask))
    z_phys = mesh.points()
    w_comp = mesh.computational_points()
    warnings = []
    found = []
    for nodes, has_center, degree, loop in pieces:
        near = bool(nodes.size) and int(nodes[:, 0].max()) >= mesh.n_r - BOUNDARY_WARNING_CELLS
        if near:
            warnings.append("vortex component within 3 cells of the boundary")
        center = _component_center(field, nodes, has_center, degree, w_comp)
        center_phys = complex(mobius(mesh.center, center)) if mesh.center != 0 else center
        radius = float(np.max(np.abs(z_phys[loop] - center_phys)))
        min_mod = float(rho[nodes[:, 0], nodes[:, 1]].min()) if nodes.size else 0.0
        if has_center and mesh.core_degree > 0:
            min_mod = 0.0
        found.append(Vortex(center_phys, radius, int(degree), min_mod, int(len(nodes)), near))
    return VortexDetection(tuple(found), beta, warnings)


def _component_center(field: Field2D, nodes: np.ndarray, has_center: bool,
                      degree: int, w: np.ndarray) -> complex:
    """Modulus-weighted location of the minimum, in computational coordinates.

    Near a vortex ρ^{1/ε} grows like the distance, so weights ρ^{-2/ε} on the
    minimal node and its neighbours form an inverse-square-distance average.
    """
    if has_center:
        c = _core_center(field, degree)
        if c is not None:
            return c
        if not nodes.size:
            return 0j
    rho = field.modulus
    i, m = nodes[np.argmin(rho[nodes[:, 0], nodes[:, 1]])]
    n = field.mesh.n_theta
    cand = [(i, m), (i, (m + 1) % n), (i, (m - 1) % n)]
    if i + 1 < rho.shape[0]:
        cand.append((i + 1, m))
    if i > 0:
        cand.append((i - 1, m))
    ii, mm = np.array(cand).T
    logw = -(2.0 / field.eps) * np.log(np.maximum(rho[ii, mm], 1e-300))
    weights = np.exp(logw - logw.max())
    return complex(np.sum(weights * w[ii, mm]) / np.sum(weights))


# finite differences in (s, θ)

def _s_derivatives(X: np.ndarray, s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """First and second s-derivatives on rows 1..N-1 (three-point, nonuniform)."""
    hm = (s[1:-1] - s[:-2]).reshape((-1,) + (1,) * (X.ndim - 1))
    hp = (s[2:] - s[1:-1]).reshape(hm.shape)
    f0, fm, fp = X[1:-1], X[:-2], X[2:]
    d1 = (hm * hm * fp - hp * hp * fm + (hp * hp - hm * hm) * f0) / (hm * hp * (hm + hp))
    d2 = 2.0 * ((fp - f0) / hp - (f0 - fm) / hm) / (hp + hm)
    return d1, d2


def _theta_derivatives(X: np.ndarray, dtheta: float) -> tuple[np.ndarray, np.ndarray]:
    fp, fm = np.roll(X, -1, axis=1), np.roll(X, 1, axis=1)
    return (fp - fm) / (2 * dtheta), (fp - 2 * X + fm) / dtheta ** 2


def _node_measure(field: Field2D) -> np.ndarray:
    """ds dθ weight of each node (rows 0..N)."""
    s = field.mesh.s
    ds = np.empty_like(s)
    ds[1:-1] = 0.5 * (s[2:] - s[:-2])
    ds[0] = s[1] - s[0]
    ds[-1] = 0.5 * (s[-1] - s[-2])
    return ds * field.mesh.dtheta


def _masked_l2(density: np.ndarray, measure: np.ndarray, mask: np.ndarray) -> float:
    if not mask.any():
        return 0.0
    return float(np.sqrt(np.sum(np.abs(density[mask]) ** 2 * np.broadcast_to(measure, mask.shape)[mask])))


def _interior_mask(field: Field2D, beta: float) -> np.ndarray:
    """Rows 1..N-2 with ρ > β.

    Ring N-1 is dropped: on the staggered mesh its outer gap is half a cell,
    so flux-form second differences there are only first-order consistent.
    """
    mask = field.modulus > beta
    mask[0] = False
    mask[-2:] = False
    return mask


@dataclass
class IdentityResiduals:
    el: float
    current_div: float
    subharmonicity_min: float
    beta: float
    nodes_used: int

    def to_dict(self) -> dict:
        return asdict(self)


def identity_residuals(field: Field2D, beta: float | None = None) -> IdentityResiduals:
    """Residuals of div(u∧∇u) = 0 and of Δρ² = 2ε²(|∇u|² + (1/ε²-1)|∇ρ|²).

    ``el`` uses the nodal form u∧Δu with centred differences; ``current_div``
    uses the conservative edge fluxes of the discrete Dirichlet form, which
    vanish exactly at stationary points of the discrete energy. Both are L²
    norms over interior nodes with ρ > β; ``subharmonicity_min`` is the
    minimum pointwise defect over the same nodes.
    """
    mesh = field.mesh
    beta = default_beta(field.degree) if beta is None else float(beta)
    u = field.u
    rho = field.modulus
    meas = _node_measure(field)[:, None]
    mask = _interior_mask(field, beta)

    el = np.zeros(mesh.shape)
    _, u_ss = _s_derivatives(u, mesh.s)
    _, u_tt = _theta_derivatives(u, mesh.dtheta)
    el[1:-1] = np.imag(np.conj(u[1:-1]) * (u_ss + u_tt[1:-1]))

    functional = DiscreteEnergy(mesh, field.eps)
    a, b = functional.a[:, None], functional.b[:, None]
    area = b * mesh.dtheta ** 2
    rad = a * np.imag(np.conj(u[:-1]) * u[1:])
    ang = b * np.imag(np.conj(u) * np.roll(u, -1, axis=1))
    div = ang - np.roll(ang, 1, axis=1)
    div[:-1] += rad
    div[1:] -= rad
    current = np.where(area > 0, div / np.where(area > 0, area, 1.0), 0.0)

    lap = -functional.laplacian(rho ** 2) / np.where(area > 0, area, 1.0)
    du = np.abs(np.diff(u, axis=0)) ** 2
    dr = np.diff(rho, axis=0) ** 2
    dut = np.abs(np.roll(u, -1, axis=1) - u) ** 2
    drt = (np.roll(rho, -1, axis=1) - rho) ** 2
    stiff = functional.stiffness

    def density(radial, angular):
        out = b * 0.5 * (angular + np.roll(angular, 1, axis=1))
        out = np.broadcast_to(out, mesh.shape).copy()
        out[:-1] += 0.5 * a * radial
        out[1:] += 0.5 * a * radial
        return out / np.where(area > 0, area, 1.0)

    defect = lap - 2 * field.eps ** 2 * (density(du, dut) + stiff * density(dr, drt))
    sub = float(defect[mask].min()) if mask.any() else 0.0
    return IdentityResiduals(_masked_l2(el, meas, mask), _masked_l2(current, meas, mask),
                             sub, beta, int(mask.sum()))


def pohozaev_residual(field: Field2D) -> float:
    """Normalized boundary defect of ∫(|∂_r u|² - |∂_τ g|²) + (1/ε²-1)|∂_r ρ|².

    ∂_r uses a one-sided three-point difference at r = 1 and ∂_τ g is the
    spectral derivative of the boundary ring. Integrals are physical: on a
    Möbius-centred mesh each term carries the factor 1/|M'| on the circle.
    """
    mesh = field.mesh
    s = mesh.s[-3:]
    h1, h2 = s[2] - s[1], s[2] - s[0]
    # Lagrange weights for f'(s_N) from s_{N-2}, s_{N-1}, s_N
    w0 = h1 / ((s[0] - s[1]) * (s[0] - s[2]))
    w1 = h2 / ((s[1] - s[0]) * (s[1] - s[2]))
    w2 = 1.0 / h1 + 1.0 / h2
    u = field.u[-3:]
    rho = field.modulus[-3:]
    u_r = w0 * u[0] + w1 * u[1] + w2 * u[2]
    rho_r = w0 * rho[0] + w1 * rho[1] + w2 * rho[2]
    ring = field.u[-1]
    k = np.fft.fftfreq(mesh.n_theta, 1.0 / mesh.n_theta)
    u_t = np.fft.ifft(1j * k * np.fft.fft(ring))
    jac = np.ones(mesh.n_theta) if mesh.center == 0 else \
        np.abs(mobius_derivative(mesh.center, mesh.computational_points()[-1]))
    stiff = 1.0 / field.eps ** 2 - 1.0
    tang = np.sum(np.abs(u_t) ** 2 / jac)
    if tang == 0.0:
        return 0.0
    normal = np.sum((np.abs(u_r) ** 2 + stiff * rho_r ** 2) / jac)
    return float((normal - tang) / tang)


def hopf_differential(field: Field2D) -> np.ndarray:
    """χ in the coordinate ζ = ln w on rows 1..N-1 (rows 0 and N are NaN).

    χ_ζ = |u_s|² - |u_θ|² - 2i u_s·u_θ + (1/ε² - 1)(ρ_s² - ρ_θ² - 2i ρ_s ρ_θ),
    the quadratic-differential transform w² χ_w of the Cartesian expression.
    """
    mesh = field.mesh
    u, rho = field.u, field.modulus
    stiff = 1.0 / field.eps ** 2 - 1.0
    u_s, _ = _s_derivatives(u, mesh.s)
    r_s, _ = _s_derivatives(rho, mesh.s)
    u_t = _theta_derivatives(u, mesh.dtheta)[0][1:-1]
    r_t = _theta_derivatives(rho, mesh.dtheta)[0][1:-1]
    dot = np.real(u_s * np.conj(u_t))
    chi = np.full(mesh.shape, np.nan, dtype=complex)
    chi[1:-1] = (np.abs(u_s) ** 2 - np.abs(u_t) ** 2 - 2j * dot
                 + stiff * (r_s ** 2 - r_t ** 2 - 2j * r_s * r_t))
    return chi


def hopf_cr_residual(field: Field2D, beta: float | None = None) -> float:
    """L² norm of ∂_ζ̄ χ = (∂_s + i∂_θ)χ / 2 over nodes with ρ > β."""
    mesh = field.mesh
    beta = default_beta(field.degree) if beta is None else float(beta)
    chi = hopf_differential(field)
    res = np.zeros(mesh.shape, dtype=complex)
    inner = chi[1:-1]
    d_s, _ = _s_derivatives(inner, mesh.s[1:-1])
    d_t = _theta_derivatives(inner, mesh.dtheta)[0][1:-1]
    res[2:-2] = 0.5 * (d_s + 1j * d_t)
    mask = _interior_mask(field, beta)
    mask[1] = False
    return _masked_l2(res, _node_measure(field)[:, None], mask)


def equipartition_ratio(b: EnergyBreakdown) -> float:
    """modulus_term / dirichlet_term."""
    if b.dirichlet_term == 0.0:
        raise UndefinedRatioError("the Dirichlet term vanishes")
    return b.modulus_term / b.dirichlet_term


# comparisons on an annulus

def _probe_nodes(field: Field2D, config: VortexConfig, annulus: tuple[float, float]) -> np.ndarray:
    r_in, r_out = float(annulus[0]), float(annulus[1])
    if not 0.0 <= r_in < r_out <= 1.0:
        raise InvalidProbeError("annulus must satisfy 0 <= r_in < r_out <= 1")
    z = field.mesh.points()
    size = field.mesh.cell_size()
    for a in config.points:
        near = np.unravel_index(np.argmin(np.abs(z - a)), z.shape)
        margin = PROBE_MARGIN_CELLS * size[near]
        gap = max(r_in - abs(a), abs(a) - r_out, 0.0)
        if gap < margin:
            raise InvalidProbeError(
                f"annulus ({r_in}, {r_out}) comes within {gap:.3g} of the vortex at {a}; "
                f"margin is {margin:.3g}")
    zabs = np.abs(z)
    sel = (zabs >= r_in) & (zabs <= r_out)
    if not sel.any():
        raise InvalidProbeError("annulus contains no mesh nodes")
    return sel


def modulus_asymptotics_error(field: Field2D, config: VortexConfig,
                              annulus: tuple[float, float]) -> float:
    """sup over annulus nodes of |ln|u|/ε - Φ₀|."""
    sel = _probe_nodes(field, config, annulus)
    z = field.mesh.points()[sel]
    rho = field.modulus[sel]
    if np.any(rho <= 0.0):
        raise InvalidProbeError("field vanishes inside the probe annulus")
    return float(np.max(np.abs(np.log(rho) / field.eps - dirichlet_phi0(config, z))))


def compare_to_canonical(field: Field2D, config: VortexConfig, g: BoundaryMap,
                         annulus: tuple[float, float]) -> float:
    """sup over annulus nodes of the angle between u/|u| and the canonical map."""
    sel = _probe_nodes(field, config, annulus)
    z = field.mesh.points()[sel]
    u = field.u[sel]
    if np.any(u == 0):
        raise InvalidProbeError("field vanishes inside the probe annulus")
    ref = canonical_harmonic_map(config, g, z)
    return float(np.max(np.abs(np.angle(u * np.conj(ref)))))


# aggregate report

@dataclass
class DiagnosticsReport:
    el_residual: float
    pohozaev_residual: float
    hopf_cr_residual: float
    current_div_residual: float
    subharmonicity_min: float
    equipartition_ratio: float | None
    phi0_sup_error: float | None
    canonical_sup_error: float | None
    annulus: tuple | None
    beta: float
    detection: VortexDetection | None
    resolution: dict
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {k: getattr(self, k) for k in (
            "el_residual", "pohozaev_residual", "hopf_cr_residual", "current_div_residual",
            "subharmonicity_min", "equipartition_ratio", "phi0_sup_error",
            "canonical_sup_error", "beta", "notes")}
        out["annulus"] = list(self.annulus) if self.annulus else None
        out["measure"] = "ds dtheta over interior nodes with |u| > beta"
        out["detection"] = self.detection.to_dict() if self.detection else None
        out["resolution"] = self.resolution
        return out


def diagnose(field: Field2D, breakdown: EnergyBreakdown | None = None,
             config: VortexConfig | None = None, annulus: tuple[float, float] | None = None,
             beta: float | None = None, g: BoundaryMap | None = None) -> DiagnosticsReport:
    """Run every check that the inputs allow; failures become notes."""
    notes = []
    D = field.degree
    beta = default_beta(D) if beta is None else _check_beta(beta, D)
    ids = identity_residuals(field, beta)
    if breakdown is None:
        breakdown = DiscreteEnergy(field.mesh, field.eps).breakdown(field.values)
    try:
        ratio = equipartition_ratio(breakdown)
    except UndefinedRatioError as exc:
        ratio = None
        notes.append(str(exc))
    try:
        detection = detect_vortices(field, beta)
        notes.extend(detection.warnings)
    except ResolutionError as exc:
        detection = None
        notes.append(f"detection failed: {exc}")
    phi0_err = canon_err = None
    g = g or field.boundary
    if annulus is not None and config is not None:
        try:
            if config.points:
                phi0_err = modulus_asymptotics_error(field, config, annulus)
            if g is not None:
                canon_err = compare_to_canonical(field, config, g, annulus)
        except Exception as exc:  # report, do not abort the run
            notes.append(f"probe comparison skipped: {exc}")
    return DiagnosticsReport(ids.el, pohozaev_residual(field), hopf_cr_residual(field, beta),
                             ids.current_div, ids.subharmonicity_min, ratio, phi0_err, canon_err,
                             tuple(annulus) if annulus else None, beta, detection,
                             {"mesh": field.mesh.describe(), "nodes_used": ids.nodes_used}, notes)
