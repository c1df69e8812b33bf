"""Construction-A module lattices: sampling, exact SVP, ball counts.

A lattice L(P, s) = beta * preimage of a uniformly random s-dimensional code
S inside k_P^t under reduction mod an unramified prime P of O_K; the scaling
beta = N(P)^{-(1-s/t)/d} equalizes covolumes across s, and every basis is
globally rescaled so the covolume is exactly one. Coordinates are Minkowski:
each K_R factor contributes (sqrt2*Re sigma, sqrt2*Im sigma) per conjugate
pair, so the ambient inner product is the Euclidean one of the ball geometry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np
import sympy

from .exact import hnf
from .fieldcore import CyclotomicField, FieldError, make_field
from .ideals import _phi_factors_mod_p, minkowski_rows
from .reduction import count_short_vectors, lll_reduce, shortest_nonzero

MAX_ENUM_DIM = 48


class SimError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Residue fields and prime splitting
# ---------------------------------------------------------------------------

class ResidueField:
    """GF(p^f) as F_p[x]/(g): elements are integers encoding base-p digits."""

    def __init__(self, p: int, poly: tuple[int, ...]):
        self.p = p
        self.f = len(poly) - 1
        self.q = p ** self.f
        self.poly = poly
        if self.f == 1:
            self._mul_table = None
        else:
            self._build_tables()

    def _digits(self, a: int) -> list[int]:
        out = []
        for _ in range(self.f):
            out.append(a % self.p)
            a //= self.p
        return out

    def _encode(self, digits) -> int:
        val = 0
        for c in reversed(list(digits)):
            val = val * self.p + int(c) % self.p
        return val

    def _build_tables(self):
        p, f, q = self.p, self.f, self.q
        red = [(-c) % p for c in self.poly[:-1]]  # x^f = sum red[j] x^j
        mul = np.zeros((q, q), dtype=np.int64)
        for a in range(q):
            da = self._digits(a)
            for b in range(q):
                db = self._digits(b)
                prod = [0] * (2 * f - 1)
                for i, ai in enumerate(da):
                    if ai:
                        for j, bj in enumerate(db):
                            prod[i + j] = (prod[i + j] + ai * bj) % p
                for k in range(2 * f - 2, f - 1, -1):
                    top = prod[k]
                    if top:
                        prod[k] = 0
                        for j, rc in enumerate(red):
                            prod[k - f + j] = (prod[k - f + j] + top * rc) % p
                mul[a, b] = self._encode(prod[:f])
        self._mul_table = mul
        inv = np.zeros(q, dtype=np.int64)
        for a in range(1, q):
            row = mul[a]
            inv[a] = int(np.flatnonzero(row == 1)[0])
        self._inv_table = inv

    def add(self, a: int, b: int) -> int:
        if self.f == 1:
            return (a + b) % self.p
        return self._encode(x + y for x, y in zip(self._digits(a), self._digits(b)))

    def sub(self, a: int, b: int) -> int:
        if self.f == 1:
            return (a - b) % self.p
        return self._encode(x - y for x, y in zip(self._digits(a), self._digits(b)))

    def mul(self, a: int, b: int) -> int:
        if self.f == 1:
            return (a * b) % self.p
        return int(self._mul_table[a, b])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero residue")
        if self.f == 1:
            return pow(a, self.p - 2, self.p)
        return int(self._inv_table[a])

    def lift_coeffs(self, a: int) -> list[int]:
        """Representative of a as integer coefficients of 1, zeta, ..., zeta^{f-1}."""
        return self._digits(a)


@dataclass(frozen=True)
class PrimeSplit:
    field: CyclotomicField
    p: int
    f: int
    q: int
    poly: tuple[int, ...]     # monic degree-f factor of Phi_m mod p, ascending

    def residue_field(self) -> ResidueField:
        return ResidueField(self.p, self.poly)


def split_prime(field: CyclotomicField, p: int) -> PrimeSplit:
    """Splitting data of an unramified rational prime, deterministic factor choice."""
    if not sympy.isprime(p):
        raise SimError(f"{p} is not prime")
    if math.gcd(p, field.m) > 1:
        raise SimError(f"prime {p} ramifies in conductor {field.m}")
    f = int(sympy.n_order(p, field.m)) if field.m > 2 else 1
    factors = [tuple(c) for c in _phi_factors_mod_p(field, p)
               if len(c) - 1 == f]
    if not factors:
        raise SimError("no factor of the expected residue degree")
    return PrimeSplit(field=field, p=p, f=f, q=p ** f, poly=min(factors))


# ---------------------------------------------------------------------------
# Random codes
# ---------------------------------------------------------------------------

def _rref(gf: ResidueField, rows: list[list[int]]) -> list[list[int]]:
    """Reduced row echelon form over GF(q); returns only nonzero rows."""
    rows = [list(r) for r in rows]
    nr, ncols = len(rows), len(rows[0])
    rank = 0
    for col in range(ncols):
        piv = next((r for r in range(rank, nr) if rows[r][col] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = gf.inv(rows[rank][col])
        rows[rank] = [gf.mul(inv, x) for x in rows[rank]]
        for r in range(nr):
            if r != rank and rows[r][col] != 0:
                factor = rows[r][col]
                rows[r] = [gf.sub(x, gf.mul(factor, y))
                           for x, y in zip(rows[r], rows[rank])]
        rank += 1
        if rank == nr:
            break
    return rows[:rank]


def sample_code(rng: np.random.Generator, gf: ResidueField, t: int,
                s: int) -> tuple[tuple[int, ...], ...]:
    """Uniformly random s-dimensional subspace of GF(q)^t, as RREF rows.

    Rejection on full-rank random matrices: row spaces of full-rank s x t
    matrices are uniform over the Grassmannian.
    """
    if not 1 <= s <= t - 1:
        raise SimError(f"need 1 <= s <= t-1, got s={s}, t={t}")
    while True:
        mat = rng.integers(0, gf.q, size=(s, t))
        rref = _rref(gf, mat.tolist())
        if len(rref) == s:
            return tuple(tuple(int(x) for x in row) for row in rref)


# ---------------------------------------------------------------------------
# Lifting codes to lattices
# ---------------------------------------------------------------------------

@dataclass
class LatticeBasis:
    matrix: np.ndarray            # n x n rows, Minkowski coordinates, covolume 1
    coeff_basis: np.ndarray       # n x n integer rows in power-basis coordinates
    scale: float                  # global factor applied to integer coordinates
    beta: float                   # covolume-equalizing scale N(P)^{-(1-s/t)/d}
    covolume: float
    provenance: dict = dc_field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


def _block_embed(fld: CyclotomicField, coeff_rows: np.ndarray, t: int,
                 mink: np.ndarray) -> np.ndarray:
    d = fld.d
    out = np.zeros((coeff_rows.shape[0], t * d))
    for b in range(t):
        out[:, b * d:(b + 1) * d] = coeff_rows[:, b * d:(b + 1) * d].astype(float) @ mink
    return out


def lift_to_lattice(fld: CyclotomicField, split: PrimeSplit,
                    code: tuple[tuple[int, ...], ...], t: int,
                    provenance: dict | None = None) -> LatticeBasis:
    """Z-basis of the unit-covolume rescale of beta * preimage of the code."""
    d = fld.d
    s = len(code)
    gf = split.residue_field()
    gens: list[list[int]] = []

    def as_block_vector(elems: list[list[int]]) -> list[int]:
        flat = []
        for coeffs in elems:
            flat.extend(list(coeffs) + [0] * (d - len(coeffs)))
        return flat

    # O_K-generators: lifted code rows, then p*e_i and g(zeta)*e_i spanning P*e_i
    ok_gens: list[list[list[int]]] = []
    for row in code:
        ok_gens.append([gf.lift_coeffs(c) for c in row])
    gpoly = [c % split.p for c in split.poly]
    for i in range(t):
        for head in ([split.p], gpoly):
            vec = [[0] for _ in range(t)]
            vec[i] = list(head)
            ok_gens.append(vec)
    # expand each O_K-generator to d Z-generators via multiplication by zeta^j
    zeta_mats = []
    zeta = fld.zeta()
    cur = fld.one()
    for _ in range(d):
        zeta_mats.append(cur.multiplication_matrix())
        cur = cur * zeta
    for vec in ok_gens:
        base = [fld.element(coeffs) for coeffs in vec]
        for j in range(d):
            shifted = []
            for el in base:
                prod = el * fld.zeta(j)
                shifted.append([int(c) for c in prod.coeffs])
            gens.append(as_block_vector(shifted))

    basis_rows = hnf(gens)
    n = t * d
    if len(basis_rows) != n:
        raise SimError("lattice generator set is rank-deficient")
    coeff_basis = np.array(basis_rows, dtype=object)
    mink = minkowski_rows(fld)
    real = _block_embed(fld, np.array(basis_rows, dtype=np.int64), t, mink)
    sign, logdet = np.linalg.slogdet(real)
    if sign == 0:
        raise SimError("degenerate embedded basis")
    scale = math.exp(-logdet / n)
    matrix = real * scale
    covol = abs(np.linalg.det(matrix))
    if abs(covol - 1.0) > 1e-9:
        raise SimError(f"covolume normalization failed: {covol}")
    beta = split.q ** (-(1.0 - s / t) / d)
    return LatticeBasis(matrix=matrix, coeff_basis=coeff_basis, scale=scale,
                        beta=beta, covolume=covol,
                        provenance=dict(provenance or {}, p=split.p, f=split.f,
                                        q=split.q, s=s, t=t, m=fld.m))


def reduce_basis(basis: LatticeBasis, delta: float = 0.99) -> LatticeBasis:
    """delta-LLL reduction of the embedded basis (same lattice)."""
    if not 0.25 < delta < 1:
        raise SimError(f"delta must lie in (0.25, 1), got {delta}")
    red, transform = lll_reduce(basis.matrix, delta)
    tmat = np.array(transform, dtype=object)
    new_coeff = tmat @ basis.coeff_basis
    return LatticeBasis(matrix=red, coeff_basis=new_coeff, scale=basis.scale,
                        beta=basis.beta, covolume=basis.covolume,
                        provenance=dict(basis.provenance, lll_delta=delta))


def shortest_vector(basis: LatticeBasis) -> tuple[float, np.ndarray]:
    """Exact lambda_1 and an integer witness (coefficients in the given basis)."""
    if basis.n > MAX_ENUM_DIM:
        raise SimError(f"dimension {basis.n} above enumeration cap {MAX_ENUM_DIM}")
    return shortest_nonzero(basis.matrix)


def count_in_ball(basis: LatticeBasis, V: float, omega: int | None = None) -> int:
    """Exact rho_V: nonzero lattice points of norm <= gamma(n) * V^{1/n}."""
    from .svpredict import gamma_n
    if basis.n > MAX_ENUM_DIM:
        raise SimError(f"dimension {basis.n} above enumeration cap {MAX_ENUM_DIM}")
    if V <= 0:
        return 0
    n = basis.n
    radius = gamma_n(n) * V ** (1.0 / n)
    red, _ = lll_reduce(basis.matrix)
    count, _best = count_short_vectors(red, radius * radius)
    if omega is not None and count % omega:
        raise SimError(f"ball count {count} is not a multiple of omega = {omega}")
    return count


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------

@dataclass
class SimReport:
    config: dict
    n_samples: int
    V: float
    rho_values: list[int]
    lambda1_values: list[float]
    empirical_mean: float
    empirical_second_moment: float
    zero_frequency: float
    predictions: dict

    def as_json(self) -> dict:
        return {"config": self.config, "n_samples": self.n_samples, "V": self.V,
                "rho_values": self.rho_values,
                "lambda1_values": self.lambda1_values,
                "empirical_mean": self.empirical_mean,
                "empirical_second_moment": self.empirical_second_moment,
                "zero_frequency": self.zero_frequency,
                "predictions": self.predictions}


def run_experiment(m: int, t: int, p: int, s: int, V: float, N: int,
                   master_seed: int, epsilon: float = 0.15) -> SimReport:
    """Sample N Construction-A lattices and compare to the theory side-by-side.

    Sampling law: uniform codes under an unramified prime (the Haar proxy of
    the construction), labeled as such in the report. Per-sample RNG streams
    derive from (master_seed, index), so results are scheduling-independent.
    """
    from . import bounds as B
    from .heights import setup_constants
    from .svpredict import module_prediction, sv_bracket

    fld = make_field(m)
    split = split_prime(fld, p)
    gf = split.residue_field()
    omega = fld.omega
    n = t * fld.d
    if n > MAX_ENUM_DIM:
        raise SimError(f"dimension {n} above enumeration cap {MAX_ENUM_DIM}")

    rho_values: list[int] = []
    lambda1_values: list[float] = []
    for idx in range(N):
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=master_seed, spawn_key=(idx,)))
        code = sample_code(rng, gf, t, s)
        basis = lift_to_lattice(fld, split, code, t,
                                provenance={"seed": master_seed, "index": idx})
        red = reduce_basis(basis)
        rho_values.append(count_in_ball(red, V, omega=omega))
        lam1, _w = shortest_vector(red)
        lambda1_values.append(float(lam1))

    mean = float(np.mean(rho_values))
    second = float(np.mean(np.array(rho_values, dtype=float) ** 2))
    zero_freq = float(np.mean([r == 0 for r in rho_values]))

    # theory side: explicit eta bound at the figure's height cutoff
    consts = setup_constants(fld, "uniform_cyclotomic")
    h0 = min(2.0, max(consts.c_s, math.log(100.0) / fld.d))
    predictions: dict = {
        "sampling_law": "construction_a_uniform_code",
        "mean": V,
        "poisson_zero_probability": math.exp(-V / omega),
    }
    try:
        params = B.BoundParams(field=fld, t=t, constants=consts, h0=h0)
        report = B.eta_explicit(params)
        eta = report.eta_upper
        lo, hi = B.second_moment_enclosure(params, V, report=report)
        predictions["eta_upper"] = eta
        predictions["second_moment_enclosure"] = [lo, hi]
        err = omega * eta
    except (B.BoundError, FieldError) as exc:
        predictions["eta_upper"] = None
        predictions["second_moment_note"] = str(exc)
        err = 0.0
    bracket = sv_bracket(fld, t, err, epsilon)
    predictions["sv_bracket"] = bracket.as_json()
    predictions["module_prediction"] = module_prediction(fld, t).as_json()

    return SimReport(
        config={"m": m, "t": t, "p": p, "s": s, "V": V, "N": N,
                "master_seed": master_seed, "epsilon": epsilon},
        n_samples=N, V=float(V), rho_values=rho_values,
        lambda1_values=lambda1_values, empirical_mean=mean,
        empirical_second_moment=second, zero_frequency=zero_freq,
        predictions=predictions)
