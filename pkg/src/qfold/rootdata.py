"""Root data, irreducible characters and irrep decomposition.

Weights are written in Dynkin coordinates (the fundamental-weight basis),
optionally followed by free central coordinates on which the Weyl group
acts trivially.  The Cartan matrix convention is
``cartan[i][j] = <alpha_i, alpha_j^vee>``, so the simple root ``alpha_i``
in Dynkin coordinates is row ``i``.
"""
from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .charring import TorusCharacter, char_product
from .errors import NotWeylSymmetric, ReconstructionMismatch, UnsupportedType


def _cartan_a(r):
    return tuple(
        tuple(2 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(r))
        for i in range(r)
    )


def _invert(mat):
    n = len(mat)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(mat)]
    for c in range(n):
        p = next(r for r in range(c, n) if aug[r][c] != 0)
        aug[c], aug[p] = aug[p], aug[c]
        piv = aug[c][c]
        aug[c] = [x / piv for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c]:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return [row[n:] for row in aug]


@dataclass(frozen=True)
class RootDatum:
    label: str
    cartan: tuple
    symmetrizer: tuple  # d_i = |alpha_i|^2 / 2
    center_rank: int = 0

    @property
    def rank(self) -> int:
        """Semisimple rank."""
        return len(self.cartan)

    @property
    def weight_rank(self) -> int:
        return self.rank + self.center_rank

    @cached_property
    def simple_roots(self):
        return tuple(tuple(row) for row in self.cartan)

    @cached_property
    def positive_root_coeffs(self):
        """Positive roots as simple-root coefficient vectors, by height."""
        r = self.rank
        simple = [tuple(int(i == j) for j in range(r)) for i in range(r)]
        roots = list(simple)
        known = set(roots)
        layer = list(simple)
        while layer:
            nxt = []
            for beta in layer:
                for i in range(r):
                    # alpha_i string through beta: beta - p alpha_i, ..., beta + q alpha_i
                    p = 0
                    down = list(beta)
                    while True:
                        down[i] -= 1
                        if tuple(down) in known:
                            p += 1
                        else:
                            break
                    pairing = sum(beta[j] * self.cartan[j][i] for j in range(r))
                    if p - pairing > 0:
                        up = list(beta)
                        up[i] += 1
                        up = tuple(up)
                        if up not in known:
                            known.add(up)
                            nxt.append(up)
            roots.extend(sorted(nxt))
            layer = nxt
        return tuple(roots)

    @cached_property
    def positive_roots(self):
        """Positive roots in Dynkin coordinates (central part zero)."""
        out = []
        for c in self.positive_root_coeffs:
            w = [sum(c[i] * self.cartan[i][j] for i in range(self.rank)) for j in range(self.rank)]
            out.append(tuple(w) + (0,) * self.center_rank)
        return tuple(out)

    @cached_property
    def fundamental_weights(self):
        n = self.weight_rank
        return tuple(tuple(int(i == j) for j in range(n)) for i in range(self.rank))

    @cached_property
    def rho(self):
        return (1,) * self.rank + (0,) * self.center_rank

    @cached_property
    def _cartan_inverse(self):
        return _invert(self.cartan) if self.rank else []

    @cached_property
    def _gram(self):
        """(omega_i, omega_j) = (C^{-1} D)_{ij}."""
        inv = self._cartan_inverse
        return [[inv[i][j] * self.symmetrizer[j] for j in range(self.rank)] for i in range(self.rank)]

    def inner(self, u, v) -> Fraction:
        g = self._gram
        r = self.rank
        return sum((u[i] * g[i][j] * v[j] for i in range(r) for j in range(r)), Fraction(0))

    def coroot_pairing(self, lam, coeffs) -> Fraction:
        """<lam, alpha^vee> for the positive root with simple coefficients ``coeffs``."""
        d = self.symmetrizer
        norm = sum(
            coeffs[i] * coeffs[j] * self.cartan[i][j] * d[j]
            for i in range(self.rank)
            for j in range(self.rank)
        )
        d_alpha = Fraction(norm, 2)
        return sum(Fraction(coeffs[i] * d[i] * lam[i]) for i in range(self.rank)) / d_alpha

    # -- Weyl group ----------------------------------------------------------

    def reflect(self, i: int, w):
        w = list(w)
        k = w[i]
        for j in range(self.rank):
            w[j] -= k * self.cartan[i][j]
        return tuple(w)

    @cached_property
    def weyl_group(self):
        """All Weyl elements as (matrix, sign); matrices act on Dynkin columns."""
        r = self.rank
        ident = tuple(tuple(int(i == j) for j in range(r)) for i in range(r))
        gens = []
        for i in range(r):
            cols = [self.reflect(i, tuple(int(k == j) for k in range(r))) for j in range(r)]
            gens.append(tuple(tuple(cols[j][k] for j in range(r)) for k in range(r)))
        seen = {ident: 1}
        queue = deque([ident])
        while queue:
            g = queue.popleft()
            for s in gens:
                h = tuple(
                    tuple(sum(s[a][k] * g[k][b] for k in range(r)) for b in range(r))
                    for a in range(r)
                )
                if h not in seen:
                    seen[h] = -seen[g]
                    queue.append(h)
        return tuple(sorted(seen.items()))

    def act(self, g, w):
        r = self.rank
        head = tuple(sum(g[a][b] * w[b] for b in range(r)) for a in range(r))
        return head + tuple(w[r:])

    def dominant_conjugate(self, w):
        """(dominant weight, sign of a Weyl element carrying w to it)."""
        w = tuple(w)
        sign = 1
        while True:
            i = next((i for i in range(self.rank) if w[i] < 0), None)
            if i is None:
                return w, sign
            w = self.reflect(i, w)
            sign = -sign

    def below(self, mu, lam) -> bool:
        """lam - mu is a nonnegative integer combination of simple roots (and centrals agree)."""
        r = self.rank
        if tuple(mu[r:]) != tuple(lam[r:]):
            return False
        diff = [lam[i] - mu[i] for i in range(r)]
        inv = self._cartan_inverse
        for j in range(r):
            c = sum((diff[i] * inv[i][j] for i in range(r)), Fraction(0))
            if c < 0 or c.denominator != 1:
                return False
        return True


@dataclass(frozen=True, order=True)
class IrrepLabel:
    highest: tuple
    central: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "highest", tuple(self.highest))
        object.__setattr__(self, "central", tuple(self.central))
        if any(x < 0 for x in self.highest):
            raise ValueError(f"{self.highest} is not dominant")

    @property
    def weight(self):
        return self.highest + self.central


def build_root_datum(cartan_type: str, rank: int, center_rank: int = 0) -> RootDatum:
    if cartan_type.upper() != "A" or rank < 1:
        raise UnsupportedType(f"type {cartan_type}{rank} is not supported")
    return RootDatum(f"A{rank}", _cartan_a(rank), (1,) * rank, center_rank)


def product_datum(*data: RootDatum) -> RootDatum:
    """Block-diagonal product; central ranks add up."""
    r = sum(d.rank for d in data)
    cartan = [[0] * r for _ in range(r)]
    sym = []
    off = 0
    for d in data:
        for i in range(d.rank):
            for j in range(d.rank):
                cartan[off + i][off + j] = d.cartan[i][j]
        sym.extend(d.symmetrizer)
        off += d.rank
    label = "x".join(d.label for d in data) or "T0"
    return RootDatum(label, tuple(map(tuple, cartan)), tuple(sym), sum(d.center_rank for d in data))


def torus_datum(center_rank: int) -> RootDatum:
    """A purely central (abelian) datum; center_rank may be 0."""
    return RootDatum(f"T{center_rank}", (), (), center_rank)


def weyl_dimension(d: RootDatum, lam) -> int:
    lam = tuple(lam)
    num = Fraction(1)
    rho = d.rho
    lr = tuple(x + y for x, y in zip(lam, rho))
    for c in d.positive_root_coeffs:
        num *= d.coroot_pairing(lr, c) / d.coroot_pairing(rho, c)
    assert num.denominator == 1
    return int(num)


def irrep_weight_multiplicities(d: RootDatum, lam: IrrepLabel) -> TorusCharacter:
    """Weight multiplicities of V_lam via Freudenthal's recursion."""
    if not isinstance(lam, IrrepLabel):
        lam = IrrepLabel(lam)
    if len(lam.highest) != d.rank or len(lam.central) != d.center_rank:
        raise ValueError(f"label {lam} does not match datum {d.label}")
    top = lam.weight
    r = d.rank

    depth = {top: 0}
    queue = deque([top])
    while queue:
        mu = queue.popleft()
        for alpha in d.simple_roots:
            nu = tuple(mu[j] - alpha[j] for j in range(r)) + mu[r:]
            if nu in depth:
                continue
            if d.below(d.dominant_conjugate(nu)[0], top):
                depth[nu] = depth[mu] + 1
                queue.append(nu)

    rho = d.rho
    lr = tuple(x + y for x, y in zip(top, rho))
    norm_top = d.inner(lr, lr)
    mult = {}
    dominant = sorted((w for w in depth if all(x >= 0 for x in w[:r])), key=lambda w: (depth[w], w))
    for mu in dominant:
        if mu == top:
            mult[mu] = 1
            continue
        acc = Fraction(0)
        for alpha in d.positive_roots:
            k = 1
            while True:
                nu = tuple(x + k * a for x, a in zip(mu, alpha))
                dom = d.dominant_conjugate(nu)[0]
                if not d.below(dom, top):
                    break
                acc += mult.get(dom, 0) * d.inner(nu, alpha)
                k += 1
        mr = tuple(x + y for x, y in zip(mu, rho))
        m = 2 * acc / (norm_top - d.inner(mr, mr))
        if m.denominator != 1:
            raise ReconstructionMismatch(f"non-integral multiplicity at {mu}")
        mult[mu] = int(m)

    full = {}
    for mu in depth:
        m = mult.get(d.dominant_conjugate(mu)[0], 0)
        if m:
            full[mu] = m
    char = TorusCharacter.from_mapping(full, d.weight_rank)
    expected = weyl_dimension(d, lam.highest)
    if char.dimension() != expected:
        raise ReconstructionMismatch(
            f"Freudenthal dimension {char.dimension()} != Weyl dimension {expected} for {lam}"
        )
    return char


def wedge_n_minus(d: RootDatum) -> TorusCharacter:
    """prod over positive roots of (1 - e^{-alpha}), as a virtual character."""
    n = d.weight_rank
    acc = TorusCharacter.unit(n)
    for alpha in d.positive_roots:
        factor = TorusCharacter.from_mapping(
            {(0,) * n: 1, tuple(-a for a in alpha): -1}, n
        )
        acc = char_product(acc, factor)
    return acc


def check_weyl_symmetric(d: RootDatum, c: TorusCharacter) -> None:
    if c.offset is not None:
        raise NotWeylSymmetric("shifted characters are not group characters")
    if c.rank != d.weight_rank:
        raise NotWeylSymmetric(f"character rank {c.rank} does not match {d.label}")
    table = c.as_dict()
    for w, m in c.terms:
        for i in range(d.rank):
            if table.get(d.reflect(i, w), 0) != m:
                raise NotWeylSymmetric(f"multiplicity of {w} differs from its reflection s_{i + 1}")


def g_invariant_multiplicity(d: RootDatum, c: TorusCharacter) -> int:
    check_weyl_symmetric(d, c)
    p = char_product(c, wedge_n_minus(d))
    return p[(0,) * d.weight_rank]


def decompose_into_irreps(d: RootDatum, c: TorusCharacter) -> dict:
    """Irrep multiplicities of a Weyl-symmetric virtual character."""
    check_weyl_symmetric(d, c)
    p = char_product(c, wedge_n_minus(d))
    r = d.rank
    table = p.as_dict()
    out = {}
    for mu, m in p.terms:
        if all(x >= 0 for x in mu[:r]):
            out[IrrepLabel(mu[:r], mu[r:])] = m

    # the remaining values must be the rho-shifted antisymmetrisation
    for mu, m in p.terms:
        shifted = tuple(x + y for x, y in zip(mu, d.rho))
        dom, sign = d.dominant_conjugate(shifted)
        if any(x == 0 for x in dom[:r]):
            raise ReconstructionMismatch(f"nonzero value {m} at rho-singular weight {mu}")
        nu = tuple(x - y for x, y in zip(dom, d.rho))
        if table.get(nu, 0) * sign != m:
            raise ReconstructionMismatch(f"value at {mu} is not the alternating image of {nu}")

    rebuilt = defaultdict(int)
    for label, n in out.items():
        for w, k in irrep_weight_multiplicities(d, label).terms:
            rebuilt[w] += n * k
    if TorusCharacter.from_mapping(rebuilt, d.weight_rank) != c:
        raise ReconstructionMismatch("irreducible characters do not sum back to the input")
    return dict(sorted(out.items()))
