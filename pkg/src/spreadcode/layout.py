"""Code parameters and the subfield-coset spread layout.

Node ``N_l`` (1-based) holds the GF(2)-basis ``nu**(l-1) * omega**j`` for
``j = 0..alpha-1``, where ``omega`` generates the subfield GF(2^alpha)^*.
The nonzero points of node ``l``'s span form the coset
``nu**(l-1) * GF(2^alpha)^*``, and the n cosets partition GF(2^B)^*.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache

from .errors import DivisibilityViolation, InvalidNode, SpreadCodeError
from .gf2 import MAX_M, GFContext, format_bits, gf_new, parse_bits, rank, span_points


@dataclass(frozen=True)
class CodeParams:
    B: int
    alpha: int
    b: int
    n: int
    k: int
    poly: int

    @property
    def t(self):
        return self.alpha - 1

    def __str__(self):
        return f"PSRC({self.n},{self.k}) B={self.B} alpha={self.alpha}"


def derive_params(B, alpha, poly="default"):
    if alpha < 1 or B < 2 or B > MAX_M:
        raise SpreadCodeError(f"need alpha >= 1 and 2 <= B <= {MAX_M}, got B={B} alpha={alpha}")
    if alpha > B or B % alpha:
        raise DivisibilityViolation(f"alpha={alpha} does not divide B={B}")
    b = B // alpha
    n = ((1 << B) - 1) // ((1 << alpha) - 1)
    ctx = gf_new(B, poly)
    return CodeParams(B=B, alpha=alpha, b=b, n=n, k=b, poly=ctx.poly)


def subfield_generator(ctx, alpha):
    """Generator ``nu**((2^m-1)/(2^alpha-1))`` of GF(2^alpha)^* inside GF(2^m)."""
    if alpha < 1 or ctx.m % alpha:
        raise DivisibilityViolation(f"alpha={alpha} does not divide m={ctx.m}")
    return ctx.nu(ctx.order // ((1 << alpha) - 1))


@dataclass(frozen=True, eq=False)
class SpreadLayout:
    params: CodeParams
    node_bases: tuple  # node_bases[l-1] = tuple of alpha ints
    ctx: GFContext = field(repr=False)

    @property
    def n(self):
        return len(self.node_bases)

    @property
    def B(self):
        return self.params.B

    @property
    def alpha(self):
        return self.params.alpha

    @property
    def k(self):
        return self.params.k

    @cached_property
    def flat_vectors(self):
        """All n*alpha basis vectors, node-major."""
        return tuple(v for basis in self.node_bases for v in basis)

    @cached_property
    def spans(self):
        return tuple(frozenset(span_points(basis)) for basis in self.node_bases)

    @cached_property
    def point_owner(self):
        """Nonzero point -> 1-based node id (first owner if the layout is corrupt)."""
        owner = {}
        for l, pts in enumerate(self.spans, start=1):
            for p in pts:
                if p:
                    owner.setdefault(p, l)
        return owner

    def basis(self, node):
        self.check_node(node)
        return self.node_bases[node - 1]

    def span(self, node):
        self.check_node(node)
        return self.spans[node - 1]

    def check_node(self, node):
        if not isinstance(node, int) or not 1 <= node <= self.n:
            raise InvalidNode(f"node {node!r} not in 1..{self.n}")

    def node_of(self, v):
        """Node whose span contains the nonzero point ``v``."""
        try:
            return self.point_owner[v]
        except KeyError:
            raise SpreadCodeError(f"point {format_bits(v, self.B)} not covered") from None

    def coset_node(self, v):
        """Node id via discrete log: ``log(v) mod n`` (canonical layouts only)."""
        return self.ctx.log(v) % self.params.n + 1

    def to_text(self):
        p = self.params
        lines = [f"psrc B={p.B} alpha={p.alpha} n={self.n} poly={p.poly:#x}"]
        for l, basis in enumerate(self.node_bases, start=1):
            lines.append(f"N{l}: " + " ".join(format_bits(v, p.B) for v in basis))
        return "\n".join(lines) + "\n"


@lru_cache(maxsize=32)
def build_layout(params):
    ctx = gf_new(params.B, params.poly)
    omega_log = ctx.order // ((1 << params.alpha) - 1)
    bases = tuple(
        tuple(ctx.nu(l + omega_log * j) for j in range(params.alpha))
        for l in range(params.n)
    )
    return SpreadLayout(params, bases, ctx)


def layout_for(B, alpha, poly="default"):
    return build_layout(derive_params(B, alpha, poly))


@dataclass
class SpreadReport:
    violations: list

    @property
    def ok(self):
        return not self.violations

    def __str__(self):
        return "ok" if self.ok else "\n".join(self.violations)


def verify_spread(layout):
    """Check partition, per-node rank and the coset identity; list every violation."""
    p = layout.params
    violations = []
    expected_n = ((1 << p.B) - 1) // ((1 << p.alpha) - 1)
    if layout.n != expected_n:
        violations.append(f"node count {layout.n} != {expected_n}")
    covered = {}
    for l, basis in enumerate(layout.node_bases, start=1):
        if len(basis) != p.alpha:
            violations.append(f"N{l}: {len(basis)} basis vectors, expected {p.alpha}")
        if any(v >> p.B for v in basis):
            violations.append(f"N{l}: vector wider than {p.B} bits")
        r = rank(basis)
        if r < p.alpha:
            violations.append(f"N{l}: node rank < alpha ({r} < {p.alpha})")
        for pt in span_points(basis):
            if pt:
                covered.setdefault(pt, []).append(l)
    for pt, owners in sorted(covered.items()):
        if len(owners) > 1:
            violations.append(
                f"point covered twice: {format_bits(pt, p.B)} in "
                + ",".join(f"N{o}" for o in owners))
    missing = (1 << p.B) - 1 - len(covered)
    if missing:
        violations.append(f"{missing} nonzero points not covered")
    ctx = layout.ctx
    omega_log = ctx.order // ((1 << p.alpha) - 1)
    for l in range(min(layout.n, expected_n)):
        coset = {ctx.nu(l + omega_log * j) for j in range((1 << p.alpha) - 1)}
        if set(span_points(layout.node_bases[l])) - {0} != coset:
            violations.append(f"N{l + 1}: span is not the coset nu^{l}*F_{1 << p.alpha}^*")
    return SpreadReport(violations)


def parse_layout(text):
    """Inverse of :meth:`SpreadLayout.to_text`; does not validate the spread."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("psrc "):
        raise SpreadCodeError("layout file must start with a 'psrc' header")
    header = dict(tok.split("=", 1) for tok in lines[0].split()[1:])
    try:
        B = int(header["B"])
        alpha = int(header["alpha"])
        poly = int(header["poly"], 16)
    except (KeyError, ValueError) as exc:
        raise SpreadCodeError(f"bad layout header: {lines[0]!r}") from exc
    params = derive_params(B, alpha, poly)
    bases = []
    for ln in lines[1:]:
        name, _, rest = ln.partition(":")
        if not name.startswith("N") or int(name[1:]) != len(bases) + 1:
            raise SpreadCodeError(f"unexpected node line: {ln!r}")
        vecs = []
        for tok in rest.split():
            v, width = parse_bits(tok)
            if width != B:
                raise SpreadCodeError(f"{name}: vector {tok} has width {width} != {B}")
            vecs.append(v)
        bases.append(tuple(vecs))
    if "n" in header and int(header["n"]) != len(bases):
        raise SpreadCodeError(f"header says n={header['n']} but {len(bases)} nodes listed")
    return SpreadLayout(params, tuple(bases), gf_new(B, poly))
