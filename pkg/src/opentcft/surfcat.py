"""Cellular open-surface category: disc and annulus generators as tensor networks.

A :class:`Diagram` is an ordered list of factors wired together:

* ``('D', labels)``: an all-incoming disc with ports ``0..n-1``; port ``k``
  sits between ``labels[k-1]`` and ``labels[k]`` and carries the label pair
  ``(labels[k-1], labels[k])``.  Degree ``n - 3 + d`` (``d`` for n = 1, 2).
* ``('Q', (lam, mu))``: the two-output copairing disc.  End 0 has label
  ``(lam, mu)``, end 1 has ``(mu, lam)``.  Degree ``-d``.
* ``('A', labels)``: an annulus with open ports as for discs and a closed
  boundary whose basepoint sits at port 0.  Degree ``n - 1``.

Sockets are tuples.  Sources are external inputs ``('i', j)`` and copairing
ends ``('q', f, e)``; sinks are ports ``('p', f, k)`` and external outputs
``('o', j)``.  The wiring is a perfect matching of sources onto sinks with equal
labels.  A diagram stands for the contraction of its factors in list order, so
reordering factors costs a Koszul sign in the factor degrees.

``D+(l0..l_{n-1})`` is the pair ``[D_n, Q]`` with the copairing on port 0 and
its free end as the single output; it acts as ``m_{n-1}`` on a module.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .ainftycy import AInftyCategory, ArityExceedsBound

FAULTS = (None, "disc-split", "annulus-wrap")


def _tri(k: int) -> int:
    return k * (k - 1) // 2


class ObjectMismatch(ValueError):
    pass


class NotInDPlus(ValueError):
    """The chain is not a forest of D+ discs, so it has no module action."""


def port_label(labels, k):
    return (labels[k - 1], labels[k])


def q_label(labels, e):
    lam, mu = labels
    return (lam, mu) if e == 0 else (mu, lam)


def labels_from_ports(pls) -> tuple:
    return tuple(b for _, b in pls)


def koszul_sign(degrees, perm) -> int:
    """Sign of reordering items with these degrees into ``[items[i] for i in perm]``."""
    s = 0
    for a in range(len(perm)):
        da = degrees[perm[a]]
        if not da % 2:
            continue
        for b in range(a + 1, len(perm)):
            if perm[b] < perm[a] and degrees[perm[b]] % 2:
                s += 1
    return -1 if s % 2 else 1


@dataclass(frozen=True)
class Diagram:
    factors: tuple
    wires: tuple  # sorted ((source, sink), ...)
    inputs: tuple
    outputs: tuple

    def sink_of(self) -> dict:
        return dict(self.wires)

    def source_of(self) -> dict:
        return {t: s for s, t in self.wires}

    def kinds(self) -> str:
        return "".join(f"{k}{len(l)}" for k, l in self.factors)


def _mk(factors, wires, inputs, outputs) -> Diagram:
    return Diagram(tuple(factors), tuple(sorted(wires)), tuple(inputs), tuple(outputs))


def _sockets(factor, f):
    kind, lab = factor
    if kind == "Q":
        return [("q", f, 0), ("q", f, 1)]
    return [("p", f, k) for k in range(len(lab))]


class SurfaceChain:
    """Rational combination of normal-form diagrams."""

    def __init__(self, terms=None):
        self.terms: dict[Diagram, Fraction] = {}
        for dg, c in (terms or {}).items():
            self._add(dg, c)

    def _add(self, dg, c):
        v = self.terms.get(dg, 0) + Fraction(c)
        if v:
            self.terms[dg] = v
        else:
            self.terms.pop(dg, None)

    def __add__(self, other):
        out = SurfaceChain(self.terms)
        for dg, c in other.terms.items():
            out._add(dg, c)
        return out

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        return SurfaceChain({dg: v * c for dg, v in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, SurfaceChain) and self.terms == other.terms

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(sorted(self.terms.items(), key=lambda kv: repr(kv[0])))

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self):
        return "SurfaceChain(" + ", ".join(f"{c}*{dg.kinds()}" for dg, c in self) + ")"


class SurfaceCategory:
    """Sign conventions, rewriting and boundary for a fixed shift ``d``.

    ``rho(n)`` is the sign of rotating a disc by one port, ``kappa`` the sign of
    swapping the ends of a copairing, ``t`` the constant in the unit-disc rule
    for three-point discs.  The defaults are the values that make the unit
    axioms, the zigzag identities and d^2 = 0 hold together.
    """

    def __init__(self, d: int = 0, fault: str | None = None, rho=None, kappa=None, t=None):
        if fault not in FAULTS:
            raise ValueError(f"unknown fault {fault!r}; choose from {FAULTS[1:]}")
        self.d = d
        self.fault = fault
        self._rho = rho or {}
        self.kappa = kappa if kappa is not None else (-1) ** d
        self.t = t if t is not None else 1
        self._dcache: dict = {}

    def rho(self, n: int) -> int:
        if n in self._rho:
            return self._rho[n]
        return -1 if n % 2 == 0 and n >= 4 else 1

    # degrees -------------------------------------------------------------

    def factor_degree(self, factor) -> int:
        kind, lab = factor
        n = len(lab)
        if kind == "Q":
            return -self.d
        if kind == "A":
            return n - 1
        return n - 3 + self.d if n >= 3 else self.d

    def degree(self, dg: Diagram) -> int:
        return sum(self.factor_degree(f) for f in dg.factors)

    # labels ----------------------------------------------------------------

    def _src_label(self, dg, s):
        if s[0] == "i":
            return dg.inputs[s[1]]
        kind, lab = dg.factors[s[1]]
        return q_label(lab, s[2])

    def _sink_label(self, dg, t):
        if t[0] == "o":
            return dg.outputs[t[1]]
        return port_label(dg.factors[t[1]][1], t[2])

    def validate(self, dg: Diagram) -> None:
        srcs = [("i", j) for j in range(len(dg.inputs))]
        sinks = [("o", j) for j in range(len(dg.outputs))]
        for f, fac in enumerate(dg.factors):
            for s in _sockets(fac, f):
                (srcs if s[0] == "q" else sinks).append(s)
        ws = [s for s, _ in dg.wires]
        wt = [t for _, t in dg.wires]
        if sorted(ws) != sorted(srcs) or sorted(wt) != sorted(sinks):
            raise ObjectMismatch("wiring is not a perfect matching of sources onto sinks")
        for s, t in dg.wires:
            if self._src_label(dg, s) != self._sink_label(dg, t):
                raise ObjectMismatch(f"label mismatch on wire {s} -> {t}: "
                                     f"{self._src_label(dg, s)} vs {self._sink_label(dg, t)}")

    # generators ------------------------------------------------------------

    def disc(self, labels) -> Diagram:
        labels = tuple(labels)
        n = len(labels)
        return _mk([("D", labels)], [(("i", k), ("p", 0, k)) for k in range(n)],
                   [port_label(labels, k) for k in range(n)], [])

    def annulus(self, labels) -> Diagram:
        labels = tuple(labels)
        n = len(labels)
        return _mk([("A", labels)], [(("i", k), ("p", 0, k)) for k in range(n)],
                   [port_label(labels, k) for k in range(n)], [])

    def disc_plus(self, labels) -> Diagram:
        """D+(l0, .., l_{n-1}): inputs are ports 1..n-1, output has label (l0, l_{n-1})."""
        labels = tuple(labels)
        n = len(labels)
        wires = [(("q", 1, 1), ("p", 0, 0)), (("q", 1, 0), ("o", 0))]
        wires += [(("i", k - 1), ("p", 0, k)) for k in range(1, n)]
        return _mk([("D", labels), ("Q", (labels[0], labels[-1]))], wires,
                   [port_label(labels, k) for k in range(1, n)], [(labels[0], labels[-1])])

    def identity(self, *labels) -> Diagram:
        return _mk([], [(("i", j), ("o", j)) for j in range(len(labels))], labels, labels)

    def cap(self, lam, mu) -> Diagram:
        return self.disc((lam, mu))

    def cup(self, lam, mu) -> Diagram:
        return _mk([("Q", (lam, mu))], [(("q", 0, 0), ("o", 0)), (("q", 0, 1), ("o", 1))],
                   [], [(lam, mu), (mu, lam)])

    def chain(self, dg: Diagram, coeff=1) -> SurfaceChain:
        return self.reduce_chain({dg: Fraction(coeff)})

    # canonical form ----------------------------------------------------------

    def _traverse(self, dg, partner, f0, entry, seen):
        """DFS from factor f0 entered at socket ``entry``; returns (order, moves, sign)."""
        order, moves = [], {}
        sign = 1
        stack = [(f0, entry)]
        # iterative pre-order DFS: children pushed in reverse port order
        while stack:
            f, ent = stack.pop()
            if f in seen:
                continue
            seen.add(f)
            order.append(f)
            kind, lab = dg.factors[f]
            n = len(lab)
            if kind == "D":
                p = ent[2] if ent is not None else 0
                moves[f] = p
                if p % 2 and self.rho(n) < 0:
                    sign = -sign
                olds = [("p", f, (j + p) % n) for j in range(n)]
            elif kind == "Q":
                e = ent[2] if ent is not None else 0
                moves[f] = e
                if e and self.kappa < 0:
                    sign = -sign
                olds = [("q", f, (j + e) % 2) for j in range(2)]
            else:
                moves[f] = 0
                olds = [("p", f, j) for j in range(n)]
            for s in reversed(olds):
                ps = partner[s]
                if ps[0] in "pq" and ps[1] not in seen:
                    stack.append((ps[1], ps))
        return order, moves, sign

    def _components(self, dg, partner):
        parent = list(range(len(dg.factors)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x
        for s, t in dg.wires:
            if s[0] == "q" and t[0] == "p":
                a, b = find(s[1]), find(t[1])
                if a != b:
                    parent[a] = b
        comps: dict = {}
        for f in range(len(dg.factors)):
            comps.setdefault(find(f), []).append(f)
        return list(comps.values())

    def _apply(self, dg, order, moves) -> Diagram:
        new_index = {f: i for i, f in enumerate(order)}
        factors = []
        for f in order:
            kind, lab = dg.factors[f]
            m = moves[f]
            if kind == "D":
                lab = lab[m:] + lab[:m]
            elif kind == "Q" and m:
                lab = (lab[1], lab[0])
            factors.append((kind, lab))

        def remap(s):
            if s[0] == "p":
                f = s[1]
                n = len(dg.factors[f][1])
                m = moves[f] if dg.factors[f][0] == "D" else 0
                return ("p", new_index[f], (s[2] - m) % n)
            if s[0] == "q":
                return ("q", new_index[s[1]], s[2] ^ moves[s[1]])
            return s
        return _mk(factors, [(remap(s), remap(t)) for s, t in dg.wires], dg.inputs, dg.outputs)

    def _encode(self, dg, order, moves):
        """Shape of a component relative to its own first factor."""
        sub = self._apply(dg, order, moves)
        local = {i: i for i in range(len(order))}
        fac = sub.factors[:len(order)]
        wires = tuple(sorted((s, t) for s, t in sub.wires
                             if (s[0] == "q" and s[1] in local) or (t[0] == "p" and t[1] in local)))
        return (fac, wires)

    def canonical(self, dg: Diagram):
        """(sign, normal form) or (0, None) when an odd automorphism kills the diagram."""
        partner = {}
        for s, t in dg.wires:
            partner[s] = t
            partner[t] = s
        degs = [self.factor_degree(f) for f in dg.factors]
        rooted, closed = [], []
        for comp in self._components(dg, partner):
            anns = [f for f in comp if dg.factors[f][0] == "A"]
            ext = []
            for f in comp:
                for s in _sockets(dg.factors[f], f):
                    if partner[s][0] in "io":
                        ext.append(((0 if partner[s][0] == "o" else 1, partner[s][1]), s))
            if len(anns) == 1:
                key = min(ext)[0] if ext else (2, 0)
                rooted.append((key, anns[0], None, comp))
            elif ext:
                key, s = min(ext)
                rooted.append((key, s[1], s, comp))
            else:
                closed.append(comp)
        order, moves, sign = [], {}, 1
        for key, f0, ent, comp in sorted(rooted, key=lambda r: r[0]):
            o, m, sg = self._traverse(dg, partner, f0, ent, set())
            order += o
            moves.update(m)
            sign *= sg
        blocks = []
        for comp in closed:
            best = None
            ref = sorted(comp)
            for f in comp:
                ents = [None] if dg.factors[f][0] == "A" else _sockets(dg.factors[f], f)
                for ent in ents:
                    o, m, sg = self._traverse(dg, partner, f, ent, set())
                    perm = [ref.index(x) for x in o]
                    sg *= koszul_sign([degs[x] for x in ref], perm)
                    enc = self._encode(dg, o, m)
                    if best is None or enc < best[0]:
                        best = (enc, o, m, sg)
                    elif enc == best[0] and sg != best[3]:
                        return 0, None
            enc, o, m, sg = best
            cdeg = sum(degs[x] for x in comp)
            blocks.append((enc, o, m, sg, cdeg))
        blocks.sort(key=lambda b: b[0])
        for a, b in zip(blocks, blocks[1:]):
            if a[0] == b[0] and a[4] % 2:
                return 0, None
        for enc, o, m, sg, _ in blocks:
            order += o
            moves.update(m)
            # the in-component Koszul sign is in sg; undo it here so the global
            # permutation sign below is not counted twice
            ref = sorted(o)
            sign *= sg * koszul_sign([degs[x] for x in ref], [ref.index(x) for x in o])
        sign *= koszul_sign(degs, order)
        return sign, self._apply(dg, order, moves)

    # rewriting ---------------------------------------------------------------

    def _front_sign(self, dg, front) -> int:
        degs = [self.factor_degree(f) for f in dg.factors]
        rest = [i for i in range(len(degs)) if i not in front]
        return koszul_sign(degs, list(front) + rest)

    def _rebuild(self, dg, drop, wires, new_front=()) -> Diagram:
        """Drop factor indices, put ``new_front`` factors first, renumber sockets."""
        keep = [i for i in range(len(dg.factors)) if i not in drop]
        idx = {f: i + len(new_front) for i, f in enumerate(keep)}

        def remap(s):
            if s[0] in "pq" and s[1] >= 0:
                return (s[0], idx[s[1]], s[2])
            if s[0] in "pq":  # new factors carry negative placeholders
                return (s[0], -s[1] - 1, s[2])
            return s
        return _mk(list(new_front) + [dg.factors[i] for i in keep],
                   [(remap(s), remap(t)) for s, t in wires], dg.inputs, dg.outputs)

    def _rewrite_once(self, dg):
        """One rewriting step: (sign, diagram), (0, None) for zero, or None if stuck."""
        src_of = dg.source_of()
        sink_of = dg.sink_of()
        fac = dg.factors
        # R2: snake through a two-point disc
        for f, (kind, lab) in enumerate(fac):
            if kind != "D" or len(lab) != 2:
                continue
            for b in (0, 1):
                s = src_of[("p", f, b)]
                if s[0] != "q":
                    continue
                g, e = s[1], s[2]
                x = src_of[("p", f, 1 - b)]
                if x == ("q", g, 1 - e):
                    continue
                z = sink_of[("q", g, 1 - e)]
                sign = self._front_sign(dg, (f, g))
                if b == 1 and self.rho(2) < 0:
                    sign = -sign
                if e == 0 and self.kappa < 0:
                    sign = -sign
                gone = {("p", f, 0), ("p", f, 1), ("q", g, 0), ("q", g, 1)}
                wires = [(u, v) for u, v in dg.wires if u not in gone and v not in gone]
                wires.append((x, z))
                return sign, self._rebuild(dg, {f, g}, wires)
        # R3 / R4: one-point disc glued through a copairing
        for f, (kind, lab) in enumerate(fac):
            if kind != "D" or len(lab) != 1:
                continue
            s = src_of[("p", f, 0)]
            if s[0] != "q":
                continue
            g, e = s[1], s[2]
            z = sink_of[("q", g, 1 - e)]
            if z[0] == "o":
                continue
            h, k = z[1], z[2]
            hk, hl = fac[h]
            if hk == "A":
                if k != 0:
                    return 0, None
                continue
            n = len(hl)
            if n >= 4:
                return 0, None
            if n != 3:
                continue
            sign = self._front_sign(dg, (h, f, g)) * self.t
            if e == 0 and self.kappa < 0:
                sign = -sign
            ports = [(k + 1) % 3, (k + 2) % 3]
            new = ("D", labels_from_ports([port_label(hl, p) for p in ports]))
            gone = {("p", h, 0), ("p", h, 1), ("p", h, 2), ("q", g, 0), ("q", g, 1), ("p", f, 0)}
            wires = [(u, v) for u, v in dg.wires if u not in gone and v not in gone]
            for j, p in enumerate(ports):
                wires.append((src_of[("p", h, p)], ("p", -1, j)))
            return sign, self._rebuild(dg, {f, g, h}, wires, [new])
        return None

    def reduce(self, dg: Diagram):
        """Rewrite to normal form: (sign, diagram) or (0, None)."""
        sign = 1
        while True:
            step = self._rewrite_once(dg)
            if step is None:
                break
            sg, dg = step
            if not sg:
                return 0, None
            sign *= sg
        sg, dg = self.canonical(dg)
        return sign * sg, dg

    def reduce_chain(self, terms) -> SurfaceChain:
        out = SurfaceChain()
        for dg, c in terms.items():
            sg, nf = self.reduce(dg)
            if sg:
                out._add(nf, c * sg)
        return out

    # composition ----------------------------------------------------------------

    def compose_diagrams(self, g: Diagram, f: Diagram) -> Diagram:
        """g after f: outputs of f are glued to inputs of g."""
        if tuple(f.outputs) != tuple(g.inputs):
            raise ObjectMismatch(f"cannot compose: {f.outputs} vs {g.inputs}")
        off = len(g.factors)

        def sh(s):
            return (s[0], s[1] + off, s[2]) if s[0] in "pq" else s
        g_in = {s[1]: t for s, t in g.wires if s[0] == "i"}
        wires = [(s, t) for s, t in g.wires if s[0] != "i"]
        for s, t in f.wires:
            if t[0] == "o":
                wires.append((sh(s), g_in[t[1]]))
            else:
                wires.append((sh(s), sh(t)))
        return _mk(g.factors + f.factors, wires, f.inputs, g.outputs)

    def tensor_diagrams(self, a: Diagram, b: Diagram) -> Diagram:
        off, ni, no = len(a.factors), len(a.inputs), len(a.outputs)

        def sh(s):
            if s[0] in "pq":
                return (s[0], s[1] + off, s[2])
            return (s[0], s[1] + (ni if s[0] == "i" else no))
        return _mk(a.factors + b.factors, list(a.wires) + [(sh(s), sh(t)) for s, t in b.wires],
                   a.inputs + b.inputs, a.outputs + b.outputs)

    def _bilinear(self, op, x, y) -> SurfaceChain:
        x = x if isinstance(x, SurfaceChain) else self.chain(x)
        y = y if isinstance(y, SurfaceChain) else self.chain(y)
        terms: dict = {}
        for a, ca in x.terms.items():
            for b, cb in y.terms.items():
                dg = op(a, b)
                terms[dg] = terms.get(dg, 0) + ca * cb
        return self.reduce_chain(terms)

    def compose(self, f, g) -> SurfaceChain:
        """Spec order: f from alpha to beta, g from beta to gamma; returns g o f."""
        return self._bilinear(lambda a, b: self.compose_diagrams(b, a), f, g)

    def tensor(self, f, g) -> SurfaceChain:
        return self._bilinear(self.tensor_diagrams, f, g)

    # boundary ---------------------------------------------------------------------

    def local_boundary(self, factor) -> list:
        """Terms (coeff, factors, internal wires, port map) of the boundary of one factor.

        Internal sockets index the new factors 0.., port map sends old port k
        to a new sink.
        """
        key = factor
        if key in self._dcache:
            return self._dcache[key]
        kind, lab = factor
        n = len(lab)
        out = []
        if kind == "D" and n >= 4:
            d = self.d
            for r in range(n - 1):
                for s in range(2, n - r):
                    t = n - 1 - r - s
                    if r + t < 1:
                        continue
                    e = r + s * t + d * s + _tri(n - 1) + _tri(s) + _tri(n - s)
                    c = -1 if e % 2 == 0 else 1
                    if self.fault == "disc-split" and s == 2:
                        c = -c
                    big = lab[:r + 1] + lab[r + s:]
                    small = lab[r:r + s + 1]
                    facs = [("D", big), ("D", small), ("Q", (lab[r], lab[r + s]))]
                    wires = [(("q", 2, 0), ("p", 0, r + 1)), (("q", 2, 1), ("p", 1, 0))]
                    pm = {0: ("p", 0, 0)}
                    for j in range(n - 1):
                        if j < r:
                            pm[j + 1] = ("p", 0, j + 1)
                        elif j < r + s:
                            pm[j + 1] = ("p", 1, j - r + 1)
                        else:
                            pm[j + 1] = ("p", 0, j - s + 2)
                    out.append((c, facs, wires, pm))
        elif kind == "A" and n >= 2:
            for k in range(2, n + 1):
                for i in range(0, n - k + 1):
                    c = (-1) ** ((i + k * (n - k - i) + k * (k - 1) // 2) % 2)
                    block = list(range(i, i + k))
                    rest = list(range(i)) + [None] + list(range(i + k, n))
                    out.append(self._annulus_term(lab, block, rest, c))
                for a in range(1, k):
                    b = k - a
                    c = (-1) ** ((a * (n - a) + k * (n - k) + k * (k - 1) // 2) % 2)
                    if self.fault == "annulus-wrap":
                        c = -c
                    block = list(range(n - a, n)) + list(range(b))
                    rest = [None] + list(range(b, n - a))
                    out.append(self._annulus_term(lab, block, rest, c))
        self._dcache[key] = out
        return out

    def _annulus_term(self, lab, block, rest, c):
        pos = rest.index(None)
        first, last = block[0], block[-1]
        # the new port's label runs from the source of the block to its target
        new_pl = (lab[first - 1], lab[last])
        a_pls = [new_pl if p is None else port_label(lab, p) for p in rest]
        d_pls = [(new_pl[1], new_pl[0])] + [port_label(lab, p) for p in block]
        facs = [("A", labels_from_ports(a_pls)), ("D", labels_from_ports(d_pls)),
                ("Q", new_pl)]
        wires = [(("q", 2, 0), ("p", 0, pos)), (("q", 2, 1), ("p", 1, 0))]
        pm = {}
        for j, p in enumerate(block):
            pm[p] = ("p", 1, j + 1)
        for j, p in enumerate(rest):
            if p is not None:
                pm[p] = ("p", 0, j)
        return (c, facs, wires, pm)

    def boundary_diagram(self, dg: Diagram) -> dict:
        """Unreduced boundary terms of a diagram (Koszul derivation over factors)."""
        terms: dict = {}
        pre = 0
        for i, fac in enumerate(dg.factors):
            loc = self.local_boundary(fac)
            sgn = -1 if pre % 2 else 1
            pre += self.factor_degree(fac)
            for c, facs, iwires, pm in loc:
                m = len(facs)

                def remap(s, i=i, m=m):
                    if s[0] in "pq" and s[1] > i:
                        return (s[0], s[1] + m - 1, s[2])
                    return s

                def inner(s, i=i):
                    return (s[0], s[1] + i, s[2])
                wires = []
                for s, t in dg.wires:
                    if t[0] == "p" and t[1] == i:
                        t = inner(pm[t[2]])
                    else:
                        t = remap(t)
                    wires.append((remap(s), t))
                wires += [(inner(s), inner(t)) for s, t in iwires]
                new = _mk(dg.factors[:i] + tuple(facs) + dg.factors[i + 1:], wires,
                          dg.inputs, dg.outputs)
                terms[new] = terms.get(new, 0) + sgn * c
        return terms

    def boundary(self, x) -> SurfaceChain:
        if isinstance(x, Diagram):
            x = self.chain(x)
        terms: dict = {}
        for dg, c in x.terms.items():
            for nd, v in self.boundary_diagram(dg).items():
                terms[nd] = terms.get(nd, 0) + c * v
        return self.reduce_chain(terms)


# abstract generators ------------------------------------------------------------


@dataclass(frozen=True)
class DiscGenerator:
    """D(l0, .., l_{n-1}) stored as its lexicographically least rotation.

    ``sign`` is the rotation sign relating the input to the stored form; a
    generator with a stabilizing rotation of sign -1 is zero.
    """
    labels: tuple
    sign: int
    shift: int
    zero: bool = False

    @classmethod
    def make(cls, labels, shift: int = 0, sc: SurfaceCategory | None = None):
        sc = sc or SurfaceCategory(shift)
        labels = tuple(labels)
        n = len(labels)
        rots = [labels[r:] + labels[:r] for r in range(n)]
        r = min(range(n), key=lambda i: (rots[i], i))
        rs = sc.rho(n)
        zero = any(rots[s] == labels and rs ** s == -1 for s in range(1, n))
        return cls(rots[r], rs ** r, shift, zero)

    @property
    def degree(self) -> int:
        return disc_degree(len(self.labels), self.shift)


@dataclass(frozen=True)
class AnnulusGenerator:
    labels: tuple
    shift: int = 0

    @property
    def degree(self) -> int:
        return len(self.labels) - 1


def disc_degree(n: int, d: int = 0) -> int:
    return n - 3 + d if n >= 3 else d


def degree(g) -> int:
    return g.degree


# d^2 harness ---------------------------------------------------------------------


def check_d_squared(max_n: int = 7, d: int = 0, alphabet: int = 2, fault=None) -> dict:
    """d^2 = 0 on every disc and annulus with at most ``max_n`` ports."""
    sc = SurfaceCategory(d, fault)
    letters = "abcdefghij"[:alphabet]
    per_arity = {}
    failure = None
    for n in range(1, max_n + 1):
        counts = {"generators": 0, "boundary_terms": 0, "d2_terms": 0}
        for lab in itertools.product(letters, repeat=n):
            for kind, dg in (("D", sc.disc(lab)), ("A", sc.annulus(lab))):
                counts["generators"] += 1
                b = sc.boundary(dg)
                counts["boundary_terms"] += len(b)
                for nf in b.terms:
                    if sc.degree(nf) != sc.degree(dg) - 1:
                        failure = failure or {"generator": f"{kind}{''.join(lab)}",
                                              "problem": "boundary term of wrong degree"}
                bb = sc.boundary(b)
                counts["d2_terms"] += len(bb)
                if bb.terms and failure is None:
                    dg2, c = next(iter(bb))
                    failure = {"generator": f"{kind}({','.join(lab)})", "arity": n,
                               "surviving_term": dg2.kinds(), "coefficient": str(c)}
        per_arity[n] = counts
        if failure:
            break
    return {"ok": failure is None, "max_n": max_n, "shift": d, "alphabet": alphabet,
            "fault": fault, "per_arity": per_arity, "failure": failure}


# module action --------------------------------------------------------------------


def _tree(dg: Diagram, source, used: list, src_of: dict, sink_of: dict):
    """The D+ tree feeding a sink from ``source``; leaves are input indices."""
    if source[0] == "i":
        return ("leaf", source[1])
    if source[0] != "q" or source[2] != 0:
        raise NotInDPlus("a copairing feeds a sink with its end 1")
    g = source[1]
    z = sink_of[("q", g, 1)]
    if z[0] != "p" or z[2] != 0 or dg.factors[z[1]][0] != "D":
        raise NotInDPlus("copairing is not capped by a disc at port 0")
    f = z[1]
    used.extend([f, g])
    n = len(dg.factors[f][1])
    return ("node", f, g, [_tree(dg, src_of[("p", f, k)], used, src_of, sink_of) for k in range(1, n)])


def _tree_degree(node) -> int:
    if node[0] == "leaf":
        return 0
    return len(node[3]) - 2 + sum(_tree_degree(k) for k in node[3])


def _leaves(node):
    if node[0] == "leaf":
        return [node[1]]
    return [x for k in node[3] for x in _leaves(k)]


def _pre_order(node, out):
    if node[0] == "node":
        out.extend([node[1], node[2]])
        for k in node[3]:
            _pre_order(k, out)


def _eval_tree(cat: AInftyCategory, dg, node, letters, degs) -> dict:
    """Value of a tree on basis letters, as {basis name: coeff}."""
    if node[0] == "leaf":
        return {letters[0]: Fraction(1)}
    kids = node[3]
    k = len(kids)
    if k == 0:
        return dict(cat.units[dg.factors[node[1]][1][0]])
    if k > cat.max_arity:
        raise ArityExceedsBound(f"disc with {k + 1} points needs m_{k} > maxArity {cat.max_arity}")
    parts = []
    pos, seen, sign = 0, 0, 1
    for kid in kids:
        m = len(_leaves(kid))
        if _tree_degree(kid) % 2 and seen % 2:
            sign = -sign
        parts.append(_eval_tree(cat, dg, kid, letters[pos:pos + m], degs))
        seen += sum(degs[x] for x in letters[pos:pos + m])
        pos += m
    out = parts[0] if k == 1 else cat.m_vec(k, parts)
    return {y: c * sign for y, c in out.items() if c}


def _evaluate(sc, dg: Diagram, outer: list, sinks: list, cat, letters) -> dict:
    """Apply the D+ trees feeding ``sinks`` to the letters.

    ``outer`` are factors that stay (an annulus) and come first in the
    expression order.  Returns {tuple of basis names, one per sink: coeff}.
    """
    src_of, sink_of = dg.source_of(), dg.sink_of()
    used = list(outer)
    roots = [_tree(dg, src_of[t], used, src_of, sink_of) for t in sinks]
    if sorted(used) != list(range(len(dg.factors))):
        raise NotInDPlus("diagram has factors outside the D+ trees")
    degs = {x: b.degree for x, b in cat.basis.items()}
    expr = list(outer)
    for r in roots:
        _pre_order(r, expr)
    sign = koszul_sign([sc.factor_degree(f) for f in dg.factors], expr)
    order = [x for r in roots for x in _leaves(r)]
    sign *= koszul_sign([degs[x] for x in letters], order)
    word = [letters[i] for i in order]
    vals = []
    pos, seen = 0, 0
    for r in roots:
        m = len(_leaves(r))
        if _tree_degree(r) % 2 and seen % 2:
            sign = -sign
        vals.append(_eval_tree(cat, dg, r, word[pos:pos + m], degs))
        seen += sum(degs[x] for x in word[pos:pos + m])
        pos += m
    out: dict = {}
    for combo in itertools.product(*(v.items() for v in vals)):
        coef = Fraction(sign)
        for _, v in combo:
            coef *= v
        key = tuple(y for y, _ in combo)
        out[key] = out.get(key, 0) + coef
    return out


def _check_letters(dg, cat, letters):
    if len(letters) != len(dg.inputs):
        raise ObjectMismatch(f"{len(dg.inputs)} inputs expected, got {len(letters)}")
    for x, lab in zip(letters, dg.inputs):
        b = cat.basis[x]
        if (b.source, b.target) != tuple(lab):
            raise ObjectMismatch(f"letter {x} is not in Hom{tuple(lab)}")


def act_on_module(sc: SurfaceCategory, chain, cat: AInftyCategory, letters) -> dict:
    """Evaluate a D+ chain on basis letters (one per input).

    Each D+(l0..ln) acts as m_n, D+(l) as the unit and D+(l0, l1) as the
    identity.  Returns ``{tuple of output basis names: coeff}``.
    """
    if isinstance(chain, Diagram):
        chain = sc.chain(chain)
    total: dict = {}
    for dg, c in chain.terms.items():
        _check_letters(dg, cat, letters)
        sinks = [("o", j) for j in range(len(dg.outputs))]
        for key, v in _evaluate(sc, dg, [], sinks, cat, letters).items():
            total[key] = total.get(key, 0) + c * v
    return {k: v for k, v in total.items() if v}


def act_on_annulus(sc: SurfaceCategory, dg: Diagram, cat: AInftyCategory, letters) -> tuple:
    """Push D+ trees glued to an annulus into its letters.

    Returns (annulus labels, {word at the annulus ports: coeff}).
    """
    _check_letters(dg, cat, letters)
    anns = [f for f, (k, _) in enumerate(dg.factors) if k == "A"]
    if len(anns) != 1:
        raise NotInDPlus("expected exactly one annulus")
    a = anns[0]
    n = len(dg.factors[a][1])
    vals = _evaluate(sc, dg, [a], [("p", a, k) for k in range(n)], cat, letters)
    return dg.factors[a][1], {w: v for w, v in vals.items() if v}


def ainfty_defect(cat: AInftyCategory, up_to: int | None = None, sc: SurfaceCategory | None = None):
    """Compare act(dD+) with the commutator [m1, m_n] on every composable word.

    A chain-level functor sends the boundary of D+(l0..ln) to [m1, m_n].
    Returns (words checked, list of (word, defect)).
    """
    sc = sc or SurfaceCategory(0)
    up_to = cat.max_arity if up_to is None else up_to
    if up_to > cat.max_arity:
        raise ArityExceedsBound(f"requested arity {up_to} > maxArity {cat.max_arity}")
    degs = {x: b.degree for x, b in cat.basis.items()}
    bad, checked = [], 0
    cache: dict = {}
    for n in range(2, up_to + 1):
        for word in cat.composable_words(n):
            b0 = cat.basis[word[0]]
            labels = (b0.source,) + tuple(cat.basis[x].target for x in word)
            if labels not in cache:
                cache[labels] = sc.boundary(sc.disc_plus(labels))
            lhs = {k[0]: v for k, v in act_on_module(sc, cache[labels], cat, word).items()}
            rhs: dict = {}
            mn = cat.m(n, word)
            if 1 in cat.mults:
                for y, c in mn.items():
                    for z, e in cat.m(1, (y,)).items():
                        rhs[z] = rhs.get(z, 0) + c * e
                pre = 0
                for i, x in enumerate(word):
                    s = -1 if (pre + n) % 2 else 1
                    for y, e in cat.m(1, (x,)).items():
                        for z, c in cat.m(n, word[:i] + (y,) + word[i + 1:]).items():
                            rhs[z] = rhs.get(z, 0) - s * e * c
                    pre += degs[x]
            diff = {z: lhs.get(z, 0) - rhs.get(z, 0) for z in set(lhs) | set(rhs)}
            diff = {z: v for z, v in diff.items() if v}
            checked += 1
            if diff:
                bad.append((word, diff))
    return checked, bad
