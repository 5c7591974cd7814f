"""Fusion systems on a finite p-group S.

A system is generated by injective conjugation-like maps between subgroups
of S and closed under composition, restriction, and inversion of the
induced isomorphism onto the image.  Hom-sets are materialized exhaustively
(desk scale), so every categorical statement here is decided by finite set
comparison.

Morphisms are stored as image tuples aligned with the sorted member list of
the domain subgroup; subgroups are bitmasks over the ambient group, exactly
as in permgroup.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field

from . import caps as _caps
from .errors import CapExceeded, InputError, PropertyViolation
from .permgroup import (
    FiniteGroup,
    Subgroup,
    mask_members,
    subgroups_below,
    sylow_p,
)

__all__ = [
    "FHom",
    "ClassFlags",
    "FusionSystem",
    "fusion_from_group",
    "FusionMap",
    "QuotientFusionReport",
    "quotient_fusion_check",
]


@dataclass(frozen=True)
class FHom:
    """Injective homomorphism between subgroups of S, stored element-wise.

    images[i] is the image of the i-th member of the domain (members sorted
    ascending by ordinal).
    """

    group: FiniteGroup = field(compare=False, repr=False)
    dom_mask: int = 0
    images: tuple = ()

    @property
    def image_mask(self) -> int:
        m = 0
        for i in self.images:
            m |= 1 << i
        return m

    @property
    def source(self) -> Subgroup:
        return Subgroup(self.group, self.dom_mask)

    @property
    def image(self) -> Subgroup:
        return Subgroup(self.group, self.image_mask)

    def mapping(self) -> dict:
        return dict(zip(mask_members(self.dom_mask), self.images))

    def restrict(self, sub_mask: int) -> "FHom":
        m = self.mapping()
        return FHom(self.group, sub_mask, tuple(m[x] for x in mask_members(sub_mask)))

    def inverse(self) -> "FHom":
        pairs = sorted(zip(self.images, mask_members(self.dom_mask)))
        return FHom(self.group, self.image_mask, tuple(x for _, x in pairs))

    def then(self, other: "FHom") -> "FHom":
        om = other.mapping()
        return FHom(self.group, self.dom_mask, tuple(om[y] for y in self.images))

    def fixes_setwise(self, mask: int) -> bool:
        m = self.mapping()
        img = 0
        for x in mask_members(mask):
            img |= 1 << m[x]
        return img == mask

    def fixes_pointwise(self, mask: int) -> bool:
        m = self.mapping()
        return all(m[x] == x for x in mask_members(mask))


@dataclass(frozen=True)
class ClassFlags:
    centric: bool
    radical: bool
    quasicentric: bool
    subcentric: bool
    fully_normalized: bool
    fully_centralized: bool
    # Inn-core automizer variant, kept for comparison only; nothing in the
    # library keys off it and class_sets never consults it.
    automizer_radical_diagnostic: bool = False


def _conj_map(group: FiniteGroup, s_mask: int, g: int) -> FHom:
    """Largest restriction of conjugation by g carrying members of S into S.

    The defined set {x in S : x**g in S} is a subgroup of S.
    """
    dom = [x for x in mask_members(s_mask) if (1 << group.conj(x, g)) & s_mask]
    return FHom(group, sum(1 << x for x in dom), tuple(group.conj(x, g) for x in dom))


class FusionSystem:
    """Hom-closed category of injective maps between subgroups of S."""

    def __init__(self, S: Subgroup, generators=()):
        if S.order > _caps.current().sylow_order:
            raise CapExceeded("fusion carrier order", _caps.current().sylow_order)
        self.group = S.group
        self.S = S
        self.subs = subgroups_below(S)
        self._masks = [h.mask for h in self.subs]
        self._mask_set = set(self._masks)
        self._table: dict[int, dict[tuple, int]] = {m: {} for m in self._masks}
        self._by_image: dict[int, set] = {m: set() for m in self._masks}
        seeds = [
            _conj_map(self.group, S.mask, s) for s in S.members()
        ] + list(generators)
        for h in seeds:
            self._validate(h)
        self._close(seeds)
        self._conj_cache: dict[int, tuple] = {}
        self._flag_cache: dict[int, tuple] = {}
        self._nsys_cache: dict[int, FusionSystem] = {}
        self._csys_cache: dict[int, FusionSystem] = {}

    # -- construction ------------------------------------------------------

    def _validate(self, h: FHom):
        if h.group is not self.group:
            raise InputError("generator map lives in a different carrier group")
        if h.dom_mask & ~self.S.mask or h.image_mask & ~self.S.mask:
            raise InputError("generator map is not between subgroups of S")
        if h.dom_mask not in self._mask_set:
            raise InputError("generator domain is not a subgroup of S")
        if len(set(h.images)) != len(h.images):
            raise InputError("generator map is not injective")
        m = h.mapping()
        for a, b in itertools.product(mask_members(h.dom_mask), repeat=2):
            if m[self.group.mult(a, b)] != self.group.mult(m[a], m[b]):
                raise InputError("generator map is not a homomorphism")

    def _close(self, seeds):
        cap = _caps.current().fusion_maps
        count = 0
        queue = deque()

        def push(h: FHom):
            nonlocal count
            row = self._table[h.dom_mask]
            if h.images in row:
                return
            img = h.image_mask
            row[h.images] = img
            self._by_image[img].add((h.dom_mask, h.images))
            count += 1
            if count > cap:
                raise CapExceeded("fusion homtable", cap)
            queue.append(h)

        for h in seeds:
            push(h)
        while queue:
            h = queue.popleft()
            img = h.image_mask
            push(h.inverse())
            for m in self._masks:
                if m != h.dom_mask and (m & h.dom_mask) == m:
                    push(h.restrict(m))
            for images, _ in list(self._table[img].items()):
                push(h.then(FHom(self.group, img, images)))
            for dom2, images2 in list(self._by_image[h.dom_mask]):
                push(FHom(self.group, dom2, images2).then(h))

    # -- queries -----------------------------------------------------------

    def sub(self, mask: int) -> Subgroup:
        return Subgroup(self.group, mask)

    def homs(self, P: Subgroup, Q: Subgroup) -> list:
        """All morphisms P -> Q (image inside Q), canonical order."""
        qm = Q.mask
        return [
            FHom(self.group, P.mask, images)
            for images, img in sorted(self._table[P.mask].items())
            if img & ~qm == 0
        ]

    def isos(self, P: Subgroup, Q: Subgroup) -> list:
        qm = Q.mask
        return [
            FHom(self.group, P.mask, images)
            for images, img in sorted(self._table[P.mask].items())
            if img == qm
        ]

    def auts(self, P: Subgroup) -> list:
        return self.isos(P, P)

    def conjugates(self, P: Subgroup) -> tuple:
        """The distinct images of P, canonical order."""
        if P.mask not in self._conj_cache:
            masks = sorted(
                set(self._table[P.mask].values()),
                key=lambda m: Subgroup(self.group, m).key(),
            )
            self._conj_cache[P.mask] = tuple(Subgroup(self.group, m) for m in masks)
        return self._conj_cache[P.mask]

    def is_fully_normalized(self, P: Subgroup) -> bool:
        n = P.normalizer(self.S).order
        return all(Q.normalizer(self.S).order <= n for Q in self.conjugates(P))

    def is_fully_centralized(self, P: Subgroup) -> bool:
        c = P.centralizer(self.S).order
        return all(Q.centralizer(self.S).order <= c for Q in self.conjugates(P))

    def is_weakly_closed(self, T: Subgroup) -> bool:
        return self.conjugates(T) == (T,)

    def is_strongly_closed(self, T: Subgroup) -> bool:
        for m in self._masks:
            if (m & T.mask) == m:
                for img in self._table[m].values():
                    if img & ~T.mask:
                        return False
        return True

    def same_homs(self, other: "FusionSystem") -> bool:
        if self.S.mask != other.S.mask or self.group is not other.group:
            return False
        return all(
            set(self._table[m]) == set(other._table[m]) for m in self._masks
        )

    # -- subsystems ----------------------------------------------------------

    def _harvest(self, carrier: Subgroup, keep) -> "FusionSystem":
        """Subsystem on `carrier` from restrictions of maps passing `keep`."""
        cm = carrier.mask
        gens = []
        for dom in self._masks:
            for images in self._table[dom]:
                h = FHom(self.group, dom, images)
                if not keep(h):
                    continue
                m = h.mapping()
                sub = [x for x in mask_members(dom & cm) if (1 << m[x]) & cm]
                sub_mask = sum(1 << x for x in sub)
                if sub_mask:
                    gens.append(h.restrict(sub_mask))
        return FusionSystem(carrier, gens)

    def normalizer_system(self, U: Subgroup) -> "FusionSystem":
        """Fusion on N_S(U) from maps defined past U that fix U setwise."""
        if U.mask not in self._nsys_cache:
            um = U.mask
            self._nsys_cache[um] = self._harvest(
                U.normalizer(self.S),
                lambda h: (h.dom_mask & um) == um and h.fixes_setwise(um),
            )
        return self._nsys_cache[U.mask]

    def centralizer_system(self, U: Subgroup) -> "FusionSystem":
        """Fusion on C_S(U) from maps defined past U that fix U pointwise."""
        if U.mask not in self._csys_cache:
            um = U.mask
            self._csys_cache[um] = self._harvest(
                U.centralizer(self.S),
                lambda h: (h.dom_mask & um) == um and h.fixes_pointwise(um),
            )
        return self._csys_cache[U.mask]

    def is_normal_in_system(self, T: Subgroup) -> bool:
        """T normal: the U-fixing subsystem on N_S(T) is all of the system."""
        if T.normalizer(self.S).mask != self.S.mask:
            return False
        return self.same_homs(self.normalizer_system(T))

    def o_p(self) -> Subgroup:
        """Largest subgroup normal in the whole system; uniqueness asserted."""
        normals = [
            T
            for T in self.subs
            if T.is_normal_in(self.S) and self.is_normal_in_system(T)
        ]
        top = normals[0]
        for U, V in itertools.combinations(normals, 2):
            if U.join(V) not in normals:
                raise PropertyViolation(
                    "normal subgroups of the system are not join-closed",
                    witness=(U.mask, V.mask),
                )
        for U in normals:
            if not U.le(top):
                raise PropertyViolation(
                    "largest system-normal subgroup is not unique",
                    witness=(top.mask, U.mask),
                )
        return top

    def trivial_on(self, T: Subgroup) -> "FusionSystem":
        return FusionSystem(T)

    # -- classification ------------------------------------------------------

    def _class_flags(self, P: Subgroup) -> tuple:
        """(centric, radical, quasicentric, subcentric) for P's class."""
        conj = self.conjugates(P)
        key = min(Q.mask for Q in conj)
        if key in self._flag_cache:
            return self._flag_cache[key]
        centric = all(Q.centralizer(self.S).le(Q) for Q in conj)
        fn = [Q for Q in conj if self.is_fully_normalized(Q)]
        fc = [Q for Q in conj if self.is_fully_centralized(Q)]
        radical = False
        subcentric = False
        if fn:
            Q = fn[0]
            core = self.normalizer_system(Q).o_p()
            radical = core.mask == Q.mask
            subcentric = all(
                R.centralizer(self.S).le(R) for R in self.conjugates(core)
            )
        quasicentric = False
        if fc:
            Q = fc[0]
            cs = self.centralizer_system(Q)
            quasicentric = cs.same_homs(self.trivial_on(cs.S))
        flags = (centric, radical, quasicentric, subcentric)
        self._flag_cache[key] = flags
        return flags

    def _automizer_radical(self, P: Subgroup) -> bool:
        # diagnostic only: inner automorphisms exhaust the p-core of Aut(P)
        auts = self.auts(P)
        inner = {
            tuple(self.group.conj(x, g) for x in P.members())
            for g in P.members()
        }
        aut_group, to_ord, _ = _aut_group(self.group, P, auts)
        core = _p_core_of(aut_group, self._p_hint())
        core_images = {h.images for h in auts if to_ord[h.images] in core}
        return core_images <= inner

    def _p_hint(self) -> int:
        # S is a p-group; recover p from any prime factor of its order
        n = self.S.order
        if n == 1:
            return 2
        for q in (2, 3, 5, 7, 11, 13):
            if n % q == 0:
                return q
        return n

    def classify(self, P: Subgroup) -> ClassFlags:
        centric, radical, quasicentric, subcentric = self._class_flags(P)
        return ClassFlags(
            centric=centric,
            radical=radical,
            quasicentric=quasicentric,
            subcentric=subcentric,
            fully_normalized=self.is_fully_normalized(P),
            fully_centralized=self.is_fully_centralized(P),
            automizer_radical_diagnostic=self._automizer_radical(P),
        )

    def class_sets(self) -> dict:
        """Subgroup lists for the four classes, canonical order each."""
        out = {"c": [], "cr": [], "q": [], "s": []}
        for P in self.subs:
            centric, radical, quasicentric, subcentric = self._class_flags(P)
            if centric:
                out["c"].append(P)
            if centric and radical:
                out["cr"].append(P)
            if quasicentric:
                out["q"].append(P)
            if subcentric:
                out["s"].append(P)
        return out

    def is_f_closed(self, gamma) -> bool:
        """Nonempty, conjugation-invariant, and closed under overgroups."""
        masks = {P.mask for P in gamma}
        if not masks:
            return False
        for m in masks:
            if m not in self._mask_set:
                return False
            for Q in self.conjugates(self.sub(m)):
                if Q.mask not in masks:
                    return False
            for over in self._masks:
                if (over & m) == m and over not in masks:
                    return False
        return True

    def is_inductive(self, gamma=None) -> bool:
        """Every member maps onto each fully normalized conjugate by a
        morphism defined on its whole S-normalizer."""
        pool = self.subs if gamma is None else list(gamma)
        for U in pool:
            nu = U.normalizer(self.S)
            for V in self.conjugates(U):
                if not self.is_fully_normalized(V):
                    continue
                nv = V.normalizer(self.S)
                ok = any(
                    h.restrict(U.mask).image_mask == V.mask
                    for h in self.homs(nu, nv)
                )
                if not ok:
                    return False
        return True

    def is_cr_generated(self) -> bool:
        """The centric-radical automorphisms already generate everything."""
        gens = []
        for R in self.class_sets()["cr"]:
            gens.extend(self.auts(R))
        return self.same_homs(FusionSystem(self.S, gens))

    def good_conjugate(self, U: Subgroup) -> Subgroup:
        """A conjugate V with V and the core of its normalizer system both
        fully normalized; deterministic choice, existence asserted."""
        for V in self.conjugates(U):
            if not self.is_fully_normalized(V):
                continue
            core = self.normalizer_system(V).o_p()
            if self.is_fully_normalized(core):
                return V
        raise PropertyViolation(
            "no conjugate has both itself and its normalizer core fully normalized",
            witness=U.mask,
        )

    def __repr__(self):
        return f"FusionSystem(|S|={self.S.order}, subgroups={len(self.subs)})"


def _aut_group(group: FiniteGroup, P: Subgroup, auts):
    """Automorphism list as an abstract group via its action on P."""
    from .permgroup import regular_group

    items = [h.images for h in auts]
    ident = tuple(P.members())

    def mul(a, b):
        bm = dict(zip(P.members(), b))
        return tuple(bm[y] for y in a)

    def invert(a):
        pairs = sorted(zip(a, P.members()))
        return tuple(x for _, x in pairs)

    return regular_group(items, mul, invert, ident)


def _p_core_of(group: FiniteGroup, p: int):
    from .permgroup import p_core

    return set(p_core(group, p).members())


def fusion_from_group(G: FiniteGroup, p: int, S: Subgroup | None = None) -> FusionSystem:
    """The fusion system on a Sylow p-subgroup induced by conjugation in G."""
    if S is None:
        S = sylow_p(G, p)
    gens = [_conj_map(G, S.mask, g) for g in range(G.order)]
    return FusionSystem(S, gens)


# -- quotient compatibility ---------------------------------------------------


@dataclass
class FusionMap:
    """Carrier-level map between two systems: S-member -> S̄-member."""

    source: FusionSystem
    target: FusionSystem
    mapping: dict

    def __post_init__(self):
        smem = set(self.source.S.members())
        if set(self.mapping) != smem:
            raise InputError("carrier map must be defined exactly on S")
        if set(self.mapping.values()) != set(self.target.S.members()):
            raise InputError("carrier map must be onto the target S")
        g, gb = self.source.group, self.target.group
        for a, b in itertools.product(self.source.S.members(), repeat=2):
            if self.mapping[g.mult(a, b)] != gb.mult(self.mapping[a], self.mapping[b]):
                raise InputError("carrier map is not a homomorphism")

    @property
    def kernel_mask(self) -> int:
        return sum(1 << x for x, y in self.mapping.items() if y == 0)

    def push_mask(self, mask: int) -> int:
        out = 0
        for x in mask_members(mask):
            out |= 1 << self.mapping[x]
        return out

    def push_hom(self, h: FHom) -> FHom | None:
        """Induced map on images; None when it is not well defined."""
        m = h.mapping()
        tgt_dom = self.push_mask(h.dom_mask)
        images = {}
        for x in mask_members(h.dom_mask):
            bx = self.mapping[x]
            fx = self.mapping[m[x]]
            if images.setdefault(bx, fx) != fx:
                return None
        image_tuple = tuple(images[b] for b in mask_members(tgt_dom))
        if len(set(image_tuple)) != len(image_tuple):
            return None
        return FHom(self.target.group, tgt_dom, image_tuple)


@dataclass
class QuotientFusionReport:
    ok: bool
    checks: dict
    witnesses: list

    def summary(self) -> str:
        bad = [k for k, v in self.checks.items() if v is False]
        return "quotient fusion: pass" if self.ok else f"quotient fusion: FAIL {bad}"


def quotient_fusion_check(
    lam: FusionMap, F: FusionSystem, Fbar: FusionSystem, delta=None, delta_bar=None
) -> QuotientFusionReport:
    """Verify the fusion-side facts a quotient map must satisfy.

    Instance-wise over all subgroups of S containing the kernel: the map is
    fusion-preserving with surjective hom-maps, fully-normalized status
    corresponds, normalizer cores map into normalizer cores, and centric /
    centric-radical membership pulls back.  When object sets are supplied,
    image-closure of the centric-radical objects is checked too.
    """
    if lam.source is not F or lam.target is not Fbar:
        raise InputError("map endpoints do not match the given systems")
    K = lam.kernel_mask
    over = [P for P in F.subs if (P.mask & K) == K]
    checks = {}
    witnesses = []

    def note(name, good, witness=None):
        checks[name] = checks.get(name, True) and good
        if not good and witness is not None and len(witnesses) < 32:
            witnesses.append((name, witness))

    for P in over:
        pb = Fbar.sub(lam.push_mask(P.mask))
        for Q in over:
            qb = Fbar.sub(lam.push_mask(Q.mask))
            pushed = set()
            for h in F.homs(P, Q):
                hb = lam.push_hom(h)
                good = hb is not None and hb.images in Fbar._table[hb.dom_mask]
                note("fusion_preserving", good, (P.mask, h.images))
                if hb is not None:
                    pushed.add(hb.images)
            target_homs = {h.images for h in Fbar.homs(pb, qb)}
            note("hom_surjectivity", target_homs <= pushed, (P.mask, Q.mask))

    for P in over:
        pb = Fbar.sub(lam.push_mask(P.mask))
        note(
            "fully_normalized_correspondence",
            F.is_fully_normalized(P) == Fbar.is_fully_normalized(pb),
            P.mask,
        )
        core = F.normalizer_system(P).o_p()
        core_bar = Fbar.normalizer_system(pb).o_p()
        note(
            "core_image_bound",
            lam.push_mask(core.mask) & ~core_bar.mask == 0,
            P.mask,
        )
        bar_flags = Fbar._class_flags(pb)
        here_flags = F._class_flags(P)
        if bar_flags[0]:
            note("centric_preimage", here_flags[0], P.mask)
        if bar_flags[0] and bar_flags[1]:
            note("centric_radical_preimage", here_flags[0] and here_flags[1], P.mask)

    if delta is not None and delta_bar is not None:
        cr = F.class_sets()["cr"]
        delta_masks = {P.mask for P in delta}
        if all(P.mask in delta_masks for P in cr):
            bar_masks = {P.mask for P in delta_bar}
            good = all(P.mask in bar_masks for P in Fbar.class_sets()["cr"])
            note("object_image_closure", good)
    for name in (
        "fusion_preserving",
        "hom_surjectivity",
        "fully_normalized_correspondence",
        "core_image_bound",
        "centric_preimage",
        "centric_radical_preimage",
    ):
        checks.setdefault(name, True)
    return QuotientFusionReport(
        ok=all(checks.values()), checks=checks, witnesses=witnesses
    )
