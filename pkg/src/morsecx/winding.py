"""Winding-number invariants of Dehn-twist words about separating curves.

Critical points are numbered ``1..p+q+r``: saddles ``1..q``, minima
``q+1..q+p``, maxima ``q+p+1..p+q+r``.  Reference arc ``j`` runs from the
last critical point to point ``j``, ``1 <= j < p+q+r``.

For a separating curve bounding a side ``N`` of genus ``g_N`` with one
boundary circle, the winding number with respect to any Morse function is
``(1 - 2 g_N) - sum of gradient indices inside N``, so a twist word in
separating curves changes the winding of arc ``j`` by
``sum k <curve, arc j> w(curve)`` regardless of the function.
"""

import json

from .permutohedron import ValidationError


class CriticalSetup:
    """Counts of critical points and their gradient indices."""

    def __init__(self, p, q, r):
        for name, val in (("p", p), ("q", q), ("r", r)):
            if not isinstance(val, int) or isinstance(val, bool) or val < 1:
                raise ValidationError(f"{name} must be a positive integer, got {val!r}")
        self.p, self.q, self.r = p, q, r

    @property
    def n_points(self):
        return self.p + self.q + self.r

    @property
    def arcs(self):
        return range(1, self.n_points)

    def index(self, i):
        if not 1 <= i <= self.n_points:
            raise ValidationError(f"no critical point {i} (have 1..{self.n_points})")
        return -1 if i <= self.q else 1

    def is_saddle(self, i):
        return self.index(i) == -1

    def to_json(self):
        return {"p": self.p, "q": self.q, "r": self.r}

    def __repr__(self):
        return f"CriticalSetup(p={self.p}, q={self.q}, r={self.r})"


class SeparatingCurve:
    """A separating curve: the critical points on the enclosed side, that
    side's genus, and declared intersection numbers with the arcs."""

    def __init__(self, name, enclosed, genus=0, intersections=None):
        self.name = str(name)
        self.enclosed = frozenset(int(x) for x in enclosed)
        if not isinstance(genus, int) or genus < 0:
            raise ValidationError(f"curve {self.name}: genus must be a non-negative integer")
        self.genus = genus
        inter = {}
        if isinstance(intersections, dict):
            items = intersections.items()
        else:
            items = enumerate(intersections or [], start=1)
        for j, val in items:
            if isinstance(val, bool) or int(val) != val:
                raise ValidationError(f"curve {self.name}: intersection with arc {j} is not an integer")
            if int(val):
                inter[int(j)] = int(val)
        self.intersections = inter

    def pairing(self, j):
        return self.intersections.get(j, 0)

    def validate(self, setup):
        if not self.enclosed:
            raise ValidationError(f"curve {self.name}: enclosed set is empty")
        if self.enclosed >= set(range(1, setup.n_points + 1)):
            raise ValidationError(f"curve {self.name}: encloses every critical point")
        for x in self.enclosed:
            setup.index(x)
        for j in self.intersections:
            if j not in setup.arcs:
                raise ValidationError(f"curve {self.name}: unknown arc {j}")

    def to_json(self, setup=None):
        n = setup.n_points - 1 if setup else max(self.intersections, default=0)
        return {"name": self.name, "enclosed": sorted(self.enclosed), "genus": self.genus,
                "intersections": [self.pairing(j) for j in range(1, n + 1)]}

    @classmethod
    def from_json(cls, data):
        try:
            return cls(data["name"], data["enclosed"], data.get("genus", 0),
                       data.get("intersections"))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ValidationError(f"malformed curve JSON: {exc}") from exc

    def __repr__(self):
        return f"SeparatingCurve({self.name!r}, enclosed={sorted(self.enclosed)})"


class TwistWord:
    """Product of powers of Dehn twists about separating curves."""

    def __init__(self, letters=()):
        self.letters = []
        for curve, power in letters:
            if isinstance(power, bool) or not isinstance(power, int) or power == 0:
                raise ValidationError(f"twist power must be a non-zero integer, got {power!r}")
            self.letters.append((curve, power))

    def __add__(self, other):
        return TwistWord(self.letters + other.letters)

    def inverse(self):
        return TwistWord([(c, -k) for c, k in reversed(self.letters)])

    def __len__(self):
        return len(self.letters)

    def to_json(self):
        return [{"curve": c.name, "power": k} for c, k in self.letters]


def winding_boundary(setup, curve):
    """Winding number of the boundary of the enclosed side."""
    curve.validate(setup)
    chi = 1 - 2 * curve.genus
    return chi - sum(setup.index(i) for i in curve.enclosed)


def delta_w(setup, curve, power, arc):
    """Change of the winding number of ``arc`` under ``t_curve ** power``."""
    if arc not in setup.arcs:
        raise ValidationError(f"unknown arc {arc}; arcs are 1..{setup.n_points - 1}")
    return power * curve.pairing(arc) * winding_boundary(setup, curve)


def eval_B(setup, word):
    """Integer invariant, one entry per arc ending at a non-last extremum."""
    out = []
    for i in range(setup.q + 1, setup.n_points):
        out.append(sum(delta_w(setup, c, k, i) for c, k in word.letters))
    return tuple(out)


def eval_B_abs(setup, word):
    """Mod-2 invariant, one entry per saddle except the last."""
    out = []
    for i in range(1, setup.q):
        out.append(sum(delta_w(setup, c, k, i) for c, k in word.letters) % 2)
    return tuple(out)


def siq_curve(setup, i):
    """Connected sum of small circles around point ``i`` and the last saddle.

    It meets arc ``i`` once and no other arc.
    """
    q = setup.q
    if i == q:
        raise ValidationError("s_qq is undefined: i must differ from q")
    if not 1 <= i < setup.n_points:
        raise ValidationError(f"i must lie in 1..{setup.n_points - 1}, got {i}")
    return SeparatingCurve(f"s{i}q", {i, q}, 0, {i: 1})


def gamma_f_obstruction(setup, k_saddles, l_extrema):
    """Winding value of a disk boundary with ``k`` saddles and ``l`` extrema.

    Returns ``{"value", "in_Gamma_f_possible", "verdict"}``.  Outside the
    exceptional counts ``l in {0, k+1, p+r}`` the twist about the disk
    boundary changes the component of the function; inside them nothing
    is concluded.
    """
    if not 0 <= k_saddles <= setup.q:
        raise ValidationError(f"k_saddles must lie in 0..{setup.q}")
    if not 0 <= l_extrema <= setup.p + setup.r:
        raise ValidationError(f"l_extrema must lie in 0..{setup.p + setup.r}")
    value = 1 + k_saddles - l_extrema
    excluded = l_extrema not in {0, k_saddles + 1, setup.p + setup.r}
    return {
        "value": value,
        "in_Gamma_f_possible": not excluded,
        "verdict": "not in Gamma_f" if excluded else "no conclusion",
    }


def curve_obstruction(setup, curve):
    """Obstruction verdict for a curve bounding a disk, else None."""
    if curve.genus != 0:
        return None
    k = sum(1 for i in curve.enclosed if setup.is_saddle(i))
    l = len(curve.enclosed) - k
    return gamma_f_obstruction(setup, k, l)


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def load_setup(data):
    """``{"p","q","r","curves":[...]}`` -> (setup, {name: curve})."""
    try:
        setup = CriticalSetup(data["p"], data["q"], data["r"])
        curves = {}
        for c in data.get("curves", []):
            curve = SeparatingCurve.from_json(c)
            curve.validate(setup)
            curves[curve.name] = curve
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed setup JSON: {exc}") from exc
    return setup, curves


def load_word(data, setup, curves):
    """A list (or ``{"word": list}``) of ``{"curve", "power"}`` letters.

    Names ``s<i>q`` not declared in the setup resolve to ``siq_curve``.
    """
    if isinstance(data, dict):
        data = data.get("word")
    if not isinstance(data, list):
        raise ValidationError("a word must be a JSON list of letters")
    letters = []
    for item in data:
        try:
            name, power = item["curve"], item["power"]
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed letter {item!r}") from exc
        curve = curves.get(name)
        if curve is None and isinstance(name, str) and name.startswith("s") and name.endswith("q"):
            try:
                curve = siq_curve(setup, int(name[1:-1]))
            except ValueError as exc:
                raise ValidationError(f"unknown curve {name!r}") from exc
        if curve is None:
            raise ValidationError(f"unknown curve {name!r}")
        letters.append((curve, power))
    return TwistWord(letters)


def invariants_report(setup, word):
    seen, verdicts = set(), []
    for curve, _ in word.letters:
        if curve.name in seen:
            continue
        seen.add(curve.name)
        verdicts.append({"curve": curve.name, "winding": winding_boundary(setup, curve),
                         "obstruction": curve_obstruction(setup, curve)})
    return {"B": list(eval_B(setup, word)), "B_abs": list(eval_B_abs(setup, word)),
            "curves": verdicts}


def dumps(obj):
    return json.dumps(obj, sort_keys=True) + "\n"
