"""Layered boundary state for peeling explorations.

The key structural fact (hypothesis (H)) is that during peeling by layers
the boundary edges at the current layer height h ("low") always form one
contiguous cyclic arc, the rest ("high") being at height h + 1.  The cyclic
word of length 2p therefore compresses to the triple (p, m, cursor) with m
the number of low edges; we keep the word in the canonical rotation

    [low x m] [high x (2p - m)]

and always peel the arc's left endpoint, so the cursor is index 0.  An
explicit word is carried alongside in debug mode so the invariant suite can
check the compressed bookkeeping against literal edge-by-edge updates.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

__all__ = ["LayeredBoundary", "PeelEvent", "StepOutcome", "peel_step"]


@dataclass(frozen=True)
class PeelEvent:
    """One peeling event: C(k) discovers a face of degree 2k, G(side, j)
    glues the peeled edge to another boundary edge, swallowing a hole of
    half-perimeter j on the given side."""

    kind: str  # "C" or "G"
    k: int | None = None
    side: str | None = None  # "left" or "right" for G
    j: int | None = None

    def __post_init__(self):
        if self.kind == "C":
            if self.k is None or self.k < 1:
                raise ValueError("C(k) requires k >= 1")
        elif self.kind == "G":
            if self.j is None or self.j < 0:
                raise ValueError("G requires j >= 0")
            if self.side not in ("left", "right"):
                raise ValueError("G side must be left or right")
        else:
            raise ValueError(f"unknown event kind {self.kind!r}")


@dataclass(frozen=True)
class StepOutcome:
    height_increment: int = 0
    swallowed: int | None = None  # half-perimeter of the filled hole
    face_degree: int | None = None  # 2k for a C(k) event
    absorbed: bool = False


@dataclass(frozen=True)
class LayeredBoundary:
    """Compressed boundary state (p, m, cursor) at layer height h."""

    p: int  # half-perimeter; word length is 2p
    h: int = 0  # completed-layer height
    m: int | None = None  # number of low edges; default all low
    cursor: int = 0  # peel position, always the low arc's left end
    word: tuple | None = None  # explicit labels, debug mode only

    def __post_init__(self):
        if self.p < 0:
            raise ValueError("half-perimeter must be >= 0")
        if self.m is None:
            object.__setattr__(self, "m", 2 * self.p)
        if not 0 <= self.m <= 2 * self.p:
            raise ValueError("low-edge count out of range")
        if self.p > 0 and self.m == 0:
            raise ValueError("live boundary must retain a low edge")
        if self.word is not None:
            _check_word(self)

    @property
    def debug(self) -> bool:
        return self.word is not None

    def with_word(self) -> "LayeredBoundary":
        """Return the same state carrying an explicit label word."""
        w = ("low",) * self.m + ("high",) * (2 * self.p - self.m)
        return replace(self, word=w)


def _check_word(state: LayeredBoundary) -> None:
    w = state.word
    if len(w) != 2 * state.p:
        raise AssertionError("word length != 2p")
    if sum(1 for x in w if x == "low") != state.m:
        raise AssertionError("low count != m")
    # (H): low edges form a single contiguous cyclic arc
    changes = sum(1 for i in range(len(w)) if w[i] != w[i - 1])
    if len(w) > 0 and changes not in (0, 2):
        raise AssertionError("(H) violated: low arc not contiguous")
    if state.p > 0 and w[state.cursor] != "low":
        raise AssertionError("peel cursor not on a low edge")


def _canonical_word(p: int, m: int) -> tuple:
    return ("low",) * m + ("high",) * (2 * p - m)


def peel_step(state: LayeredBoundary, event: PeelEvent, mode: str = "finite"):
    """Apply one peeling event; return (new_state, StepOutcome).

    ``mode`` is "finite" (locally-largest filling: the swallowed hole is
    the smaller side, j <= p-1-j) or "infinite" (the swallowed hole is the
    finite side, any j <= p-1).
    """
    p, m = state.p, state.m
    if p < 1:
        raise ValueError("cannot peel an absorbed boundary")
    if mode not in ("finite", "infinite"):
        raise ValueError("mode must be finite or infinite")

    if event.kind == "C":
        k = event.k
        new_p = p + k - 1
        new_m = m - 1  # the peeled low edge is replaced by high edges
        face_degree = 2 * k
        swallowed = None
        new_word = None
        if state.debug:
            # peeled edge at cursor replaced by 2k-1 edges of the new face,
            # all at height h+1
            w = list(state.word)
            w[state.cursor : state.cursor + 1] = ["high"] * (2 * k - 1)
            new_word = tuple(w)
    else:
        j = event.j
        if j > p - 1:
            raise ValueError("split index j must be <= p-1")
        if mode == "finite" and j > p - 1 - j:
            raise ValueError("locally-largest rule fills the smaller hole")
        new_p = p - 1 - j
        if event.side == "right":
            # peeled edge, then 2j swallowed edges, then the partner: the
            # low arc is eaten from its left end
            removed_low = min(2 * j + 2, m)
        else:
            # walking left wraps into the high arc first
            removed_low = 1 + max(0, m - (2 * p - 2 * j - 1))
        new_m = m - removed_low
        face_degree = None
        swallowed = j
        new_word = None
        if state.debug:
            w = list(state.word)
            n = len(w)
            if event.side == "right":
                drop = {(state.cursor + i) % n for i in range(2 * j + 2)}
            else:
                drop = {(state.cursor - i) % n for i in range(2 * j + 2)}
            new_word = tuple(w[i] for i in range(n) if i not in drop)

    if new_p == 0:
        out = StepOutcome(swallowed=swallowed, face_degree=face_degree, absorbed=True)
        return LayeredBoundary(p=0, h=state.h, m=0,
                               word=() if state.debug else None), out

    height_inc = 0
    if new_m == 0:
        # layer completed: all edges now sit at one height again
        height_inc = 1
        new_m = 2 * new_p
        if state.debug:
            new_word = _canonical_word(new_p, new_m)
    elif state.debug:
        # rotate the word so the low arc leads (canonical form)
        n = len(new_word)
        starts = [i for i in range(n)
                  if new_word[i] == "low" and new_word[i - 1] != "low"]
        r = starts[0] if starts else 0
        new_word = tuple(new_word[(r + i) % n] for i in range(n))

    new_state = LayeredBoundary(p=new_p, h=state.h + height_inc, m=new_m,
                                word=new_word)
    out = StepOutcome(height_increment=height_inc, swallowed=swallowed,
                      face_degree=face_degree)
    return new_state, out
