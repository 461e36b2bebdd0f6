"""Exact free noncommutative differential algebra on jet letters.

The algebra is generated by the letters U, W and their formal d/dS-jets
U_S, U_2S, ..., W_S, ..., plus the independent-variable letter S.  Words are
ordered tuples of letters (no commutation), polynomials are finite maps from
words to exact Gaussian-rational coefficients.  Everything in this module is
exact; floating point enters only through :func:`evaluate`.

Weights: wt(U_{kS}) = 2 + k, wt(W_{kS}) = 1 + k.  S carries no weight and is
excluded from homogeneity bookkeeping.  The derivation acts by
U_{kS} -> U_{(k+1)S}, W_{kS} -> W_{(k+1)S}, S -> I (the empty word), extended
by Leibniz.  The formal antiderivative inverts it on S-free polynomials by an
exact linear solve over the graded word basis.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np


class SContamination(ValueError):
    """Operation restricted to S-free polynomials received the letter S."""


class NotATotalDerivative(ValueError):
    """The polynomial is outside the image of the derivation."""


class UnassignedLetter(KeyError):
    """A letter of the polynomial has no matrix assigned in the jet."""


_JET_KINDS = ("U", "W")
_WEIGHT_BASE = {"U": 2, "W": 1}


@dataclass(frozen=True)
class Letter:
    """A single generator: a U- or W-jet of given derivative order, or S."""

    kind: str
    order: int = 0

    def __post_init__(self):
        if self.kind not in ("U", "W", "S"):
            raise ValueError(f"unknown letter kind {self.kind!r}")
        if self.order < 0:
            raise ValueError("negative derivative order")
        if self.kind == "S" and self.order != 0:
            raise ValueError("S carries no derivative order")

    @property
    def weight(self):
        if self.kind == "S":
            raise SContamination("S has no weight")
        return _WEIGHT_BASE[self.kind] + self.order

    def bumped(self):
        return Letter(self.kind, self.order + 1)

    def serialize(self):
        if self.kind == "S" or self.order == 0:
            return self.kind
        if self.order == 1:
            return f"{self.kind}_S"
        return f"{self.kind}_{self.order}S"

    @classmethod
    def parse(cls, text):
        if "_" not in text:
            return cls(text, 0)
        kind, tail = text.split("_", 1)
        if not tail.endswith("S"):
            raise ValueError(f"bad letter {text!r}")
        digits = tail[:-1]
        return cls(kind, int(digits) if digits else 1)

    def __repr__(self):
        return self.serialize()


S_LETTER = Letter("S")
U_LETTER = Letter("U")
W_LETTER = Letter("W")


def word_weight(word):
    """Total weight of an S-free word; raises on S."""
    return sum(letter.weight for letter in word)


def word_sort_key(word):
    # graded (by length) lexicographic on letter serializations
    return (len(word), tuple(letter.serialize() for letter in word))


def _frac(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


class GaussianRational:
    """Exact complex number with rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _frac(re))
        object.__setattr__(self, "im", _frac(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @classmethod
    def coerce(cls, x):
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(x)
        raise TypeError(f"cannot coerce {x!r} to GaussianRational")

    def __add__(self, other):
        other = GaussianRational.coerce(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = GaussianRational.coerce(other)
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, other):
        other = GaussianRational.coerce(other)
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = GaussianRational.coerce(other)
        den = other.re * other.re + other.im * other.im
        if den == 0:
            raise ZeroDivisionError("division by zero GaussianRational")
        return GaussianRational(
            (self.re * other.re + self.im * other.im) / den,
            (self.im * other.re - self.re * other.im) / den,
        )

    def __eq__(self, other):
        try:
            other = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def to_complex(self):
        return complex(self.re) + 1j * complex(self.im)

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        def frac_str(f):
            return str(f)

        if not self.im:
            return frac_str(self.re)
        if not self.re:
            if self.im == 1:
                return "i"
            if self.im == -1:
                return "-i"
            return f"{frac_str(self.im)}i"
        sign = "+" if self.im > 0 else "-"
        im = abs(self.im)
        im_str = "i" if im == 1 else f"{frac_str(im)}i"
        return f"{frac_str(self.re)}{sign}{im_str}"


GR_ZERO = GaussianRational(0)
GR_ONE = GaussianRational(1)
GR_I = GaussianRational(0, 1)
GR_HALF = GaussianRational(Fraction(1, 2))


class NcPoly:
    """Noncommutative polynomial: finite map word -> GaussianRational."""

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for word, coeff in terms.items():
                coeff = GaussianRational.coerce(coeff)
                if coeff:
                    clean[tuple(word)] = coeff
        object.__setattr__(self, "_terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("NcPoly is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def identity(cls, coeff=1):
        return cls({(): GaussianRational.coerce(coeff)})

    @classmethod
    def letter(cls, kind, order=0, coeff=1):
        return cls({(Letter(kind, order),): GaussianRational.coerce(coeff)})

    @classmethod
    def word(cls, letters, coeff=1):
        return cls({tuple(letters): GaussianRational.coerce(coeff)})

    # -- inspection --------------------------------------------------------

    @property
    def terms(self):
        return dict(self._terms)

    def coeff(self, word):
        return self._terms.get(tuple(word), GR_ZERO)

    def words(self):
        return sorted(self._terms, key=word_sort_key)

    def is_zero(self):
        return not self._terms

    def letters(self):
        out = set()
        for word in self._terms:
            out.update(word)
        return out

    def has_s(self):
        return any(l.kind == "S" for l in self.letters())

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if not isinstance(other, NcPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, NcPoly):
            return NotImplemented
        out = dict(self._terms)
        for word, coeff in other._terms.items():
            new = out.get(word, GR_ZERO) + coeff
            if new:
                out[word] = new
            else:
                out.pop(word, None)
        poly = NcPoly.__new__(NcPoly)
        object.__setattr__(poly, "_terms", out)
        return poly

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        poly = NcPoly.__new__(NcPoly)
        object.__setattr__(poly, "_terms", {w: -c for w, c in self._terms.items()})
        return poly

    def scale(self, scalar):
        scalar = GaussianRational.coerce(scalar)
        if not scalar:
            return NcPoly.zero()
        poly = NcPoly.__new__(NcPoly)
        object.__setattr__(
            poly, "_terms", {w: c * scalar for w, c in self._terms.items()}
        )
        return poly

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self.scale(other)
        if not isinstance(other, NcPoly):
            return NotImplemented
        out = {}
        for w1, c1 in self._terms.items():
            for w2, c2 in other._terms.items():
                word = w1 + w2
                new = out.get(word, GR_ZERO) + c1 * c2
                if new:
                    out[word] = new
                else:
                    out.pop(word, None)
        poly = NcPoly.__new__(NcPoly)
        object.__setattr__(poly, "_terms", out)
        return poly

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self.scale(other)
        return NotImplemented

    # -- differential structure --------------------------------------------

    def derive(self):
        """d/dS by Leibniz: jets bump their order, S becomes the identity."""
        out = {}
        for word, coeff in self._terms.items():
            for i, letter in enumerate(word):
                if letter.kind == "S":
                    new_word = word[:i] + word[i + 1 :]
                else:
                    new_word = word[:i] + (letter.bumped(),) + word[i + 1 :]
                new = out.get(new_word, GR_ZERO) + coeff
                if new:
                    out[new_word] = new
                else:
                    out.pop(new_word, None)
        poly = NcPoly.__new__(NcPoly)
        object.__setattr__(poly, "_terms", out)
        return poly

    def antiderive(self):
        return antiderive(self)

    def substitute(self, kind, image):
        return substitute(self, kind, image)

    def evaluate(self, jet):
        return evaluate(self, jet)

    def homogeneous_weight(self):
        return is_homogeneous(self)

    # -- display -----------------------------------------------------------

    def __repr__(self):
        return f"NcPoly({to_text(self)})"

    def __str__(self):
        return to_text(self)


# ---------------------------------------------------------------------------
# spec-level operations
# ---------------------------------------------------------------------------


def mul(p, q):
    return p * q


def derive(p):
    return p.derive()


def is_homogeneous(p):
    """Common weight of all words, or None for inhomogeneous / zero input."""
    if p.has_s():
        raise SContamination("homogeneity is defined for S-free polynomials")
    weights = {word_weight(w) for w in p._terms}
    if len(weights) == 1:
        return weights.pop()
    return None


@lru_cache(maxsize=None)
def _words_of_class(n_u, n_w, weight):
    """All words with the given letter counts and total weight, sorted."""
    if n_u == 0 and n_w == 0:
        return ((),) if weight == 0 else ()
    if weight <= 0:
        return ()
    out = []
    for kind, count in (("U", n_u), ("W", n_w)):
        if count == 0:
            continue
        base = _WEIGHT_BASE[kind]
        rest_min = (n_u - (kind == "U")) * 2 + (n_w - (kind == "W"))
        for order in range(0, weight - base - rest_min + 1):
            first = Letter(kind, order)
            for tail in _words_of_class(
                n_u - (kind == "U"), n_w - (kind == "W"), weight - base - order
            ):
                out.append((first,) + tail)
    return tuple(sorted(out, key=word_sort_key))


def _word_class(word):
    n_u = sum(1 for l in word if l.kind == "U")
    n_w = sum(1 for l in word if l.kind == "W")
    return (n_u, n_w, word_weight(word))


def _solve_exact(columns, rhs_map, row_words):
    """Solve sum_j x_j columns[j] = rhs over GaussianRational, or None."""
    index = {w: i for i, w in enumerate(row_words)}
    n_rows, n_cols = len(row_words), len(columns)
    mat = [[GR_ZERO] * (n_cols + 1) for _ in range(n_rows)]
    for j, col in enumerate(columns):
        for word, coeff in col.items():
            mat[index[word]][j] = coeff
    for word, coeff in rhs_map.items():
        mat[index[word]][n_cols] = coeff

    piv_cols = []
    row = 0
    for col in range(n_cols):
        piv = next((r for r in range(row, n_rows) if mat[r][col]), None)
        if piv is None:
            continue
        mat[row], mat[piv] = mat[piv], mat[row]
        inv = GR_ONE / mat[row][col]
        mat[row] = [x * inv for x in mat[row]]
        for r in range(n_rows):
            if r != row and mat[r][col]:
                factor = mat[r][col]
                mat[r] = [a - factor * b for a, b in zip(mat[r], mat[row])]
        piv_cols.append(col)
        row += 1
        if row == n_rows:
            break
    for r in range(row, n_rows):
        if mat[r][n_cols]:
            return None
    solution = [GR_ZERO] * n_cols
    for r, col in enumerate(piv_cols):
        solution[col] = mat[r][n_cols]
    return solution


def antiderive(p):
    """Formal antiderivative with zero integration constant.

    Solves derive(q) = p exactly per (letter-count, weight) class over the
    finite basis of candidate words of weight one less.  Raises
    NotATotalDerivative when the linear system is inconsistent and
    SContamination when p involves the letter S.
    """
    if p.is_zero():
        return NcPoly.zero()
    if p.has_s():
        raise SContamination("antiderive requires an S-free polynomial")
    if () in p._terms:
        raise NotATotalDerivative("constant term has no S-free antiderivative")

    classes = {}
    for word, coeff in p._terms.items():
        classes.setdefault(_word_class(word), {})[word] = coeff

    result = NcPoly.zero()
    for (n_u, n_w, weight), rhs_map in classes.items():
        basis = _words_of_class(n_u, n_w, weight - 1)
        columns = [NcPoly.word(w).derive()._terms for w in basis]
        row_words = sorted(
            set(rhs_map) | {w for col in columns for w in col}, key=word_sort_key
        )
        solution = _solve_exact(columns, rhs_map, row_words)
        if solution is None:
            raise NotATotalDerivative(
                f"weight-{weight} component is not a total derivative"
            )
        result = result + NcPoly(
            {w: c for w, c in zip(basis, solution) if c}
        )
    return result


def substitute(p, kind, image):
    """Homomorphic substitution of the letter family `kind`.

    The order-k jet of the target maps to derive^k(image); other letters are
    untouched.  The image must not mention the substituted kind.
    """
    if any(l.kind == kind for l in image.letters()):
        raise ValueError(f"substitution image must not contain letter kind {kind!r}")
    max_order = -1
    for word in p._terms:
        for letter in word:
            if letter.kind == kind:
                max_order = max(max_order, letter.order)
    images = [image]
    for _ in range(max_order):
        images.append(images[-1].derive())

    result = NcPoly.zero()
    for word, coeff in p._terms.items():
        factor = NcPoly.identity(coeff)
        for letter in word:
            if letter.kind == kind:
                factor = factor * images[letter.order]
            else:
                factor = factor * NcPoly.word((letter,))
        result = result + factor
    return result


@dataclass
class JetPoint:
    """Numeric point of the jet space: letters assigned to r x r matrices."""

    r: int
    assignment: dict

    def matrix(self, letter):
        try:
            return self.assignment[letter]
        except KeyError:
            raise UnassignedLetter(letter.serialize()) from None

    @classmethod
    def from_w_jets(cls, w_jets, sigma, t):
        """Jet with W_{mS} = w_jets[m] and S = diag(sigma) + t."""
        w_jets = [np.asarray(w, dtype=complex) for w in w_jets]
        r = w_jets[0].shape[0]
        assignment = {Letter("W", m): w for m, w in enumerate(w_jets)}
        assignment[S_LETTER] = np.diag(np.asarray(sigma, dtype=complex)) + t * np.eye(r)
        return cls(r=r, assignment=assignment)


def evaluate(p, jet):
    """Numeric evaluation: sum of coeff times ordered matrix product."""
    total = np.zeros((jet.r, jet.r), dtype=complex)
    eye = np.eye(jet.r, dtype=complex)
    for word, coeff in p._terms.items():
        acc = eye
        for letter in word:
            acc = acc @ jet.matrix(letter)
        total += coeff.to_complex() * acc
    return total


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def _frac_str(f):
    return f"{f.numerator}/{f.denominator}"


def to_json_obj(p):
    """Canonical JSON form: graded-lex sorted list of coeff/word records."""
    out = []
    for word in p.words():
        coeff = p._terms[word]
        out.append(
            {
                "coeff": [_frac_str(coeff.re), _frac_str(coeff.im)],
                "word": [letter.serialize() for letter in word],
            }
        )
    return out


def to_json(p):
    return json.dumps(to_json_obj(p), separators=(",", ":"))


def from_json_obj(obj):
    terms = {}
    for record in obj:
        re_s, im_s = record["coeff"]
        coeff = GaussianRational(Fraction(re_s), Fraction(im_s))
        word = tuple(Letter.parse(s) for s in record["word"])
        terms[word] = terms.get(word, GR_ZERO) + coeff
    return NcPoly(terms)


def from_json(text):
    return from_json_obj(json.loads(text))


def to_text(p):
    """Human-readable canonical form, e.g. 'U_2S + 3 U U'."""
    if p.is_zero():
        return "0"
    pieces = []
    for word in p.words():
        coeff = p._terms[word]
        word_str = " ".join(l.serialize() for l in word) if word else "I"
        if not coeff.im and coeff.re < 0:
            sign, coeff = "-", -coeff
        else:
            sign = "+"
        if coeff == GR_ONE and word:
            body = word_str
        else:
            coeff_str = str(coeff)
            if coeff.im and coeff.re:
                coeff_str = f"({coeff_str})"
            body = f"{coeff_str} {word_str}" if word else coeff_str
        if not pieces:
            pieces.append(body if sign == "+" else f"-{body}")
        else:
            pieces.append(f"{sign} {body}")
    return " ".join(pieces)


def _latex_frac(f):
    if f.denominator == 1:
        return str(f.numerator)
    sign = "-" if f.numerator < 0 else ""
    return f"{sign}\\tfrac{{{abs(f.numerator)}}}{{{f.denominator}}}"


def _latex_coeff(c):
    if not c.im:
        return _latex_frac(c.re)
    if not c.re:
        base = _latex_frac(c.im)
        if base == "1":
            return "\\mathrm{i}"
        if base == "-1":
            return "-\\mathrm{i}"
        return f"{base}\\mathrm{{i}}"
    return f"({_latex_frac(c.re)}+{_latex_frac(c.im)}\\mathrm{{i}})"


def _latex_word(word):
    if not word:
        return "I"
    pieces = []
    i = 0
    while i < len(word):
        j = i
        while j < len(word) and word[j] == word[i]:
            j += 1
        letter = word[i]
        if letter.kind == "S":
            base = "S"
        elif letter.order == 0:
            base = letter.kind
        elif letter.order == 1:
            base = f"{letter.kind}_{{S}}"
        else:
            base = f"{letter.kind}_{{{letter.order}S}}"
        power = j - i
        pieces.append(base if power == 1 else f"{base}^{{{power}}}")
        i = j
    return " ".join(pieces)


def to_latex(p):
    if p.is_zero():
        return "0"
    pieces = []
    for word in p.words():
        coeff = p._terms[word]
        if not coeff.im and coeff.re < 0:
            sign, coeff = "-", -coeff
        else:
            sign = "+"
        coeff_str = _latex_coeff(coeff)
        word_str = _latex_word(word)
        if coeff_str == "1" and word:
            body = word_str
        elif word:
            body = f"{coeff_str}\\, {word_str}"
        else:
            body = coeff_str
        if not pieces:
            pieces.append(body if sign == "+" else f"-{body}")
        else:
            pieces.append(f"{sign} {body}")
    return " ".join(pieces)
