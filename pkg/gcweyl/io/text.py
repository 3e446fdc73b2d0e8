"""
Plain-text symbol language.

    series := ['+'|'-'] term (('+'|'-') term)*
    term   := power ('*' power)*
    power  := atom ('^' exponent)*
    atom   := INT ['/' INT] | 'i' | 'hbar' | 'eps' | var | field | '(' series ')'
    var    := x | y | v_x | v_y | X | Y | V_x | V_y
    field  := B | phi | E_x | E_y | c1 | c2 | mu_z | 'd[' axes ']' (B | phi)
    exponent := ['-'|'+'] INT | '(' ['-'|'+'] INT ['/' INT] ')'

Negative and half-integer exponents are accepted on B and eps only.
"""

import re
from fractions import Fraction
from typing import List, NamedTuple, Optional

from gcweyl.algebra.coefficient import Coefficient
from gcweyl.algebra.errors import ChartMixing, NegativePowerError, ParseError
from gcweyl.algebra.series import Chart, Generator, GradedSeries, TermKey, Truncation, make_gens
from gcweyl.utils.constants import POSITION_NAMES, VELOCITY_NAMES

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
    |(?P<int>\d+)
    |(?P<deriv>d\[\s*[xy](?:\s*,\s*[xy])*\s*\])
    |(?P<name>[A-Za-z][A-Za-z0-9_]*)
    |(?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)

_PARTICLE_VARS = {"x": "x", "y": "y", "v_x": "vx", "v_y": "vy"}
_GC_VARS = {"X": "x", "Y": "y", "V_x": "vx", "V_y": "vy"}


class Token(NamedTuple):
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> List[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = match.lastgroup
        if kind != "ws":
            tokens.append(Token(kind, match.group(), pos))
        pos = match.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


def _infer_chart(tokens: List[Token], chart: Optional[Chart]) -> Chart:
    names = {t.text for t in tokens if t.kind == "name"}
    particle = names & _PARTICLE_VARS.keys()
    guiding = names & _GC_VARS.keys()
    if particle and guiding:
        first = next(t for t in tokens if t.kind == "name" and t.text in guiding)
        raise ChartMixing(
            f"particle variables {sorted(particle)} mixed with guiding-center variables {sorted(guiding)}",
            first.pos,
        )
    inferred = Chart.PARTICLE if particle else Chart.GUIDING_CENTER if guiding else None
    if chart is not None:
        chart = Chart(chart)
        if inferred is not None and inferred != chart:
            raise ChartMixing(f"expression uses {inferred.value} variables, expected {chart.value}")
        return chart
    return inferred or Chart.PARTICLE


class _Parser:
    def __init__(self, text: str, chart: Optional[Chart], trunc: Optional[Truncation]):
        self.tokens = tokenize(text)
        self.index = 0
        self.chart = _infer_chart(self.tokens, chart)
        self.trunc = trunc
        self.variables = _PARTICLE_VARS if self.chart == Chart.PARTICLE else _GC_VARS

    # Token stream ---------------------------------------------------------

    def peek(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def accept(self, text: str) -> bool:
        if self.peek().kind == "op" and self.peek().text == text:
            self.index += 1
            return True
        return False

    def expect(self, text: str):
        if not self.accept(text):
            token = self.peek()
            raise ParseError(f"expected {text!r}, found {token.text or 'end of input'!r}", token.pos)

    def expect_int(self) -> int:
        token = self.advance()
        if token.kind != "int":
            raise ParseError(f"expected an integer, found {token.text or 'end of input'!r}", token.pos)
        return int(token.text)

    # Grammar --------------------------------------------------------------

    def parse(self) -> GradedSeries:
        result = self.series()
        token = self.peek()
        if token.kind != "end":
            raise ParseError(f"unexpected {token.text!r}", token.pos)
        return result

    def series(self) -> GradedSeries:
        negate = False
        if self.accept("-"):
            negate = True
        else:
            self.accept("+")
        result = self.term()
        if negate:
            result = -result
        while True:
            if self.accept("+"):
                result = result + self.term()
            elif self.accept("-"):
                result = result - self.term()
            else:
                return result

    def term(self) -> GradedSeries:
        result = self.power()
        while self.accept("*"):
            result = result * self.power()
        return result

    def power(self) -> GradedSeries:
        start = self.peek().pos
        base = self.atom()
        while self.accept("^"):
            base = self._raise(base, self.exponent(), start)
        return base

    def exponent(self) -> Fraction:
        if self.accept("("):
            sign = -1 if self.accept("-") else 1
            if sign == 1:
                self.accept("+")
            value = Fraction(self.expect_int())
            if self.accept("/"):
                value /= self.expect_int()
            self.expect(")")
            return sign * value
        sign = -1 if self.accept("-") else 1
        if sign == 1:
            self.accept("+")
        return Fraction(sign * self.expect_int())

    def atom(self) -> GradedSeries:
        token = self.advance()
        if token.kind == "int":
            value = Fraction(int(token.text))
            if self.accept("/"):
                denominator = self.expect_int()
                if denominator == 0:
                    raise ParseError("zero denominator", token.pos)
                value /= denominator
            return self._constant(value)
        if token.kind == "op" and token.text == "(":
            inner = self.series()
            self.expect(")")
            return inner
        if token.kind == "deriv":
            field = self.advance()
            if field.kind != "name" or field.text not in ("B", "phi"):
                raise ParseError("a derivative must be followed by B or phi", field.pos)
            axes = re.findall(r"[xy]", token.text)
            generator = Generator(field.text, axes.count("x"), axes.count("y"))
            return self._monomial(gens=[(generator, 1)])
        if token.kind == "name":
            return self._name(token)
        raise ParseError(f"unexpected {token.text or 'end of input'!r}", token.pos)

    def _name(self, token: Token) -> GradedSeries:
        name = token.text
        if name == "i":
            return GradedSeries.constant(Coefficient.i(), self.chart, self.trunc)
        if name == "hbar":
            return self._monomial(hbar=1)
        if name == "eps":
            return self._monomial(eps=1)
        if name == "B":
            return self._monomial(bhalf=2)
        if name in ("phi", "c1", "c2", "mu_z"):
            return self._monomial(gens=[(Generator(name), 1)])
        if name in ("E_x", "E_y"):
            generator = Generator("phi", 1, 0) if name == "E_x" else Generator("phi", 0, 1)
            return self._monomial(coeff=-1, gens=[(generator, 1)])
        if name in self.variables:
            return GradedSeries.variable(self.variables[name], self.chart, self.trunc)
        raise ParseError(f"unknown symbol {name!r}", token.pos)

    # Helpers --------------------------------------------------------------

    def _constant(self, value) -> GradedSeries:
        return GradedSeries.constant(value, self.chart, self.trunc)

    def _monomial(self, **fields) -> GradedSeries:
        return GradedSeries.monomial(chart=self.chart, trunc=self.trunc, **fields)

    def _raise(self, base: GradedSeries, exponent: Fraction, position: int) -> GradedSeries:
        if exponent.denominator == 1 and exponent >= 0:
            return base ** int(exponent)
        terms = list(base.items())
        key, coeff = terms[0] if len(terms) == 1 else (None, None)
        if (
            key is None
            or coeff != 1
            or key.hbar
            or key.gens
            or not key.is_scalar()
        ):
            raise NegativePowerError("negative or fractional powers apply to B and eps only", position)
        bhalf = key.bhalf * exponent
        eps = key.eps * exponent
        if bhalf.denominator != 1 or eps.denominator != 1:
            raise NegativePowerError("only half-integer powers of B are representable", position)
        return self._monomial(bhalf=int(bhalf), eps=int(eps))


def parse(text: str, chart: Optional[Chart] = None, trunc: Optional[Truncation] = None) -> GradedSeries:
    """
    Parse a symbol.

    Parameters:
        text (str): expression in the symbol language
        chart (Chart): pins the chart of expressions with no variables; must agree with the variables otherwise
        trunc (Truncation): order window of the result
    """
    return _Parser(text, chart, trunc).parse()


# -----------------------------------------------------------------------------
# Rendering
# -----------------------------------------------------------------------------


def _rational(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"({value.numerator}/{value.denominator})"


def _power(name: str, exponent: int) -> str:
    return name if exponent == 1 else f"{name}^{exponent}"


def _b_power(bhalf: int) -> Optional[str]:
    if bhalf == 0:
        return None
    if bhalf % 2 == 0:
        return _power("B", bhalf // 2)
    return f"B^({bhalf}/2)"


def _generator(g: Generator, style: str) -> str:
    if style == "efield" and g.field == "phi" and g.order == 1:
        return "E_x" if g.nx else "E_y"
    if g.order == 0:
        return g.field
    axes = ",".join("x" * g.nx + "y" * g.ny)
    return f"d[{axes}]{g.field}"


def _coefficient_factors(coeff: Coefficient):
    """Returns (negative, factor strings) for a nonzero coefficient."""
    if coeff.im == 0 or coeff.re == 0:
        imaginary = coeff.re == 0
        value = coeff.im if imaginary else coeff.re
        factors = [] if abs(value) == 1 else [_rational(abs(value))]
        if imaginary:
            factors.append("i")
        return value < 0, factors
    im = abs(coeff.im)
    im_text = "i" if im == 1 else f"{_rational(im)}*i"
    sign = "+" if coeff.im > 0 else "-"
    return False, [f"({_rational(coeff.re)} {sign} {im_text})"]


def term_factors(key: TermKey, chart: Chart, style: str = "canonical"):
    """Non-coefficient factors of a term, plus the sign flip from E-field rendering."""
    factors = []
    flips = 0
    if key.hbar:
        factors.append(_power("hbar", key.hbar))
    if key.eps:
        factors.append(_power("eps", key.eps))
    b = _b_power(key.bhalf)
    if b:
        factors.append(b)
    for g, p in key.gens:
        factors.append(_power(_generator(g, style), p))
        if style == "efield" and g.field == "phi" and g.order == 1:
            flips += p
    positions = POSITION_NAMES[Chart(chart).value]
    velocities = VELOCITY_NAMES[Chart(chart).value]
    for name, k in zip(positions + velocities, key.pos + key.vel):
        if k:
            factors.append(_power(name, k))
    return factors, flips % 2 == 1


def render_term(key: TermKey, coeff: Coefficient, chart: Chart, style: str = "canonical", extra=()):
    """Returns (negative, body)."""
    factors, flip = term_factors(key, chart, style)
    if flip:
        coeff = -coeff
    negative, leading = _coefficient_factors(coeff)
    parts = leading + factors + list(extra)
    return negative, "*".join(parts) if parts else "1"


def join_terms(rendered) -> str:
    text = ""
    for index, (negative, body) in enumerate(rendered):
        if index == 0:
            text = f"-{body}" if negative else body
        else:
            text += f" - {body}" if negative else f" + {body}"
    return text or "0"


def render(s: GradedSeries, style: str = "canonical") -> str:
    """
    Deterministic text of a series.

    ``style="efield"`` writes first derivatives of phi as E_x, E_y with the
    sign absorbed into the coefficient.
    """
    if style not in ("canonical", "efield"):
        raise ValueError(f"unknown render style {style!r}")
    return join_terms(render_term(key, coeff, s.chart, style) for key, coeff in s.terms)


# -----------------------------------------------------------------------------
# Structured (JSON-ready) form
# -----------------------------------------------------------------------------


def to_structured(s: GradedSeries) -> list:
    document = []
    for key, coeff in s.terms:
        document.append(
            {
                "coeff": {
                    "re_num": coeff.re.numerator,
                    "re_den": coeff.re.denominator,
                    "im_num": coeff.im.numerator,
                    "im_den": coeff.im.denominator,
                },
                "hbar": key.hbar,
                "eps": key.eps,
                "bhalf": key.bhalf,
                "gens": [
                    {"field": g.field, "d": ["x"] * g.nx + ["y"] * g.ny, "pow": p}
                    for g, p in key.gens
                ],
                "x": list(key.pos),
                "v": list(key.vel),
            }
        )
    return document


def from_structured(document: list, chart: Chart = Chart.PARTICLE, trunc: Optional[Truncation] = None) -> GradedSeries:
    terms = {}
    for entry in document:
        c = entry["coeff"]
        coeff = Coefficient(Fraction(c["re_num"], c["re_den"]), Fraction(c["im_num"], c["im_den"]))
        gens = [
            (Generator(g["field"], g["d"].count("x"), g["d"].count("y")).validate(), g["pow"])
            for g in entry.get("gens", [])
        ]
        key = TermKey(
            entry.get("hbar", 0),
            entry.get("eps", 0),
            entry.get("bhalf", 0),
            make_gens(dict(gens)),
            tuple(entry.get("x", (0, 0))),
            tuple(entry.get("v", (0, 0))),
        )
        terms[key] = terms.get(key, Coefficient(0)) + coeff
    return GradedSeries(terms, chart, trunc)
