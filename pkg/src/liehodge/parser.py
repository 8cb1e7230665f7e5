"""Parser and serializer for the model / family description format.

Grammar (one statement per line, '#' starts a comment):

    model <name>
    n <int>
    param t                      # marks a deformation family
    d f<k> = <2-form expression>
    coframe f<k> = <1-form expression>   # family coframe over the base fibre
    metric g<i><j> = <scalar>    # Hermitian Gram entry <omega^i, omega^j>

Expressions are sums of terms `[scalar *] x^y` with x, y in {f1..fn, g1..gn}
(g denotes the conjugate coframe), scalars being Gaussian rationals such as
`1/2`, `i`, `2/3 i`, `(1/2+1/3 i)` or polynomials in the declared parameter t.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .model import Form, Key, LieComplexModel, ModelError, monomial_name
from .scalars import GaussianRational, I as IMAG, ONE, Poly, ZERO, format_gaussian

Letter = Tuple[str, int]  # ("h", k) for f_k, ("a", k) for g_k
Word = Tuple[Letter, ...]
TermSum = List[Tuple[Poly, Word]]


class ParseError(ValueError):
    def __init__(self, code: str, message: str, line: int, col: int):
        super().__init__(f"{code} at line {line}, col {col}: {message}")
        self.code = code
        self.line = line
        self.col = col
        self.message = message


@dataclass
class Token:
    kind: str  # NUM GAUSS IDENT OP END
    value: object
    line: int
    col: int


_NUM_RE = re.compile(r"\d+(/\d+)?")
_IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*")


def _tokenize(text: str, line_no: int) -> List[Token]:
    toks: List[Token] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch in " \t":
            i += 1
            continue
        col = i + 1
        if ch.isdigit():
            m = _NUM_RE.match(text, i)
            val = Fraction(m.group(0))
            i = m.end()
            # absorb a directly following standalone 'i' (Gaussian literal)
            j = i
            while j < n and text[j] in " \t":
                j += 1
            m2 = _IDENT_RE.match(text, j)
            if m2 and m2.group(0) == "i":
                toks.append(Token("GAUSS", GaussianRational(0, val), line_no, col))
                i = m2.end()
            else:
                toks.append(Token("GAUSS", GaussianRational(val), line_no, col))
            continue
        if ch.isalpha():
            m = _IDENT_RE.match(text, i)
            toks.append(Token("IDENT", m.group(0), line_no, col))
            i = m.end()
            continue
        if ch in "+-*/^()=":
            toks.append(Token("OP", ch, line_no, col))
            i += 1
            continue
        raise ParseError("E_LEX", f"unexpected character {ch!r}", line_no, col)
    toks.append(Token("END", None, line_no, n + 1))
    return toks


class _ExprParser:
    """Recursive-descent parser for term sums with polynomial scalars."""

    def __init__(self, tokens: List[Token], n: int, param: Optional[str]):
        self.toks = tokens
        self.pos = 0
        self.n = n
        self.param = param

    def peek(self) -> Token:
        return self.toks[self.pos]

    def take(self) -> Token:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def fail(self, code: str, msg: str, tok: Optional[Token] = None):
        tok = tok or self.peek()
        raise ParseError(code, msg, tok.line, tok.col)

    def parse_sum(self) -> TermSum:
        terms = self._signed_term(allow_leading_sign=True)
        while True:
            t = self.peek()
            if t.kind == "OP" and t.value in "+-":
                self.take()
                nxt = self._product()
                if t.value == "-":
                    nxt = [(-p, w) for p, w in nxt]
                terms = _add_sums(terms, nxt)
            else:
                break
        if self.peek().kind != "END":
            self.fail("E_SYNTAX", f"unexpected token {self.peek().value!r}")
        return _normalize(terms)

    def _signed_term(self, allow_leading_sign: bool) -> TermSum:
        t = self.peek()
        neg = False
        if allow_leading_sign and t.kind == "OP" and t.value in "+-":
            self.take()
            neg = t.value == "-"
        out = self._product()
        if neg:
            out = [(-p, w) for p, w in out]
        return out

    def _product(self) -> TermSum:
        out = self._power()
        while True:
            t = self.peek()
            if t.kind == "OP" and t.value in "*/":
                self.take()
                rhs = self._power()
                out = _mul_sums(out, rhs, divide=(t.value == "/"), fail=self.fail, at=t)
            else:
                break
        return out

    def _power(self) -> TermSum:
        base = self._unary()
        while True:
            t = self.peek()
            if t.kind == "OP" and t.value == "^":
                self.take()
                exp = self._unary()
                base = _wedge_or_power(base, exp, fail=self.fail, at=t)
            else:
                break
        return base

    def _unary(self) -> TermSum:
        t = self.peek()
        if t.kind == "OP" and t.value == "-":
            self.take()
            inner = self._unary()
            return [(-p, w) for p, w in inner]
        return self._primary()

    def _primary(self) -> TermSum:
        t = self.take()
        if t.kind == "GAUSS":
            return [(Poly([t.value]), ())]
        if t.kind == "IDENT":
            name = t.value
            if name == "i":
                return [(Poly([IMAG]), ())]
            if self.param is not None and name == self.param:
                return [(Poly.t(), ())]
            m = re.fullmatch(r"([fg])(\d+)", name)
            if m:
                idx = int(m.group(2))
                if not (1 <= idx <= self.n):
                    self.fail("E_INDEX_RANGE", f"generator index {idx} out of range 1..{self.n}", t)
                return [(Poly([ONE]), ((("h" if m.group(1) == "f" else "a"), idx),))]
            if name == "t":
                self.fail("E_PARAM", "parameter t used without a 'param t' declaration", t)
            self.fail("E_SYNTAX", f"unknown identifier {name!r}", t)
        if t.kind == "OP" and t.value == "(":
            inner = self.parse_sub()
            close = self.take()
            if not (close.kind == "OP" and close.value == ")"):
                self.fail("E_SYNTAX", "expected ')'", close)
            return inner
        self.fail("E_SYNTAX", f"unexpected token {t.value!r}", t)

    def parse_sub(self) -> TermSum:
        terms = self._signed_term(allow_leading_sign=True)
        while True:
            t = self.peek()
            if t.kind == "OP" and t.value in "+-":
                self.take()
                nxt = self._product()
                if t.value == "-":
                    nxt = [(-p, w) for p, w in nxt]
                terms = _add_sums(terms, nxt)
            else:
                return _normalize(terms)


def _add_sums(a: TermSum, b: TermSum) -> TermSum:
    return list(a) + list(b)


def _mul_sums(a: TermSum, b: TermSum, divide: bool, fail, at) -> TermSum:
    out: TermSum = []
    for pa, wa in a:
        for pb, wb in b:
            if divide:
                if wb:
                    fail("E_SYNTAX", "cannot divide by a generator", at)
                if not pb.is_constant():
                    fail("E_SYNTAX", "cannot divide by a polynomial in t", at)
                c = pb.constant()
                if not c:
                    fail("E_SYNTAX", "division by zero", at)
                out.append((pa * Poly([ONE / c]), wa))
            else:
                if wa and wb:
                    fail("E_SYNTAX", "use '^' to wedge generators, '*' is scalar multiplication", at)
                out.append((pa * pb, wa + wb))
    return out


def _wedge_or_power(a: TermSum, b: TermSum, fail, at) -> TermSum:
    a_has_gen = any(w for _, w in a)
    b_has_gen = any(w for _, w in b)
    if a_has_gen or b_has_gen:
        if not (a_has_gen and b_has_gen):
            fail("E_SYNTAX", "'^' wedges two generators", at)
        out: TermSum = []
        for pa, wa in a:
            for pb, wb in b:
                out.append((pa * pb, wa + wb))
        return out
    # scalar power: exponent must be a nonnegative integer constant
    if len(b) != 1 or b[0][1]:
        fail("E_SYNTAX", "exponent must be an integer", at)
    c = b[0][0].constant()
    if not b[0][0].is_constant() or not c.is_real() or c.re.denominator != 1 or c.re < 0:
        fail("E_SYNTAX", "exponent must be a nonnegative integer", at)
    k = int(c.re)
    out = [(Poly([ONE]), ())]
    for _ in range(k):
        out = _mul_sums(out, a, divide=False, fail=fail, at=at)
    return out


def _normalize(terms: TermSum) -> TermSum:
    acc: Dict[Word, Poly] = {}
    for p, w in terms:
        acc[w] = acc.get(w, Poly()) + p
    return [(p, w) for w, p in acc.items() if p]


def term_sum_to_form(terms: TermSum, t: Optional[Fraction] = None, expect_letters: Optional[int] = None) -> Form:
    """Evaluate a parsed sum at parameter value t into a Form.

    Letters wedge in written order; the Form constructor canonicalizes signs.
    """
    out = Form.zero()
    for poly, word in terms:
        if expect_letters is not None and word and len(word) != expect_letters:
            raise ParseError("E_SYNTAX", f"expected {expect_letters}-letter monomials", 0, 0)
        coeff = poly(t) if t is not None else poly.constant()
        if not coeff:
            continue
        mono = Form({((), ()): coeff})
        for typ, idx in word:
            letter = Form.hol(idx) if typ == "h" else Form.anti(idx)
            mono = mono.wedge(letter)
        out = out + mono
    return out


@dataclass
class ModelDocument:
    """Parsed, unevaluated model / family description."""

    name: str
    n: int
    structure: Dict[int, TermSum]
    structure_lines: Dict[int, int]
    metric_entries: Dict[Tuple[int, int], GaussianRational] = field(default_factory=dict)
    param: Optional[str] = None
    coframe: Optional[Dict[int, TermSum]] = None

    @property
    def is_family(self) -> bool:
        return self.param is not None

    def uses_parameter(self) -> bool:
        if any(not p.is_constant() for ts in self.structure.values() for p, _ in ts):
            return True
        if self.coframe and any(not p.is_constant() for ts in self.coframe.values() for p, _ in ts):
            return True
        return False


def parse_document(text: str) -> ModelDocument:
    name = None
    n = None
    param = None
    structure: Dict[int, TermSum] = {}
    structure_lines: Dict[int, int] = {}
    coframe: Dict[int, TermSum] = {}
    metric: Dict[Tuple[int, int], GaussianRational] = {}

    lines = text.splitlines()
    # first pass for the 'param' declaration so t can appear anywhere
    for ln in lines:
        stripped = ln.split("#", 1)[0].strip()
        if stripped.startswith("param"):
            parts = stripped.split()
            if len(parts) != 2 or not parts[1].isidentifier():
                raise ParseError("E_SYNTAX", "expected 'param <name>'", lines.index(ln) + 1, 1)
            param = parts[1]

    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head = line.split(None, 1)[0]
        if head == "model":
            parts = line.split(None, 1)
            if len(parts) != 2 or not re.fullmatch(r"[A-Za-z0-9_\-]+", parts[1].strip()):
                raise ParseError("E_BAD_HEADER", "expected 'model <name>'", lineno, 1)
            name = parts[1].strip()
        elif head == "n":
            parts = line.split()
            if len(parts) != 2 or not parts[1].isdigit() or int(parts[1]) < 1:
                raise ParseError("E_BAD_HEADER", "expected 'n <positive int>'", lineno, 1)
            n = int(parts[1])
        elif head == "param":
            continue
        elif head in ("d", "coframe"):
            if n is None:
                raise ParseError("E_BAD_HEADER", "'n <int>' must appear before structure lines", lineno, 1)
            m = re.fullmatch(rf"{head}\s+f(\d+)\s*=\s*(.*)", line)
            if not m:
                raise ParseError("E_SYNTAX", f"expected '{head} f<k> = <expression>'", lineno, 1)
            k = int(m.group(1))
            if not (1 <= k <= n):
                raise ParseError("E_INDEX_RANGE", f"generator index {k} out of range 1..{n}", lineno, 1)
            target = structure if head == "d" else coframe
            if k in target:
                raise ParseError("E_DUPLICATE_GENERATOR", f"duplicate '{head} f{k}' line", lineno, 1)
            rhs = m.group(2)
            col0 = raw.find("=") + 2
            toks = _shift(_tokenize(rhs, lineno), col0)
            terms = _ExprParser(toks, n, param).parse_sum()
            for poly, word in terms:
                want = 2 if head == "d" else 1
                if word and len(word) != want:
                    raise ParseError(
                        "E_SYNTAX", f"'{head}' lines take {want}-generator terms", lineno, col0
                    )
            target[k] = terms
            if head == "d":
                structure_lines[k] = lineno
        elif head == "metric":
            if n is None:
                raise ParseError("E_BAD_HEADER", "'n <int>' must appear before metric lines", lineno, 1)
            m = re.fullmatch(r"metric\s+g(\d)(\d)\s*=\s*(.*)", line)
            if not m:
                raise ParseError("E_SYNTAX", "expected 'metric g<i><j> = <scalar>'", lineno, 1)
            i, j = int(m.group(1)), int(m.group(2))
            if not (1 <= i <= n and 1 <= j <= n):
                raise ParseError("E_INDEX_RANGE", f"metric index g{i}{j} out of range", lineno, 1)
            toks = _shift(_tokenize(m.group(3), lineno), raw.find("=") + 2)
            terms = _ExprParser(toks, n, None).parse_sum()
            if any(w for _, w in terms):
                raise ParseError("E_SYNTAX", "metric entries are scalars", lineno, 1)
            val = sum((p.constant() for p, _ in terms), ZERO)
            if (i, j) in metric:
                raise ParseError("E_DUPLICATE_GENERATOR", f"duplicate metric entry g{i}{j}", lineno, 1)
            metric[(i, j)] = val
        else:
            raise ParseError("E_SYNTAX", f"unknown statement {head!r}", lineno, 1)

    if name is None:
        raise ParseError("E_BAD_HEADER", "missing 'model <name>' line", len(lines) + 1, 1)
    if n is None:
        raise ParseError("E_BAD_HEADER", "missing 'n <int>' line", len(lines) + 1, 1)
    for k in range(1, n + 1):
        if k not in structure:
            raise ParseError("E_MISSING_GENERATOR", f"no structure line for f{k}", len(lines) + 1, 1)

    doc = ModelDocument(
        name=name,
        n=n,
        structure=structure,
        structure_lines=structure_lines,
        metric_entries=metric,
        param=param,
        coframe=coframe or None,
    )
    _check_metric_entries(doc)
    return doc


def _shift(tokens: List[Token], delta: int) -> List[Token]:
    for t in tokens:
        t.col += delta - 1
    return tokens


def _check_metric_entries(doc: ModelDocument):
    for (i, j), v in doc.metric_entries.items():
        if i == j and not (v.is_real()):
            raise ParseError("E_SEMANTIC", f"diagonal metric entry g{i}{i} must be real", 0, 0)
        if i != j and (j, i) in doc.metric_entries:
            w = doc.metric_entries[(j, i)]
            if w != v.conjugate():
                raise ParseError("E_SEMANTIC", f"metric entries g{i}{j}, g{j}{i} are not conjugate", 0, 0)


def gram_from_document(doc: ModelDocument):
    """Hermitian Gram matrix from the metric block (identity where omitted)."""
    from .exactla import Matrix

    n = doc.n
    rows = [[ONE if a == b else ZERO for b in range(n)] for a in range(n)]
    for (i, j), v in doc.metric_entries.items():
        rows[i - 1][j - 1] = v
        if i != j and (j, i) not in doc.metric_entries:
            rows[j - 1][i - 1] = v.conjugate()
    return Matrix(rows)


def build_model(doc: ModelDocument, t: Optional[Fraction] = None) -> LieComplexModel:
    if doc.uses_parameter() and t is None:
        raise ParseError("E_PARAM", "family document requires a parameter value", 0, 0)
    structure = {}
    for k, terms in doc.structure.items():
        structure[k] = term_sum_to_form(terms, t=t if doc.is_family else None, expect_letters=2)
    return LieComplexModel(doc.n, structure, name=doc.name)


def parse_model(text: str) -> LieComplexModel:
    """Parse and validate a (non-family) model file."""
    doc = parse_document(text)
    if doc.uses_parameter():
        raise ParseError("E_PARAM", "this is a family document; use parse_family", 0, 0)
    model = build_model(doc)
    rep = model.validate()
    if not rep.ok:
        first = rep.violations[0]
        m = re.search(r"generator f(\d+)", first)
        line = doc.structure_lines.get(int(m.group(1)), 0) if m else 0
        raise ParseError("E_SEMANTIC", first, line, 1)
    return model


def parse_model_with_metric(text: str):
    doc = parse_document(text)
    if doc.uses_parameter():
        raise ParseError("E_PARAM", "this is a family document; use parse_family", 0, 0)
    model = parse_model(text)
    return model, gram_from_document(doc)


# -- serialization ------------------------------------------------------


def _scalar_str(c: GaussianRational) -> str:
    s = format_gaussian(c)
    if ("+" in s[1:]) or ("-" in s[1:]) or s.endswith("i") and " " in s:
        return f"({s})"
    return s


def _term_str(poly: Poly, word: Word, param: str = "t") -> str:
    gens = "^".join(("f" if typ == "h" else "g") + str(idx) for typ, idx in word)
    if poly.is_constant():
        c = poly.constant()
        if not word:
            return _scalar_str(c)
        if c == ONE:
            return gens
        if c == -ONE:
            return f"-{gens}"
        return f"{_scalar_str(c)}*{gens}"
    ptxt = str(poly).replace("t", param)
    ptxt = f"({ptxt})" if ("+" in ptxt[1:] or "-" in ptxt[1:]) else ptxt
    return f"{ptxt}*{gens}" if word else ptxt


def serialize_terms(terms: TermSum) -> str:
    if not terms:
        return "0"
    parts = []
    for poly, word in sorted(terms, key=lambda pw: pw[1]):
        s = _term_str(poly, word)
        parts.append(s)
    out = parts[0]
    for p in parts[1:]:
        out += " - " + p[1:] if p.startswith("-") else " + " + p
    return out


def form_to_terms(form: Form) -> TermSum:
    terms: TermSum = []
    for key in sorted(form.coeffs):
        I, J = key
        word: Word = tuple(("h", i) for i in I) + tuple(("a", j) for j in J)
        terms.append((Poly([form.coeffs[key]]), word))
    return terms


def serialize_model(model: LieComplexModel, gram=None) -> str:
    lines = [f"model {model.name}", f"n {model.n}"]
    for k in range(1, model.n + 1):
        lines.append(f"d f{k} = {serialize_terms(form_to_terms(model.structure[k]))}")
    if gram is not None:
        n = model.n
        for i in range(1, n + 1):
            for j in range(i, n + 1):
                v = gram.entry(i - 1, j - 1)
                default = ONE if i == j else ZERO
                if v != default:
                    lines.append(f"metric g{i}{j} = {_scalar_str(v)}")
    return "\n".join(lines) + "\n"
