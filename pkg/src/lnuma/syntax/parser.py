"""Lexer and recursive-descent parser for `.nm` sources and behaviour terms.

Grammar (informal)::

    program   := class*
    class     := ['active'] 'class' Name '<' id (',' id)* '>' field* method*
    field     := id ':' type
    method    := 'def' id '(' [id ':' type] ')' ':' type 'as' behaviour '{' expr '}'
    type      := 'bool' | 'nil' | Name '<' loc (',' loc)* '>'
    expr      := 'let' id '=' expr 'in' expr
               | 'if' expr 'then' expr 'else' expr
               | postfix ['=' expr]
    postfix   := primary ('.' id ['(' [expr] ')'] | '!' id '(' [expr] ')')*
    primary   := id | 'this' | 'true' | 'false' | 'null' | 'skip'
               | 'new' Name '<' locs '>' | 'for' id 'in' INT '..' INT '{' expr '}'
               | '(' expr ')'
    behaviour := term ('.' term)*
    term      := 'eps' | 'read(' l ',' l ')' | 'write(' l ',' l ')'
               | 'msg(' l ',' l ',' id ')' | INT '*' '{' behaviour '}'
               | '(' behaviour ['+' behaviour | '||' behaviour] ')'
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from ..diagnostics import Diagnostic, ParseError
from .. import effects
from .nodes import (
    AbstractLoc, AsyncSend, BOOL, ClassDecl, EPS, FalseLit, FieldDecl, FieldRead,
    FieldWrite, For, If, Let, Loop, MAIN, MethodDecl, NIL, New, NodeId, Null,
    OwnedType, OwnerParam, Param, Par, Program, RemAccess, Seq, Span, SyncCall,
    This, TrueLit, Var, Choice,
)

RESERVED = frozenset("""
    active class def as let in if then else for new this null true false skip
    return bool nil int
""".split())

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>(\#|//)[^\n]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<int>[0-9]+)
  | (?P<sym>\.\.|\|\||[<>,:(){}.=!*+@])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: Span


def tokenize(text: str) -> list:
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            span = Span(line, pos - line_start + 1)
            raise ParseError([Diagnostic(f"unexpected character {text[pos]!r}", span, "lex")])
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            tokens.append(Token(kind, m.group(), Span(line, pos - line_start + 1)))
        pos = m.end()
    tokens.append(Token("eof", "", Span(line, pos - line_start + 1)))
    return tokens


class _Parser:

    def __init__(self, text: str, scope=None, allow_nodes: bool = False):
        self.toks = tokenize(text)
        self.pos = 0
        # name -> Location; None means "free names are abstract locations"
        self.scope = scope
        self.allow_nodes = allow_nodes
        self.diags = []

    # -- token helpers -----------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("sym", "ident") and t.text == text

    def advance(self) -> Token:
        t = self.tok
        if t.kind != "eof":
            self.pos += 1
        return t

    def fail(self, message: str, tok: Token = None):
        tok = tok or self.tok
        raise ParseError(self.diags + [Diagnostic(message, tok.span, "syntax")])

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            self.fail(f"expected {text!r}, found {found!r}")
        return self.advance()

    def ident(self, what: str = "identifier") -> str:
        t = self.tok
        if t.kind != "ident":
            self.fail(f"expected {what}, found {t.text or 'end of input'!r}")
        if t.text in RESERVED:
            if t.text == "int":
                self.fail("'int' is not source syntax")
            self.fail(f"keyword {t.text!r} cannot be used as {what}")
        self.advance()
        return t.text

    def integer(self) -> int:
        t = self.tok
        if t.kind != "int":
            self.fail(f"expected integer, found {t.text or 'end of input'!r}")
        self.advance()
        return int(t.text)

    # -- locations and types -------------------------------------------------

    def location(self):
        t = self.tok
        if t.kind == "int":
            if not self.allow_nodes:
                self.fail("node identifiers are not source syntax")
            self.advance()
            return NodeId(int(t.text))
        name = self.ident("location")
        if self.scope is None:
            return AbstractLoc(name)
        if name not in self.scope:
            self.fail(f"unknown location {name!r}", t)
        return self.scope[name]

    def locations(self) -> tuple:
        self.expect("<")
        locs = [self.location()]
        while self.at(","):
            self.advance()
            locs.append(self.location())
        self.expect(">")
        return tuple(locs)

    def type_(self):
        if self.at("bool"):
            self.advance()
            return BOOL
        if self.at("nil"):
            self.advance()
            return NIL
        if self.at("int"):
            self.fail("'int' is not source syntax")
        name = self.ident("type")
        return OwnedType(name, self.locations())

    # -- behaviours ------------------------------------------------------------

    def behaviour(self):
        terms = [self.behaviour_term()]
        while self.at("."):
            self.advance()
            terms.append(self.behaviour_term())
        b = EPS
        for t in reversed(terms):
            b = effects.concat(t, b)
        return b

    def behaviour_term(self):
        t = self.tok
        if t.kind == "ident" and t.text == "eps":
            self.advance()
            return EPS
        if t.kind == "ident" and t.text in ("read", "write", "msg") and self.peek().text == "(":
            self.advance()
            self.expect("(")
            src = self.location()
            self.expect(",")
            dst = self.location()
            method = None
            if t.text == "msg":
                self.expect(",")
                method = self.ident("method name")
            self.expect(")")
            return Seq(RemAccess(t.text, src, dst, method), EPS)
        if t.kind == "int":
            n = self.integer()
            if n < 1:
                self.fail(f"loop count must be at least 1, got {n}", t)
            self.expect("*")
            self.expect("{")
            body = self.behaviour()
            self.expect("}")
            return Seq(Loop(n, body), EPS)
        if self.at("("):
            self.advance()
            left = self.behaviour()
            if self.at("+"):
                self.advance()
                right = self.behaviour()
                self.expect(")")
                return Seq(Choice(left, right), EPS)
            if self.at("||"):
                self.advance()
                right = self.behaviour()
                self.expect(")")
                return Par(left, right)
            self.expect(")")
            return left
        self.fail(f"expected behaviour, found {t.text or 'end of input'!r}")

    # -- expressions -------------------------------------------------------------

    def expr(self):
        t = self.tok
        if self.at("let"):
            self.advance()
            var = self.ident("variable")
            self.expect("=")
            bound = self.expr()
            self.expect("in")
            return Let(var, bound, self.expr(), span=t.span)
        if self.at("if"):
            self.advance()
            cond = self.expr()
            self.expect("then")
            then = self.expr()
            self.expect("else")
            return If(cond, then, self.expr(), span=t.span)
        e = self.postfix()
        if self.at("="):
            if not isinstance(e, FieldRead):
                self.fail("left-hand side of '=' must be a field access")
            self.advance()
            return FieldWrite(e.recv, e.field, self.expr(), span=e.span)
        return e

    def call_arg(self):
        self.expect("(")
        if self.at(")"):
            self.advance()
            return None
        arg = self.expr()
        self.expect(")")
        return arg

    def postfix(self):
        e = self.primary()
        while True:
            t = self.tok
            if self.at("."):
                self.advance()
                name = self.ident("field or method name")
                if self.at("("):
                    e = SyncCall(e, name, self.call_arg(), span=t.span)
                else:
                    e = FieldRead(e, name, span=t.span)
            elif self.at("!"):
                self.advance()
                name = self.ident("method name")
                e = AsyncSend(e, name, self.call_arg(), span=t.span)
            else:
                return e

    def primary(self):
        t = self.tok
        if t.kind == "int":
            self.fail("integer literals are not source syntax")
        if self.at("@"):
            self.fail("address literals are runtime-only")
        if self.at("return"):
            self.fail("'return' is runtime-only")
        if self.at("("):
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        if self.at("this"):
            self.advance()
            return This(span=t.span)
        if self.at("true"):
            self.advance()
            return TrueLit(span=t.span)
        if self.at("false"):
            self.advance()
            return FalseLit(span=t.span)
        if self.at("null") or self.at("skip"):
            self.advance()
            return Null(span=t.span)
        if self.at("new"):
            self.advance()
            cls = self.ident("class name")
            return New(cls, self.locations(), span=t.span)
        if self.at("for"):
            self.advance()
            var = self.ident("loop variable")
            self.expect("in")
            lo = self.integer()
            self.expect("..")
            hi = self.integer()
            self.expect("{")
            body = self.expr()
            self.expect("}")
            return For(var, lo, hi, body, span=t.span)
        if t.kind == "ident":
            return Var(self.ident("variable"), span=t.span)
        self.fail(f"expected expression, found {t.text or 'end of input'!r}")

    # -- declarations --------------------------------------------------------------

    def program(self) -> Program:
        classes = []
        seen = set()
        while self.tok.kind != "eof":
            cd = self.class_decl()
            if cd.name in seen:
                self.diags.append(Diagnostic(f"duplicate class {cd.name!r}", cd.span, "syntax"))
            seen.add(cd.name)
            classes.append(cd)
        if self.diags:
            raise ParseError(self.diags)
        return Program(tuple(classes))

    def class_decl(self) -> ClassDecl:
        start = self.tok
        active = False
        if self.at("active"):
            self.advance()
            active = True
        self.expect("class")
        name = self.ident("class name")
        self.expect("<")
        owners = [self.ident("ownership parameter")]
        while self.at(","):
            self.advance()
            owners.append(self.ident("ownership parameter"))
        self.expect(">")
        for dup in sorted({o for o in owners if owners.count(o) > 1}):
            self.diags.append(Diagnostic(f"duplicate ownership parameter {dup!r} in class {name!r}",
                                         start.span, "syntax"))
        kind = AbstractLoc if name == MAIN else OwnerParam
        self.scope = {p: kind(p) for p in owners}

        fields, methods = [], []
        names = set()
        while self.tok.kind == "ident" and self.peek().text == ":" and not self.at("def"):
            t = self.tok
            fname = self.ident("field name")
            self.expect(":")
            fields.append(FieldDecl(fname, self.type_(), span=t.span))
            if fname in names:
                self.diags.append(Diagnostic(f"duplicate field {fname!r} in class {name!r}",
                                             t.span, "syntax"))
            names.add(fname)
        mnames = set()
        while self.at("def"):
            md = self.method_decl()
            if md.name in mnames:
                self.diags.append(Diagnostic(f"duplicate method {md.name!r} in class {name!r}",
                                             md.span, "syntax"))
            mnames.add(md.name)
            methods.append(md)
        if not (self.at("active") or self.at("class") or self.tok.kind == "eof"):
            self.fail(f"expected field, method or class declaration, found {self.tok.text!r}")
        return ClassDecl(active, name, tuple(owners), tuple(fields), tuple(methods),
                         span=start.span)

    def method_decl(self) -> MethodDecl:
        start = self.expect("def")
        name = self.ident("method name")
        self.expect("(")
        param = None
        if not self.at(")"):
            pname = self.ident("parameter name")
            self.expect(":")
            param = Param(pname, self.type_())
        self.expect(")")
        self.expect(":")
        ret = self.type_()
        self.expect("as")
        b = self.behaviour()
        self.expect("{")
        body = self.expr()
        self.expect("}")
        return MethodDecl(name, param, ret, b, body, span=start.span)

    def finish(self, result):
        if self.tok.kind != "eof":
            self.fail(f"unexpected {self.tok.text!r} after end of input")
        return result


def parse_program(text: str) -> Program:
    """Parse a whole `.nm` source. Raises ParseError with diagnostics."""
    p = _Parser(text)
    return p.finish(p.program())


def _scope(params, main: bool):
    kind = AbstractLoc if main else OwnerParam
    return {name: kind(name) for name in params}


def parse_behaviour(text: str, params=None, allow_nodes: bool = True):
    """Parse a standalone behaviour term.

    Integers denote node ids. Identifiers listed in `params` become owner
    parameters; any other identifier is an abstract location.
    """
    p = _Parser(text, allow_nodes=allow_nodes)
    if params:
        p.scope = _FallbackScope(_scope(params, main=False))
    return p.finish(p.behaviour())


def parse_expr(text: str, params=(), main: bool = False):
    """Parse an expression whose locations range over `params`."""
    p = _Parser(text, scope=_scope(params, main))
    return p.finish(p.expr())


def parse_type(text: str, params=(), main: bool = False):
    p = _Parser(text, scope=_scope(params, main))
    return p.finish(p.type_())


class _FallbackScope(dict):
    def __contains__(self, key):
        return True

    def __missing__(self, key):
        return AbstractLoc(key)
