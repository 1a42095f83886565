"""Recursive-descent parser for Universal.

Precedence (loosest to tightest): `||` < `&&` < comparisons < `+ - @`
< `* / %` < unary < index/length/call.
"""
from __future__ import annotations

from .diagnostics import Diagnostic, FrontendError, SourceLoc
from .lexer import Token, tokenize
from . import syntax as S

_CMP_OPS = {"<", "<=", ">", ">=", "==", "!="}
_ADD_OPS = {"+", "-", "@"}
_MUL_OPS = {"*", "/", "%"}


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self, offset: int = 0) -> Token:
        i = min(self.pos + offset, len(self.tokens) - 1)
        return self.tokens[i]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, kind: str, text: str | None = None) -> bool:
        tok = self.peek()
        return tok.kind == kind and (text is None or tok.text == text)

    def expect(self, kind: str, text: str | None = None) -> Token:
        tok = self.peek()
        if not self.at(kind, text):
            expected = text if text is not None else kind
            raise self.error(f"expected {expected!r}, found {self._describe(tok)}")
        return self.advance()

    def error(self, message: str) -> FrontendError:
        return FrontendError([Diagnostic("error", self.peek().loc, message)])

    @staticmethod
    def _describe(tok: Token) -> str:
        return "end of input" if tok.kind == "eof" else repr(tok.text)

    # --- program structure -------------------------------------------------

    def program(self) -> S.Program:
        functions: list[S.FunDecl] = []
        toplevel: list[S.Stmt] = []
        while not self.at("eof"):
            if self._at_fundecl():
                functions.append(self.fundecl())
            else:
                toplevel.append(self.stmt())
        return S.Program(functions, toplevel)

    def _at_fundecl(self) -> bool:
        return (
            self.at("keyword", "int") or self.at("keyword", "str")
        ) and self.peek(1).kind == "ident" and self.peek(2).text == "("

    def fundecl(self) -> S.FunDecl:
        loc = self.peek().loc
        ret = self.advance().text
        name = self.expect("ident").text
        self.expect("punct", "(")
        params: list[tuple[str, str]] = []
        if not self.at("punct", ")"):
            while True:
                if not (self.at("keyword", "int") or self.at("keyword", "str")):
                    raise self.error("expected parameter type 'int' or 'str'")
                pty = self.advance().text
                pname = self.expect("ident").text
                params.append((pty, pname))
                if self.at("punct", ","):
                    self.advance()
                else:
                    break
        self.expect("punct", ")")
        body = self.block()
        return S.FunDecl(loc, name, params, ret, body)

    def block(self) -> S.Block:
        loc = self.expect("punct", "{").loc
        stmts: list[S.Stmt] = []
        while not self.at("punct", "}"):
            if self.at("eof"):
                raise self.error("expected '}'")
            stmts.append(self.stmt())
        self.expect("punct", "}")
        return S.Block(loc, stmts=stmts)

    # --- statements ---------------------------------------------------------

    def stmt(self) -> S.Stmt:
        tok = self.peek()
        if tok.kind == "punct" and tok.text == "{":
            return self.block()
        if tok.kind == "keyword":
            handler = {
                "int": self._decl,
                "str": self._decl,
                "while": self._while,
                "if": self._if,
                "break": self._break,
                "return": self._return,
                "print": self._print,
                "assert": self._assert,
            }.get(tok.text)
            if handler is None:
                raise self.error(f"unexpected keyword {tok.text!r}")
            return handler()
        if tok.kind == "ident":
            if self.peek(1).text == "=":
                return self._assign()
            expr = self.expr()
            if not isinstance(expr, S.Call):
                raise self.error("expression statement must be a call")
            self.expect("punct", ";")
            return S.ExprStmt(expr.loc, call=expr)
        raise self.error(f"expected a statement, found {self._describe(tok)}")

    def _decl(self) -> S.Stmt:
        loc = self.peek().loc
        ty = self.advance().text
        name = self.expect("ident").text
        init = None
        if self.at("punct", "="):
            self.advance()
            init = self.expr()
        self.expect("punct", ";")
        return S.Decl(loc, ty=ty, name=name, init=init)

    def _assign(self) -> S.Stmt:
        name_tok = self.expect("ident")
        self.expect("punct", "=")
        value = self.expr()
        self.expect("punct", ";")
        return S.Assign(name_tok.loc, name=name_tok.text, value=value)

    def _while(self) -> S.Stmt:
        loc = self.advance().loc
        self.expect("punct", "(")
        cond = self.expr()
        self.expect("punct", ")")
        body = self.stmt()
        return S.While(loc, cond=cond, body=body)

    def _if(self) -> S.Stmt:
        loc = self.advance().loc
        self.expect("punct", "(")
        cond = self.expr()
        self.expect("punct", ")")
        then = self.stmt()
        orelse = None
        if self.at("keyword", "else"):
            self.advance()
            orelse = self.stmt()
        return S.If(loc, cond=cond, then=then, orelse=orelse)

    def _break(self) -> S.Stmt:
        loc = self.advance().loc
        self.expect("punct", ";")
        return S.Break(loc)

    def _return(self) -> S.Stmt:
        loc = self.advance().loc
        value = None
        if not self.at("punct", ";"):
            value = self.expr()
        self.expect("punct", ";")
        return S.Return(loc, value=value)

    def _print(self) -> S.Stmt:
        loc = self.advance().loc
        self.expect("punct", "(")
        self.expect("punct", ")")
        self.expect("punct", ";")
        return S.Print(loc)

    def _assert(self) -> S.Stmt:
        loc = self.advance().loc
        self.expect("punct", "(")
        cond = self.expr()
        self.expect("punct", ")")
        self.expect("punct", ";")
        return S.Assert(loc, cond=cond)

    # --- expressions ----------------------------------------------------------

    def expr(self) -> S.Expr:
        return self._or()

    def _binary_chain(self, sub, ops: set[str]) -> S.Expr:
        lhs = sub()
        while self.at("punct") and self.peek().text in ops:
            op = self.advance()
            rhs = sub()
            lhs = S.Binary(lhs.loc, op=op.text, lhs=lhs, rhs=rhs)
        return lhs

    def _or(self) -> S.Expr:
        return self._binary_chain(self._and, {"||"})

    def _and(self) -> S.Expr:
        return self._binary_chain(self._cmp, {"&&"})

    def _cmp(self) -> S.Expr:
        return self._binary_chain(self._add, _CMP_OPS)

    def _add(self) -> S.Expr:
        return self._binary_chain(self._mul, _ADD_OPS)

    def _mul(self) -> S.Expr:
        return self._binary_chain(self._unary, _MUL_OPS)

    def _unary(self) -> S.Expr:
        tok = self.peek()
        if tok.kind == "punct" and tok.text in ("-", "!"):
            self.advance()
            operand = self._unary()
            return S.Unary(tok.loc, op=tok.text, operand=operand)
        return self._postfix()

    def _postfix(self) -> S.Expr:
        expr = self._primary()
        while self.at("punct", "["):
            self.advance()
            index = self.expr()
            self.expect("punct", "]")
            expr = S.Index(expr.loc, base=expr, index=index)
        return expr

    def _primary(self) -> S.Expr:
        tok = self.peek()
        if tok.kind == "int":
            self.advance()
            return S.IntLit(tok.loc, value=tok.value)  # type: ignore[arg-type]
        if tok.kind == "char":
            self.advance()
            return S.CharLit(tok.loc, code=tok.value)  # type: ignore[arg-type]
        if tok.kind == "string":
            self.advance()
            return S.StrLit(tok.loc, value=tok.value)  # type: ignore[arg-type]
        if tok.kind == "ident":
            self.advance()
            if self.at("punct", "("):
                self.advance()
                args: list[S.Expr] = []
                if not self.at("punct", ")"):
                    while True:
                        args.append(self.expr())
                        if self.at("punct", ","):
                            self.advance()
                        else:
                            break
                self.expect("punct", ")")
                return S.Call(tok.loc, name=tok.text, args=args)
            return S.Var(tok.loc, name=tok.text)
        if tok.kind == "punct" and tok.text == "(":
            self.advance()
            inner = self.expr()
            self.expect("punct", ")")
            return inner
        if tok.kind == "punct" and tok.text == "|":
            self.advance()
            inner = self.expr()
            self.expect("punct", "|")
            return S.Length(tok.loc, base=inner)
        raise self.error(f"expected an expression, found {self._describe(tok)}")


def parse(source: str, filename: str = "<input>") -> S.Program:
    """Parse Universal source text; raises FrontendError on failure."""
    tokens = tokenize(source, filename)
    parser = _Parser(tokens)
    program = parser.program()
    return program


def parse_or_diagnostics(source: str, filename: str = "<input>"):
    """Like parse() but returns (program, diagnostics) instead of raising."""
    try:
        return parse(source, filename), []
    except FrontendError as exc:
        return None, exc.diagnostics
