"""Canonical pretty-printer; its output re-parses to an equal AST."""
from __future__ import annotations

from . import syntax as S

_LEVEL = {"||": 1, "&&": 2, "<": 3, "<=": 3, ">": 3, ">=": 3, "==": 3, "!=": 3,
          "+": 4, "-": 4, "@": 4, "*": 5, "/": 5, "%": 5}
_UNARY_LEVEL = 6
_POSTFIX_LEVEL = 7

_STR_ESCAPES = {"\n": "\\n", "\t": "\\t", "\\": "\\\\", '"': '\\"', "\0": "\\0"}
_CHAR_ESCAPES = {"\n": "\\n", "\t": "\\t", "\\": "\\\\", "'": "\\'", "\0": "\\0"}


def pretty_expr(e: S.Expr, parent_level: int = 0) -> str:
    text, level = _expr(e)
    if level < parent_level:
        return f"({text})"
    return text


def _expr(e: S.Expr) -> tuple[str, int]:
    if isinstance(e, S.IntLit):
        return str(e.value), _POSTFIX_LEVEL
    if isinstance(e, S.CharLit):
        ch = chr(e.code)
        return f"'{_CHAR_ESCAPES.get(ch, ch)}'", _POSTFIX_LEVEL
    if isinstance(e, S.StrLit):
        body = "".join(_STR_ESCAPES.get(c, c) for c in e.value)
        return f'"{body}"', _POSTFIX_LEVEL
    if isinstance(e, S.Var):
        return e.name, _POSTFIX_LEVEL
    if isinstance(e, S.Unary):
        inner = pretty_expr(e.operand, _UNARY_LEVEL)
        return f"{e.op}{inner}", _UNARY_LEVEL
    if isinstance(e, S.Binary):
        level = _LEVEL[e.op]
        lhs = pretty_expr(e.lhs, level)
        rhs = pretty_expr(e.rhs, level + 1)
        return f"{lhs} {e.op} {rhs}", level
    if isinstance(e, S.Index):
        base = pretty_expr(e.base, _POSTFIX_LEVEL)
        return f"{base}[{pretty_expr(e.index)}]", _POSTFIX_LEVEL
    if isinstance(e, S.Length):
        return f"|{pretty_expr(e.base)}|", _POSTFIX_LEVEL
    if isinstance(e, S.Rand):
        return f"rand({pretty_expr(e.lo)}, {pretty_expr(e.hi)})", _POSTFIX_LEVEL
    if isinstance(e, S.Call):
        args = ", ".join(pretty_expr(a) for a in e.args)
        return f"{e.name}({args})", _POSTFIX_LEVEL
    raise AssertionError(f"unknown expression {e!r}")  # pragma: no cover


def _stmt(stmt: S.Stmt, indent: int, out: list[str]) -> None:
    pad = "  " * indent
    if isinstance(stmt, S.Decl):
        init = f" = {pretty_expr(stmt.init)}" if stmt.init is not None else ""
        out.append(f"{pad}{stmt.ty} {stmt.name}{init};")
    elif isinstance(stmt, S.Assign):
        out.append(f"{pad}{stmt.name} = {pretty_expr(stmt.value)};")
    elif isinstance(stmt, S.While):
        _compound(f"{pad}while ({pretty_expr(stmt.cond)})", stmt.body, indent, out)
    elif isinstance(stmt, S.If):
        _compound(f"{pad}if ({pretty_expr(stmt.cond)})", stmt.then, indent, out)
        if stmt.orelse is not None:
            _compound(f"{pad}else", stmt.orelse, indent, out)
    elif isinstance(stmt, S.Break):
        out.append(f"{pad}break;")
    elif isinstance(stmt, S.Return):
        value = f" {pretty_expr(stmt.value)}" if stmt.value is not None else ""
        out.append(f"{pad}return{value};")
    elif isinstance(stmt, S.ExprStmt):
        out.append(f"{pad}{pretty_expr(stmt.call)};")
    elif isinstance(stmt, S.Print):
        out.append(f"{pad}print();")
    elif isinstance(stmt, S.Assert):
        out.append(f"{pad}assert({pretty_expr(stmt.cond)});")
    elif isinstance(stmt, S.Block):
        out.append(f"{pad}{{")
        for sub in stmt.stmts:
            _stmt(sub, indent + 1, out)
        out.append(f"{pad}}}")
    else:  # pragma: no cover
        raise AssertionError(f"unknown statement {stmt!r}")


def _compound(header: str, body: S.Stmt, indent: int, out: list[str]) -> None:
    if isinstance(body, S.Block):
        out.append(f"{header} {{")
        for sub in body.stmts:
            _stmt(sub, indent + 1, out)
        out.append("  " * indent + "}")
    else:
        out.append(header)
        _stmt(body, indent + 1, out)


def pretty(program: S.Program | S.TypedProgram) -> str:
    """Render a (typed or untyped) program as canonical source text."""
    out: list[str] = []
    functions = program.functions.values() if isinstance(program, S.TypedProgram) else program.functions
    for fn in functions:
        params = ", ".join(f"{pty} {pname}" for pty, pname in fn.params)
        out.append(f"{fn.return_type} {fn.name}({params}) {{")
        for sub in fn.body.stmts:
            _stmt(sub, 1, out)
        out.append("}")
        out.append("")
    for stmt in program.toplevel:
        _stmt(stmt, 0, out)
    if not out:
        return ""
    return "\n".join(out) + "\n"
