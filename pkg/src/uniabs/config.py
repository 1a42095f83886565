"""Analysis configuration: JSON domain trees, validation, option metadata.

A configuration document looks like

    {"language": "universal",
     "domain": {"seq": ["intraproc", "loops", "interproc",
                        {"product": ["string.length", "string.summary"],
                         "reductions": ["string.length_summary"]},
                        "polyhedra"]}}

Nodes are either a domain name, {"seq": [...]} or {"product": [...],
"reductions": [...]}. Exactly one numeric backend must be reachable:
`polyhedra`, or `intervals`/`congruences` (both only inside one product).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Union

ITERATORS = ("intraproc", "loops", "interproc")
STRING_DOMAINS = ("string.length", "string.summary", "string.powerset")
NUMERIC_DOMAINS = ("intervals", "congruences", "polyhedra")
REGISTRY = set(ITERATORS) | set(STRING_DOMAINS) | set(NUMERIC_DOMAINS)
REDUCTIONS = {"itv_congr", "string.length_summary"}


class ConfigError(Exception):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path or '/'}: {message}")
        self.path = path
        self.message = message


@dataclass(frozen=True)
class Leaf:
    name: str


@dataclass(frozen=True)
class Seq:
    children: tuple["ConfigNode", ...]


@dataclass(frozen=True)
class Product:
    children: tuple["ConfigNode", ...]
    reductions: tuple[str, ...] = ()


ConfigNode = Union[Leaf, Seq, Product]


@dataclass(frozen=True)
class ConfigTree:
    language: str
    root: ConfigNode


@dataclass(frozen=True)
class OptionMeta:
    key: str
    owner: str  # "framework" or a domain name
    kind: str  # "flag" | "int" | "string" | "choice"
    default: object
    doc: str
    choices: tuple[str, ...] = ()


class OptionError(Exception):
    pass


@dataclass
class DomainStack:
    """An instantiated analysis: enabled layers plus the option table."""

    iterators: tuple[str, ...]
    string_domains: tuple[str, ...]
    reductions: tuple[str, ...]
    backend: str  # "polyhedra" | "nonrel"
    use_intervals: bool
    use_congruences: bool
    tree: ConfigTree
    options: dict[str, object] = field(default_factory=dict)

    def has(self, name: str) -> bool:
        return name in self.iterators or name in self.string_domains or (
            name == "polyhedra" and self.backend == "polyhedra"
        ) or (name == "intervals" and self.use_intervals) or (
            name == "congruences" and self.use_congruences
        )


# --- parsing -----------------------------------------------------------------


def _parse_node(doc, path: str) -> ConfigNode:
    if isinstance(doc, str):
        if doc not in REGISTRY:
            raise ConfigError(path, f"unknown domain '{doc}'")
        return Leaf(doc)
    if isinstance(doc, dict):
        if "seq" in doc:
            if set(doc) != {"seq"}:
                raise ConfigError(path, "'seq' node must have exactly the 'seq' key")
            items = doc["seq"]
            if not isinstance(items, list) or not items:
                raise ConfigError(f"{path}/seq", "'seq' expects a non-empty list")
            return Seq(
                tuple(_parse_node(x, f"{path}/seq/{i}") for i, x in enumerate(items))
            )
        if "product" in doc:
            if set(doc) - {"product", "reductions"}:
                raise ConfigError(path, "'product' node allows only 'product' and 'reductions'")
            items = doc["product"]
            if not isinstance(items, list) or not items:
                raise ConfigError(f"{path}/product", "'product' expects a non-empty list")
            children = tuple(
                _parse_node(x, f"{path}/product/{i}") for i, x in enumerate(items)
            )
            reductions = doc.get("reductions", [])
            if not isinstance(reductions, list):
                raise ConfigError(f"{path}/reductions", "'reductions' expects a list")
            for i, r in enumerate(reductions):
                if r not in REDUCTIONS:
                    raise ConfigError(f"{path}/reductions/{i}", f"unknown reduction '{r}'")
            node = Product(children, tuple(reductions))
            _check_reductions(node, path)
            return node
        raise ConfigError(path, "expected a domain name, 'seq' node or 'product' node")
    raise ConfigError(path, "expected a domain name, 'seq' node or 'product' node")


def _check_reductions(node: Product, path: str) -> None:
    names = {child.name for child in node.children if isinstance(child, Leaf)}
    for i, r in enumerate(node.reductions):
        if r == "itv_congr" and not {"intervals", "congruences"} <= names:
            raise ConfigError(
                f"{path}/reductions/{i}",
                "'itv_congr' requires 'intervals' and 'congruences' in the product",
            )
        if r == "string.length_summary" and not {"string.length", "string.summary"} <= names:
            raise ConfigError(
                f"{path}/reductions/{i}",
                "'string.length_summary' requires 'string.length' and 'string.summary'",
            )


def _leaves(node: ConfigNode) -> list[tuple[str, ConfigNode]]:
    if isinstance(node, Leaf):
        return [(node.name, node)]
    result = []
    for child in node.children:
        result.extend(_leaves(child))
    return result


def _product_of(node: ConfigNode, name: str) -> Product | None:
    """The product node directly containing the named leaf, if any."""
    if isinstance(node, (Seq, Product)):
        for child in node.children:
            if isinstance(child, Leaf) and child.name == name and isinstance(node, Product):
                return node
            found = _product_of(child, name)
            if found is not None:
                return found
    return None


def parse_config(document: str) -> ConfigTree:
    """Parse and validate a JSON configuration document."""
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("", "configuration must be a JSON object")
    language = doc.get("language")
    if language != "universal":
        raise ConfigError("/language", f"unsupported language {language!r}")
    if "domain" not in doc:
        raise ConfigError("", "missing 'domain' entry")
    root = _parse_node(doc["domain"], "/domain")

    leaves = _leaves(root)
    seen: set[str] = set()
    for name, _ in leaves:
        if name in seen:
            kind = "iterator" if name in ITERATORS else "domain"
            raise ConfigError("/domain", f"duplicate {kind} '{name}'")
        seen.add(name)

    numeric = [n for n in seen if n in NUMERIC_DOMAINS]
    if not numeric:
        raise ConfigError("/domain", "missing numeric backend")
    if "polyhedra" in numeric and len(numeric) > 1:
        raise ConfigError("/domain", "'polyhedra' cannot be combined with another numeric backend")
    if {"intervals", "congruences"} <= set(numeric):
        prod = _product_of(root, "intervals")
        prod2 = _product_of(root, "congruences")
        if prod is None or prod is not prod2:
            raise ConfigError(
                "/domain", "'intervals' and 'congruences' must share one product"
            )
    if "intraproc" not in seen:
        raise ConfigError("/domain", "the 'intraproc' iterator is required")
    return ConfigTree("universal", root)


def parse_config_file(path: str) -> ConfigTree:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


# --- stack building ------------------------------------------------------------

_FRAMEWORK_OPTIONS = (
    OptionMeta("engine", "framework", "choice", "automatic",
               "analysis driver to use", ("automatic", "interactive")),
    OptionMeta("format", "framework", "choice", "text",
               "report output format", ("text", "json")),
    OptionMeta("no-color", "framework", "flag", False,
               "strip ANSI colors from text output"),
    OptionMeta("show-safe-checks", "framework", "flag", False,
               "also report checks proved safe"),
    OptionMeta("call-depth", "framework", "int", 64,
               "maximum inlining depth for function calls"),
)

_LOOP_OPTIONS = (
    OptionMeta("widening-delay", "loops", "int", 1,
               "plain join iterations before widening kicks in"),
    OptionMeta("loop-unrolling", "loops", "int", 0,
               "number of loop iterations analyzed exactly"),
    OptionMeta("decreasing-iterations", "loops", "int", 1,
               "narrowing passes after stabilization"),
    OptionMeta("widening-thresholds", "loops", "string", "",
               "comma-separated integer widening landing points"),
)

_POWERSET_OPTIONS = (
    OptionMeta("string.powerset.max-size", "string.powerset", "int", 5,
               "cardinality bound before the string powerset degrades to top"),
)


def build_stack(tree: ConfigTree) -> DomainStack:
    """Instantiate a validated tree; deterministic for equal trees."""
    names = {name for name, _ in _leaves(tree.root)}
    iterators = tuple(i for i in ITERATORS if i in names)
    strings = tuple(s for s in STRING_DOMAINS if s in names)
    reductions: list[str] = []

    def collect(node: ConfigNode) -> None:
        if isinstance(node, Product):
            reductions.extend(node.reductions)
        if isinstance(node, (Seq, Product)):
            for child in node.children:
                collect(child)

    collect(tree.root)
    backend = "polyhedra" if "polyhedra" in names else "nonrel"
    stack = DomainStack(
        iterators=iterators,
        string_domains=strings,
        reductions=tuple(reductions),
        backend=backend,
        use_intervals="intervals" in names,
        use_congruences="congruences" in names,
        tree=tree,
    )
    stack.options = {meta.key: meta.default for meta in list_options(stack)}
    return stack


def list_options(stack: DomainStack) -> list[OptionMeta]:
    metas = list(_FRAMEWORK_OPTIONS)
    if "loops" in stack.iterators:
        metas.extend(_LOOP_OPTIONS)
    if "string.powerset" in stack.string_domains:
        metas.extend(_POWERSET_OPTIONS)
    return metas


def set_option(stack: DomainStack, key: str, value: str) -> None:
    """Parse `value` according to the option's kind and store it."""
    meta = next((m for m in list_options(stack) if m.key == key), None)
    if meta is None:
        raise OptionError(f"unknown option '{key}'")
    if meta.kind == "flag":
        lowered = value.strip().lower()
        if lowered in ("true", "on", "1", "yes", ""):
            parsed: object = True
        elif lowered in ("false", "off", "0", "no"):
            parsed = False
        else:
            raise OptionError(f"option '{key}' expects a boolean, got {value!r}")
    elif meta.kind == "int":
        try:
            parsed = int(value.strip())
        except ValueError:
            raise OptionError(f"option '{key}' expects an integer, got {value!r}") from None
    elif meta.kind == "choice":
        parsed = value.strip()
        if parsed not in meta.choices:
            raise OptionError(
                f"option '{key}' expects one of {', '.join(meta.choices)}, got {value!r}"
            )
    else:
        parsed = value
    if key == "widening-thresholds" and isinstance(parsed, str) and parsed:
        try:
            [int(part) for part in parsed.split(",")]
        except ValueError:
            raise OptionError(
                f"option '{key}' expects comma-separated integers, got {value!r}"
            ) from None
    stack.options[key] = parsed


def widening_thresholds(stack: DomainStack) -> tuple[int, ...]:
    raw = str(stack.options.get("widening-thresholds", "") or "")
    if not raw:
        return ()
    return tuple(sorted(int(part) for part in raw.split(",")))
