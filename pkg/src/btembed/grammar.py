"""Grammar compilation, the symbolic reference parser, and grammar files.

A grammar is a list of (pattern tokens, replacement token) rules. Compilation
turns patterns into chain vectors so the engine can match them with one inner
product; the symbolic parser applies the same scan order to plain tokens and
is the oracle the vector engine is measured against.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

from .embedding import Embedding, encode_list
from .exceptions import ArityExceededError
from .parser import Rule, RuleSet, parse_vectors
from .schema import Schema, Tree
from .vectors import BTVector

GrammarRules = Sequence[tuple[Sequence[str], str]]


def default_arg_attrs(schema: Schema) -> list[str]:
    return [a for a in schema.attributes if a.startswith("arg")]


def compile_rules(
    e: Embedding,
    grammar: GrammarRules,
    next_attr: str = "next",
    arg_attrs: Sequence[str] | None = None,
) -> RuleSet:
    """Encode each pattern as a token chain and keep the binding matrices."""
    if arg_attrs is None:
        arg_attrs = default_arg_attrs(e.schema)
    if not arg_attrs:
        raise ArityExceededError("schema has no argument attributes")
    rules = []
    for pattern, replacement in grammar:
        if len(pattern) == 0:
            raise ValueError("empty rule pattern")
        if len(pattern) > len(arg_attrs):
            raise ArityExceededError(
                f"pattern {tuple(pattern)} needs {len(pattern)} argument "
                f"attributes, schema provides {len(arg_attrs)}"
            )
        rules.append(
            Rule(
                pattern=encode_list(e, list(pattern), next_attr).data,
                replacement=e.token_vector(replacement).copy(),
                arity=len(pattern),
                name=f"{' '.join(pattern)} -> {replacement}",
            )
        )
    return RuleSet(
        rules=tuple(rules),
        next_matrix=e.attribute_matrix(next_attr).copy(),
        arg_matrices=tuple(e.attribute_matrix(a).copy() for a in arg_attrs),
        fingerprint=e.fingerprint,
    )


def parse(
    e: Embedding,
    tokens: Sequence[str],
    ruleset: RuleSet,
    max_steps: int | None = None,
) -> BTVector:
    """Encode the input tokens as slots and run the vector engine."""
    slots = [e.wrap(e.token_vector(t).copy()) for t in tokens]
    return parse_vectors(slots, ruleset, max_steps)


def symbolic_parse(
    grammar: GrammarRules,
    tokens: Sequence[str],
    schema: Schema,
    arg_attrs: Sequence[str] | None = None,
) -> Tree | None:
    """Reference shift-reduce parser with the engine's exact scan order.

    Returns the parse tree, with window members bound under the argument
    attributes, or None when rewriting halts on several slots.
    """
    if arg_attrs is None:
        arg_attrs = default_arg_attrs(schema)
    arg_idx = [schema.attribute_index(a) for a in arg_attrs]
    slots: list[Tree] = [Tree(schema.token_index(t)) for t in tokens]
    if not slots:
        return None
    compiled = [
        ([schema.token_index(t) for t in pattern], schema.token_index(replacement))
        for pattern, replacement in grammar
    ]
    while True:
        hit = False
        for pattern, replacement in compiled:
            m = len(pattern)
            for j in range(len(slots) - m + 1):
                if all(slots[j + k].label == pattern[k] for k in range(m)):
                    kids = {arg_idx[k]: slots[j + k] for k in range(m)}
                    slots[j : j + m] = [Tree.make(replacement, kids)]
                    hit = True
                    break
            if hit:
                break
        if not hit:
            return slots[0] if len(slots) == 1 else None


def balanced_parens_grammar() -> list[tuple[tuple[str, ...], str]]:
    return [(("L", "R"), "E"), (("L", "E", "R"), "E"), (("E", "E"), "E")]


def balanced_parens_schema() -> Schema:
    return Schema(
        tokens=("L", "R", "E", "next", "arg1", "arg2", "arg3"),
        attributes=("next", "arg1", "arg2", "arg3"),
    )


def random_balanced(length: int, rng, open_token: str = "L", close_token: str = "R") -> list[str]:
    """Uniform balanced string of the given even length via ballot counting.

    Exact integer counts of completions keep the distribution uniform over
    all Dyck words of that length.
    """
    if length < 0 or length % 2:
        raise ValueError("length must be even and non-negative")
    counts: dict[tuple[int, int], int] = {}

    def completions(i: int, h: int) -> int:
        # number of valid suffixes from position i at height h
        if h < 0 or h > length - i:
            return 0
        if i == length:
            return 1 if h == 0 else 0
        key = (i, h)
        if key not in counts:
            counts[key] = completions(i + 1, h + 1) + completions(i + 1, h - 1)
        return counts[key]

    word = []
    h = 0
    for i in range(length):
        up = completions(i + 1, h + 1)
        down = completions(i + 1, h - 1)
        pick_up = int(rng.integers(up + down)) < up
        word.append(open_token if pick_up else close_token)
        h += 1 if pick_up else -1
    return word


def save_grammar(grammar: GrammarRules, path: str | Path) -> None:
    payload = {
        "rules": [
            {"pattern": list(pattern), "replacement": replacement}
            for pattern, replacement in grammar
        ]
    }
    with open(path, "w") as f:
        json.dump(payload, f, indent=2)
        f.write("\n")


def load_grammar(path: str | Path) -> list[tuple[tuple[str, ...], str]]:
    with open(path) as f:
        payload = json.load(f)
    return [(tuple(r["pattern"]), r["replacement"]) for r in payload["rules"]]
