from typing import Any, Dict, Iterable, Mapping, Tuple, TypeVar

from typing_extensions import TypeAlias

_K = TypeVar("_K", bound=Any)
_V = TypeVar("_V", bound=Any)

DictTree: TypeAlias = Dict[str, Any]

KEY_SEP = "."


def dicttree_merge(dict1: Mapping[_K, _V], dict2: Mapping[_K, _V]) -> Dict[_K, _V]:
    """Merge two nested dicts, values from `dict2` winning on conflicts."""
    new = {
        **dict1,
        **dict2,
    }

    for k, v1 in dict1.items():
        if not isinstance(v1, dict):
            continue

        v2 = dict2.get(k)
        if isinstance(v2, Mapping):
            new[k] = dicttree_merge(v1, v2)  # type: ignore

    return new


def dicttree_flatten(tree: Mapping[str, Any], prefix: str = "") -> Dict[str, Any]:
    """Flatten a nested dict into dotted keys, keeping insertion order.

    >>> dicttree_flatten({"a": 1, "b": {"c": 2}})
    {'a': 1, 'b.c': 2}
    """
    flat: Dict[str, Any] = {}
    for k, v in tree.items():
        key = f"{prefix}{KEY_SEP}{k}" if prefix else k
        if isinstance(v, Mapping):
            flat.update(dicttree_flatten(v, key))
        else:
            flat[key] = v

    return flat


def dicttree_unflatten(items: Iterable[Tuple[str, Any]]) -> DictTree:
    """Build a nested dict from `(dotted_key, value)` pairs."""
    tree: DictTree = {}
    for key, value in items:
        *parents, leaf = key.split(KEY_SEP)
        node = tree
        for part in parents:
            child = node.setdefault(part, {})
            if not isinstance(child, dict):
                raise KeyError(f"{key!r} goes through non-section key {part!r}")
            node = child

        node[leaf] = value

    return tree
