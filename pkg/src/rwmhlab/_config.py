"""JSON config loading with line numbers for diagnostics."""
from __future__ import annotations

import json
import json.decoder
import json.scanner
import re

from ._numbers import parse_number
from .errors import ConfigError


class Node(dict):
    """A JSON object that remembers where it sits in the source text."""

    text: str = ""
    span: tuple = (0, 0)

    def line(self, key=None) -> int:
        start, end = self.span
        pos = start
        if key is not None:
            m = re.compile(r'"%s"\s*:' % re.escape(key)).search(self.text, start, end)
            if m:
                pos = m.start()
        return self.text.count("\n", 0, pos) + 1


def _decoder(text):
    dec = json.JSONDecoder()

    def parse_object(s_and_end, *args):
        s, start = s_and_end
        obj, end = json.decoder.JSONObject(s_and_end, *args)
        node = Node(obj)
        node.text, node.span = text, (start - 1, end)
        return node, end

    dec.parse_object = parse_object
    dec.scan_once = json.scanner.py_make_scanner(dec)
    return dec


def loads(text: str) -> Node:
    try:
        obj, end = _decoder(text).raw_decode(text.lstrip())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}: invalid JSON: {exc.msg}") from None
    if not isinstance(obj, Node):
        raise ConfigError("line 1: config must be a JSON object")
    # raw_decode ran on the left-stripped text; spans are only used for line counts
    lead = len(text) - len(text.lstrip())
    if lead:
        _shift(obj, lead)
    return obj


def _shift(obj, k):
    if isinstance(obj, Node):
        obj.span = (obj.span[0] + k, obj.span[1] + k)
        for v in obj.values():
            _shift(v, k)
    elif isinstance(obj, list):
        for v in obj:
            _shift(v, k)


class Reader:
    """Field access on a Node with path-qualified ConfigErrors."""

    def __init__(self, node, path: str, exact: bool = False):
        if not isinstance(node, Node):
            raise ConfigError(f"{path}: expected an object")
        self.node, self.path, self.exact = node, path, exact

    def fail(self, msg, key=None):
        where = f"{self.path}.{key}" if key else self.path
        raise ConfigError(f"line {self.node.line(key)}: {where}: {msg}")

    def check_keys(self, allowed):
        for k in self.node:
            if k not in allowed:
                self.fail(f"unknown key; allowed: {', '.join(sorted(allowed))}", k)

    def has(self, key):
        return key in self.node

    def raw(self, key, default=KeyError):
        if key not in self.node:
            if default is KeyError:
                self.fail("missing required field", key)
            return default
        return self.node[key]

    def sub(self, key):
        return Reader(self.raw(key), f"{self.path}.{key}", self.exact)

    def number(self, key, default=KeyError):
        v = self.raw(key, default)
        if v is default and default is not KeyError:
            return v
        return self.to_number(v, key)

    def to_number(self, v, key):
        try:
            return parse_number(v, self.exact)
        except (TypeError, ValueError, ZeroDivisionError):
            self.fail(f"not a number: {v!r}", key)

    def numbers(self, key, default=KeyError):
        v = self.raw(key, default)
        if v is default and default is not KeyError:
            return v
        if not isinstance(v, list):
            self.fail("expected a list", key)
        return [self.to_vector(x, key) if isinstance(x, list) else self.to_number(x, key) for x in v]

    def to_vector(self, v, key):
        return tuple(self.to_number(x, key) for x in v)

    def integer(self, key, default=KeyError):
        v = self.raw(key, default)
        if v is default and default is not KeyError:
            return v
        if isinstance(v, bool) or not isinstance(v, int):
            self.fail(f"expected an integer, got {v!r}", key)
        return v

    def string(self, key, default=KeyError):
        v = self.raw(key, default)
        if v is default and default is not KeyError:
            return v
        if not isinstance(v, str):
            self.fail(f"expected a string, got {v!r}", key)
        return v
