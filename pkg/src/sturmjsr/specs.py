"""Text specs for sequences and families, as used on the command line.

Sequences::

    sturmian:gamma=(3-sqrt5)/2,z=0,variant=floor
    periodic:01
    prefix:0110,padding=cycle
    product:[sturmian:gamma=(3-sqrt5)/2;sturmian:gamma=1-sqrt2/2]
    encode:m=4,inner=<spec>
    decode:m=4,inner=<spec>
    shift:k=3,inner=<spec>

Families::

    btv:alpha=alpha_star
    kron:alphas=alpha_star;alpha_double_star
    jb:inner=<family spec>
    toy:2,3
    example-p2
    file:PATH          (matrices in text format, one per line)
"""

from __future__ import annotations

from pathlib import Path

from .families import btv_pair, example_p2, jb_pair, kron_family, toy_family
from .lift import Decoded, Encoded
from .linalg import MatrixFamily, parse_matrix
from .precision import parse_quadratic
from .words import Periodic, PrefixExtended, Product, SequenceSource, Shifted, Sturmian, SturmianSpec, Word

__all__ = ["SpecError", "parse_family", "parse_word_spec"]


class SpecError(ValueError):
    pass


def _split_top(text: str, sep: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def _params(body: str) -> dict[str, str]:
    """``a=1,b=2,inner=<rest>``; ``inner`` swallows the remainder."""
    out: dict[str, str] = {}
    rest = body
    while rest:
        if rest.startswith("inner="):
            out["inner"] = rest[len("inner="):]
            break
        head, *tail = _split_top(rest, ",")
        rest = ",".join(tail)
        if "=" not in head:
            raise SpecError(f"expected key=value, got {head!r}")
        k, v = head.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def parse_word_spec(text: str) -> SequenceSource:
    text = text.strip()
    kind, _, body = text.partition(":")
    kind = kind.strip().lower()
    try:
        if kind == "sturmian":
            p = _params(body)
            unknown = set(p) - {"gamma", "z", "variant"}
            if unknown:
                raise SpecError(f"unknown sturmian keys {sorted(unknown)}")
            spec = SturmianSpec(
                parse_quadratic(p["gamma"]),
                parse_quadratic(p.get("z", "0")),
                p.get("variant", "floor"),
            )
            return Sturmian(spec)
        if kind == "periodic":
            return Periodic(body)
        if kind == "prefix":
            head, *tail = _split_top(body, ",")
            p = _params(",".join(tail))
            return PrefixExtended(Word.parse(head), p.get("padding", "zero"))
        if kind == "product":
            inner = body.strip()
            if not (inner.startswith("[") and inner.endswith("]")):
                raise SpecError("product spec must be product:[spec;spec;...]")
            return Product([parse_word_spec(s) for s in _split_top(inner[1:-1], ";")])
        if kind in ("encode", "decode", "shift"):
            p = _params(body)
            if "inner" not in p:
                raise SpecError(f"{kind} needs inner=<spec>")
            inner = parse_word_spec(p["inner"])
            if kind == "shift":
                return Shifted(inner, int(p.get("k", "0")))
            m = int(p["m"])
            return Encoded(inner, m) if kind == "encode" else Decoded(inner, m)
    except (KeyError, ValueError) as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(f"bad word spec {text!r}: {exc}") from exc
    raise SpecError(f"unknown word spec kind {kind!r}")


def parse_family(text: str) -> MatrixFamily:
    text = text.strip()
    kind, _, body = text.partition(":")
    kind = kind.strip().lower()
    try:
        if kind == "btv":
            return btv_pair(_params(body).get("alpha", "1"))
        if kind == "kron":
            alphas = _params(body)["alphas"]
            return kron_family([a.strip() for a in alphas.split(";")])
        if kind == "jb":
            return jb_pair(parse_family(_params(body)["inner"])).family
        if kind == "toy":
            return toy_family([int(v) for v in body.split(",")])
        if kind == "example-p2":
            return example_p2()[0]
        if kind == "example-p2-pair":
            return example_p2()[1].family
        if kind == "file":
            lines = [ln for ln in Path(body).read_text().splitlines() if ln.strip() and not ln.startswith("#")]
            return MatrixFamily(tuple(parse_matrix(ln) for ln in lines), tag=f"file({body})")
    except (KeyError, ValueError, OSError) as exc:
        raise SpecError(f"bad family spec {text!r}: {exc}") from exc
    raise SpecError(f"unknown family kind {kind!r}")
