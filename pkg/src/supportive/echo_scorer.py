"""Bundled stand-in external scorer speaking wire protocol v1.

Useful for exercising the external-scorer code paths without a real model:

    python -m supportive.echo_scorer --p 0.9          # constant probability
    python -m supportive.echo_scorer --mode hash      # text-hash probability
    python -m supportive.echo_scorer --reverse-every 4  # out-of-order replies

Hash mode is deterministic per text, so ranked lists get distinct scores.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys


def text_probability(text: str) -> float:
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") / 2**64


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="echo-scorer")
    parser.add_argument("--name", default="echo")
    parser.add_argument("--p", type=float, default=None, help="constant probability")
    parser.add_argument("--mode", choices=["constant", "hash"], default="constant")
    parser.add_argument(
        "--reverse-every",
        type=int,
        default=0,
        metavar="K",
        help="buffer K requests and answer them in reverse order",
    )
    parser.add_argument(
        "--break-protocol",
        choices=["none", "range", "wrong-id", "die"],
        default="none",
        help="deliberately misbehave (for hub error-path tests)",
    )
    args = parser.parse_args(argv)
    constant = args.p if args.p is not None else 0.5

    out = sys.stdout
    held: list[dict] = []

    def answer(req: dict):
        if args.break_protocol == "die":
            sys.exit(3)
        rid = req.get("id")
        if args.break_protocol == "wrong-id":
            rid = "not-" + str(rid)
        if args.break_protocol == "range":
            p = 1.5
        elif args.mode == "hash":
            p = text_probability(str(req.get("text", "")))
        else:
            p = constant
        out.write(json.dumps({"id": rid, "p": p}) + "\n")
        out.flush()

    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        try:
            req = json.loads(line)
        except json.JSONDecodeError:
            out.write(json.dumps({"error": "malformed request"}) + "\n")
            out.flush()
            continue
        if req.get("op") == "hello":
            out.write(json.dumps({"protocol": 1, "name": args.name}) + "\n")
            out.flush()
            continue
        if args.reverse_every > 1:
            held.append(req)
            if len(held) >= args.reverse_every:
                for r in reversed(held):
                    answer(r)
                held.clear()
        else:
            answer(req)
    for r in reversed(held):
        answer(r)
    return 0


if __name__ == "__main__":
    sys.exit(main())
