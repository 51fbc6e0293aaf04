"""Line-delimited JSON serve loop over stdin/stdout.

One request per line, one result per line, strictly in order; malformed
input produces an in-band protocol_error object instead of a crash.
EOF terminates cleanly.
"""

from __future__ import annotations

import json
import sys

from cadrunner.sandbox import _result, execute


def serve(stdin=None, stdout=None) -> None:
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        try:
            request = json.loads(line)
        except json.JSONDecodeError as exc:
            response = _result("protocol_error",
                               stderr_tail=f"malformed JSON request: {exc}")
        else:
            if not isinstance(request, dict):
                response = _result("protocol_error",
                                   stderr_tail="request must be an object")
            else:
                try:
                    response = execute(request)
                except Exception as exc:  # never crash the loop
                    response = _result(
                        "protocol_error",
                        stderr_tail=f"{type(exc).__name__}: {exc}")
        stdout.write(json.dumps(response) + "\n")
        stdout.flush()


def main() -> int:
    serve()
    return 0


if __name__ == "__main__":
    sys.exit(main())
