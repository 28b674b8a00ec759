"""Runs every corpus program under CPython and writes data/programs.jsonl."""
import contextlib, io, json, pathlib
from programs import PROGRAMS

def run(code, entry, args):
    ns = {}
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        exec(code, ns)
        ret = ns[entry](*json.loads(json.dumps(args)))
    return repr(ret), buf.getvalue()

out = pathlib.Path(__file__).resolve().parent.parent / "programs.jsonl"
with out.open("w") as f:
    for p in PROGRAMS:
        cases = []
        for args in p["inputs"]:
            ret, printed = run(p["code"], p["entry"], args)
            cases.append({"args": args, "return": ret, "output": printed})
        f.write(json.dumps({"name": p["name"], "entry": p["entry"], "code": p["code"], "cases": cases}) + "\n")
print(len(PROGRAMS), "programs")
