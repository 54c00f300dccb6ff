"""Command-line front end.

Job files are JSON.  Rationals are written as strings such as ``"-3/2"``;
integers may also be plain JSON numbers.  Two kinds are accepted::

    {"kind": "action_datum", "form": [["1"]], "betas": [[1], [1], [-1], [-1]],
     "options": {"subset": ["1:4"], "c": {"1:4": "1"}, "level_cap": 64, "oracle_box": 8}}

    {"kind": "cartan", "gcm": [[2, -1], [-1, 2]], "symmetrizer": [1, 1], "word": [1, 2, 1],
     "options": {"c": {"1": "-2"}}}

``betas`` lists the characters, one per coordinate.  Parameters ``c`` are keyed
by border pair ``"j:k"``; a bare ``"j"`` names the weight whose border starts at j.

Exit codes: 0 success, 1 a requested check failed, 2 invalid input,
3 search cap reached, 4 internal consistency failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .actiondata import ActionDatum, analyze, predicates
from .cartan import CartanJob, bott_samelson_c, build_datum, cartan_weights, check_cgl
from .deform import Deformation, Schedule, deform, t_pfaffian
from .errors import CapExceeded, TPoissonError, ValidationError
from .linalg import RatMatrix
from .logcan import (SmoothingDiagram, brute_force_smoothable, check_w1, check_w2, is_linearly_independent,
                     is_t_log_symplectic, log_canonical_bivector, smoothable_weights)
from .multivec import from_records, render, to_records

EXIT_OK, EXIT_CHECK, EXIT_INVALID, EXIT_CAP, EXIT_INTERNAL = 0, 1, 2, 3, 4


@dataclass(frozen=True)
class Job:
    kind: str
    datum: ActionDatum
    cartan: CartanJob | None
    subset: tuple | None  # border pairs, in the order given
    c: dict | None  # "j:k" or "j" -> Fraction
    level_cap: int = 64
    oracle_box: int = 8

    @property
    def n(self) -> int:
        return self.datum.n


def _rat(value, where: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise ValidationError(f"{where}: expected an integer or a \"p/q\" string, got {value!r}")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"{where}: bad rational {value!r}") from exc


def _int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(f"{where}: expected an integer, got {value!r}")
    return value


def _matrix(rows, where: str, convert) -> list:
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise ValidationError(f"{where}: expected a list of lists")
    return [[convert(x, f"{where}[{i}][{j}]") for j, x in enumerate(r)] for i, r in enumerate(rows)]


def parse_border(text: str) -> tuple:
    try:
        j, k = (int(x) for x in text.split(":"))
    except ValueError as exc:
        raise ValidationError(f"bad border {text!r}; expected j:k") from exc
    if not 1 <= j < k:
        raise ValidationError(f"bad border {text!r}; need 1 <= j < k")
    return j, k


def parse_job(doc: dict) -> Job:
    if not isinstance(doc, dict):
        raise ValidationError("job file must hold a JSON object")
    kind = doc.get("kind")
    options = doc.get("options", {})
    unknown = set(options) - {"subset", "c", "level_cap", "oracle_box"}
    if unknown:
        raise ValidationError(f"options: unknown keys {sorted(unknown)}")
    if kind == "action_datum":
        form = _matrix(doc.get("form"), "form", _rat)
        betas = _matrix(doc.get("betas"), "betas", _int)
        r = len(form)
        if any(len(row) != r for row in form):
            raise ValidationError("form: must be square")
        for j, b in enumerate(betas):
            if len(b) != r:
                raise ValidationError(f"betas[{j}]: expected {r} entries")
        datum = ActionDatum(RatMatrix.from_rows(form, r), RatMatrix.from_columns(betas, r))
        cartan = None
    elif kind == "cartan":
        gcm = _matrix(doc.get("gcm"), "gcm", _int)
        word = [_int(x, f"word[{i}]") for i, x in enumerate(doc.get("word") or [])]
        d = doc.get("symmetrizer")
        if d is not None:
            d = [_int(x, f"symmetrizer[{i}]") for i, x in enumerate(d)]
        cartan = CartanJob.create(gcm, word, d)
        datum = build_datum(cartan)
    else:
        raise ValidationError(f"kind: expected 'action_datum' or 'cartan', got {kind!r}")
    subset = options.get("subset")
    if subset is not None:
        subset = tuple(parse_border(s) for s in subset)
    c = options.get("c")
    if c is not None:
        c = {str(k): _rat(v, f"options.c[{k!r}]") for k, v in c.items()}
    return Job(kind, datum, cartan, subset, c,
               _int(options.get("level_cap", 64), "options.level_cap"),
               _int(options.get("oracle_box", 8), "options.oracle_box"))


def _border_text(b) -> str:
    return f"{b[0]}:{b[1]}"


def job_to_dict(job: Job) -> dict:
    """Canonical JSON form of a job."""
    options: dict = {"level_cap": job.level_cap, "oracle_box": job.oracle_box}
    if job.subset is not None:
        options["subset"] = [_border_text(b) for b in sorted(job.subset)]
    if job.c is not None:
        options["c"] = {k: str(v) for k, v in job.c.items()}
    if job.kind == "cartan":
        cj = job.cartan
        return {"kind": "cartan", "gcm": [list(r) for r in cj.A.entries], "symmetrizer": list(cj.d),
                "word": list(cj.word), "options": options}
    return {"kind": "action_datum",
            "form": [[str(x) for x in row] for row in job.datum.form.to_rows()],
            "betas": [[int(x) for x in b] for b in job.datum.betas.columns()],
            "options": options}


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def load_job(path: str | Path) -> Job:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return parse_job(doc)


def all_weights(job: Job) -> list:
    if job.kind == "cartan":
        return cartan_weights(job.cartan)[1]
    return smoothable_weights(job.datum.structure())


def resolve(job: Job):
    """The chosen weights (in the order requested) and their parameters by border."""
    full = all_weights(job)
    by_border = {s.border: s for s in full}
    if job.subset is None:
        S = list(full)
    else:
        bad = [b for b in job.subset if b not in by_border]
        if bad:
            raise ValidationError(f"subset: borders {[_border_text(b) for b in bad]} are not smoothable")
        S = [by_border[b] for b in job.subset]
    if job.c is None:
        if job.kind == "cartan":
            preset = bott_samelson_c(job.cartan)
            params = {s.border: preset[s.border[0]] for s in S}
        else:
            params = {s.border: Fraction(1) for s in S}
    else:
        params = {}
        for key, v in job.c.items():
            if ":" in key:
                border = parse_border(key)
            else:
                starts = [s.border for s in full if str(s.border[0]) == key.strip()]
                if len(starts) != 1:
                    raise ValidationError(f"c: position {key!r} does not name a single smoothable weight")
                border = starts[0]
            params[border] = v
        chosen = {s.border for s in S}
        extra = set(params) - chosen
        if extra:
            raise ValidationError(f"c: borders {sorted(map(_border_text, extra))} are not in the subset")
        missing = chosen - set(params)
        if missing:
            raise ValidationError(f"c: no value for borders {sorted(map(_border_text, missing))}")
    return full, S, params


def _weight_record(s) -> dict:
    return {"border": list(s.border), "theta": list(s.theta), "a": str(s.scale_a)}


def run_deform(job: Job, schedule: Schedule | None = None) -> tuple[dict, Deformation]:
    full, S, params = resolve(job)
    d = deform(job.datum.structure(), S, params, job.level_cap, schedule)
    return _deform_doc(job, full, d), d


def _deform_doc(job: Job, full, d: Deformation) -> dict:
    jacobi = True  # deform raises otherwise
    cgl = check_cgl(job.datum, d.total)
    return {
        "input_echo": job_to_dict(job),
        "s_pi0": [_weight_record(s) for s in full],
        "deformation": {
            "subset": [list(b) for b in sorted(s.border for s in d.subset_S)],
            "c": {_border_text(s.border): str(v) for s, v in sorted(d.c.items(), key=lambda kv: kv[0].border)},
            "orders": [to_records(p) for p in d.orders],
            "total": to_records(d.total),
            "total_text": render(d.total),
        },
        "checks": {"jacobi": jacobi, "cgl": cgl.passes},
    }


def run_analyze(job: Job) -> dict:
    L = job.datum.structure()
    tls = is_t_log_symplectic(L)
    full = smoothable_weights(L) if tls else []
    diagram = SmoothingDiagram(job.n, tuple(full))
    independent = is_linearly_independent(full)
    w1 = w2 = None
    if independent:
        try:
            w1 = check_w1(full, job.level_cap)
            w2 = check_w2(full, job.level_cap)
        except CapExceeded:
            pass
    preds = predicates(analyze(job.datum))
    # weights with an entry above the box are invisible to the brute-force search
    visible = sorted(s.theta for s in full if max(s.theta) <= job.oracle_box)
    oracle_agrees = brute_force_smoothable(L, job.oracle_box) == visible
    return {
        "input_echo": job_to_dict(job),
        "s_pi0": [_weight_record(s) for s in full],
        "deformation": None,
        "checks": {
            "n": job.n,
            "lambda": [[str(x) for x in row] for row in L.lam.to_rows()],
            "t_log_symplectic": tls,
            "diagram": [{"edge": list(s.border), "arcs": {str(i): m for i, m in sorted(s.arcs().items())}}
                        for s in diagram.edges],
            "independent": independent,
            "w1": w1,
            "w2": w2,
            "distinguished": preds.distinguished,
            "integral": preds.integral,
            "strongly_integral": preds.strongly_integral,
            "oracle_agrees": oracle_agrees,
        },
    }


def run_pfaffian(job: Job) -> dict:
    doc, d = run_deform(job)
    L = job.datum.structure()
    doc["checks"]["pfaffian"] = render(t_pfaffian(L, d.total))
    doc["checks"]["pfaffian_base"] = render(t_pfaffian(L, log_canonical_bivector(L)))
    return doc


def run_check_cgl(job: Job) -> dict:
    doc, d = run_deform(job)
    report = check_cgl(job.datum, d.total)
    doc["checks"]["cgl_failures"] = [{"condition": cid, "witness": [str(x) for x in w]}
                                     for cid, w in report.failures]
    doc["checks"]["h_vectors"] = [[str(x) for x in h] for h in report.h_vectors]
    return doc


def _fmt(value) -> str:
    if value is None:
        return "inconclusive"
    if isinstance(value, bool):
        return "PASS" if value else "FAIL"
    return str(value)


def render_text(command: str, doc: dict) -> str:
    lines = []
    ch = doc["checks"]
    if command == "analyze":
        lines.append(f"n = {ch['n']}")
        lines.append("lambda = " + json.dumps(ch["lambda"]))
        lines.append(f"T-log-symplectic: {_fmt(ch['t_log_symplectic'])}")
    lines.append(f"smoothable weights: {len(doc['s_pi0'])}")
    for s in doc["s_pi0"]:
        lines.append(f"  {s['border'][0]}:{s['border'][1]}  theta = {tuple(s['theta'])}  a = {s['a']}")
    if command == "analyze":
        for e in ch["diagram"]:
            arcs = " ".join(f"arcs@{i}={m}" for i, m in e["arcs"].items())
            lines.append(f"  edge {e['edge'][0]} -- {e['edge'][1]}" + (f"  {arcs}" if arcs else ""))
        for key in ("independent", "w1", "w2", "distinguished", "integral", "strongly_integral",
                    "oracle_agrees"):
            lines.append(f"{key}: {_fmt(ch[key])}")
        return "\n".join(lines) + "\n"
    dd = doc["deformation"]
    lines.append("subset: " + ", ".join(f"{j}:{k}" for j, k in dd["subset"]))
    lines.append("c: " + ", ".join(f"{b} = {v}" for b, v in dd["c"].items()))
    if command == "deform":
        n = doc_n(doc)
        for m, recs in enumerate(dd["orders"]):
            lines.append(f"order {m}: {render(from_records(n, 2, recs))}")
    lines.append(f"total: {dd['total_text']}")
    lines.append(f"jacobi: {_fmt(ch['jacobi'])}")
    if command == "pfaffian":
        lines.append(f"pfaffian: {ch['pfaffian']}")
        lines.append(f"pfaffian of base: {ch['pfaffian_base']}")
    if command == "check-cgl":
        lines.append(f"cgl: {_fmt(ch['cgl'])}")
        for f in ch["cgl_failures"]:
            lines.append(f"  condition {f['condition']}: {', '.join(f['witness'])}")
    return "\n".join(lines) + "\n"


def doc_n(doc: dict) -> int:
    echo = doc["input_echo"]
    return len(echo["word"]) if echo["kind"] == "cartan" else len(echo["betas"])


def apply_overrides(job: Job, args) -> Job:
    changes: dict = {}
    if args.subset is not None:
        changes["subset"] = tuple(parse_border(s) for s in args.subset.split(",") if s.strip())
    if args.c:
        c = dict(job.c or {})
        for item in args.c:
            if "=" not in item:
                raise ValidationError(f"--c {item!r}: expected name=p/q")
            name, value = item.split("=", 1)
            c[name.strip()] = _rat(value.strip(), f"--c {name}")
        changes["c"] = c
    if args.level_cap is not None:
        changes["level_cap"] = args.level_cap
    if args.oracle_box is not None:
        changes["oracle_box"] = args.oracle_box
    return replace(job, **changes) if changes else job


def run_one(command: str, path: str, args) -> tuple[int, str]:
    try:
        job = apply_overrides(load_job(path), args)
        if command == "export-dot":
            L = job.datum.structure()
            return EXIT_OK, SmoothingDiagram(job.n, tuple(smoothable_weights(L))).to_dot()
        runner = {"analyze": run_analyze, "deform": lambda j: run_deform(j)[0],
                  "pfaffian": run_pfaffian, "check-cgl": run_check_cgl}[command]
        doc = runner(job)
        out = dumps(doc) if args.format == "json" else render_text(command, doc)
        status = EXIT_OK
        if command == "check-cgl" and not doc["checks"]["cgl"]:
            status = EXIT_CHECK
        return status, out
    except CapExceeded as exc:
        return EXIT_CAP, f"error: {exc}\n"
    except (ValidationError, OSError) as exc:
        return EXIT_INVALID, f"error: {exc}\n"
    except TPoissonError as exc:
        return EXIT_INTERNAL, f"internal error: {exc}\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tpoisson", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("analyze", "deform", "pfaffian", "check-cgl", "export-dot"):
        p = sub.add_parser(name)
        p.add_argument("--input", action="append", required=True, help="job file (repeatable)")
        p.add_argument("--subset", help="comma-separated borders j:k")
        p.add_argument("--c", action="append", help="parameter name=p/q (repeatable)")
        p.add_argument("--level-cap", type=int)
        p.add_argument("--oracle-box", type=int)
        p.add_argument("--output", help="output file, or directory when several inputs are given")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--jobs", type=int, default=1, help="worker threads for several inputs")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    inputs = args.input
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        results = list(pool.map(lambda p: run_one(args.command, p, args), inputs))
    suffix = ".dot" if args.command == "export-dot" else (".json" if args.format == "json" else ".txt")
    for path, (status, out) in zip(inputs, results):
        stream = sys.stderr if status not in (EXIT_OK, EXIT_CHECK) else None
        if stream is None and args.output:
            target = Path(args.output)
            if len(inputs) > 1:
                target.mkdir(parents=True, exist_ok=True)
                target = target / (Path(path).stem + suffix)
            target.write_text(out)
        else:
            (stream or sys.stdout).write(out)
    return max(status for status, _ in results)


if __name__ == "__main__":
    sys.exit(main())
