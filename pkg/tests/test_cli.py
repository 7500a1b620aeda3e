import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from markovcats.cli import bundled_script, bundled_scripts, main
from markovcats.cli.montecarlo import (
    InvalidConfig,
    MonteCarloConfig,
    simulate_hs_negative_control,
    simulate_kolmogorov_demo,
)
from markovcats.cli.report import emit_report
from markovcats.cli.runner import run_checks
from markovcats.cli.script import (
    CheckDirective,
    Script,
    ScriptError,
    ScriptUnboundGenerator,
    emit_script,
    parse_script,
)
from markovcats.kernel import CheckReport, UnboundGenerator
from markovcats.kernel.diagram import Copy, Discard, Gen, Id, Par, Seq, Swap

HEADER = """\
instance finstoch
object X = ["a", "b"]
object Y = ["x", "y"]
morphism f = {"dom": "X", "cod": "Y", "rows": [["1/3", "2/3"], ["1", "0"]]}
morphism g = {"dom": "Y", "cod": "X", "rows": [["1", "0"], ["0", "1"]]}
"""


# parsing

def test_empty_script():
    assert parse_script("") == Script(())
    assert parse_script("# only a comment\n\n").statements == ()
    reports, code = run_checks(parse_script(""))
    assert reports == [] and code == 0


def test_unbound_generator_location():
    with pytest.raises(ScriptUnboundGenerator) as info:
        parse_script(HEADER + "check equal f, seq(f, hh)\n")
    err = info.value
    assert isinstance(err, UnboundGenerator)
    assert err.name == "hh" and err.line == 6 and err.column == 23


def test_syntax_errors_carry_positions():
    for text in ("check bogus f\n", "instance finstoch\nobject X = [\"a\"\n", "let = f\n",
                 "instance finstoch\nobject id = [\"a\"]\n"):
        with pytest.raises(ScriptError) as info:
            parse_script(text)
        assert info.value.line >= 1 and info.value.column >= 1


def test_parse_directives():
    s = parse_script(HEADER + "let h = seq(f, g)\ncheck not deterministic h\ncheck ci seq(copy(X), par(f, g)) over Y, X\n"
                              "check cring_noncausality 6\n")
    c1, c2, c3 = s.checks
    assert c1 == CheckDirective("deterministic", (Gen("h"),), negate=True)
    assert c2.over == (("Y",), ("X",))
    assert c2.args[0] == Seq(Copy(("X",)), Par(Gen("f"), Gen("g")))
    assert c3.args == (6,)


OBJS = st.sampled_from([(), ("X",), ("Y",), ("X", "Y")])


def _terms(names):
    leaves = st.one_of(
        st.sampled_from([Gen(n) for n in names]),
        OBJS.map(Id), OBJS.map(Copy), OBJS.map(Discard),
        st.builds(Swap, OBJS, OBJS),
    )
    return st.recursive(leaves, lambda t: st.one_of(st.builds(Seq, t, t), st.builds(Par, t, t)), max_leaves=6)


@st.composite
def scripts(draw):
    names = ["f", "g"]
    lines = []
    for i in range(draw(st.integers(0, 3))):
        lines.append(f"let t{i} = {_emit(draw(_terms(names)))}")
        names.append(f"t{i}")
    for _ in range(draw(st.integers(0, 4))):
        kind = draw(st.sampled_from(["equal", "deterministic", "ci", "as_equal", "comonoid", "witness"]))
        neg = "not " if draw(st.booleans()) else ""
        t = lambda: _emit(draw(_terms(names)))  # noqa: E731
        if kind == "equal":
            lines.append(f"check {neg}equal {t()}, {t()}")
        elif kind == "as_equal":
            lines.append(f"check {neg}as_equal {t()}, {t()}, {t()}")
        elif kind == "comonoid":
            lines.append(f"check comonoid {draw(st.sampled_from(['I', 'X', 'X*Y']))}")
        elif kind == "witness":
            lines.append(f"check setmulti_witness {draw(st.integers(1, 5))}")
        elif kind == "ci":
            lines.append(f"check {neg}ci {t()} over X, Y")
        else:
            lines.append(f"check {neg}{kind} {t()}")
    return HEADER + "\n".join(lines) + "\n"


def _emit(term):
    from markovcats.cli.script import emit_term
    return emit_term(term)


@settings(max_examples=80, deadline=None)
@given(scripts())
def test_emit_parse_round_trip(text):
    ast = parse_script(text)
    again = parse_script(emit_script(ast))
    assert again == ast
    assert emit_script(again) == emit_script(ast)


# running

@pytest.mark.parametrize("name", bundled_scripts())
def test_bundled_scripts_pass(name):
    reports, code = run_checks(parse_script(bundled_script(name)))
    assert code == 0, [r.detail for r in reports if not r.passed]
    assert reports


def test_parallel_run_matches_sequential():
    script = parse_script(bundled_script("axioms"))
    seq, _ = run_checks(script)
    par, _ = run_checks(script, parallel=True)
    assert emit_report(seq) == emit_report(par)


def test_corrupted_row_exits_one(tmp_path, capsys):
    bad = HEADER.replace('[["1/3", "2/3"]', '[["1/3", "1/3"]') + "check deterministic g\n"
    path = tmp_path / "bad.mc"
    path.write_text(bad)
    out = tmp_path / "bad.json"
    assert main(["check", str(path), "-o", str(out)]) == 1
    doc = json.loads(out.read_text())
    assert not doc["passed"]
    failed = [c for c in doc["cases"] if not c["passed"]]
    assert failed[0]["name"] == "load morphism f" and failed[0]["witness"]["line"] == 4


def test_unbound_generator_at_runtime_is_a_failed_report():
    text = HEADER.replace("morphism g", "object Z = 5\nmorphism g").replace('"cod": "X"', '"cod": "Z"')
    reports, code = run_checks(parse_script(text + "check deterministic g\n"))
    assert code == 1
    assert [r.name for r in reports if not r.passed][:2] == ["load object Z", "load morphism g"]


def test_parse_error_exits_two(tmp_path, capsys):
    path = tmp_path / "broken.mc"
    path.write_text("instance finstoch\ncheck equal nothing, nothing\n")
    assert main(["check", str(path)]) == 2
    assert "line 2" in capsys.readouterr().err


def test_negated_check_flips_verdict():
    reports, code = run_checks(parse_script(HEADER + "check not deterministic f\ncheck not deterministic g\n"))
    assert [r.passed for r in reports] == [True, False]
    assert code == 1
    assert reports[1].witness["expected"] == "failure"


def test_cring_directive_report():
    reports, code = run_checks(parse_script("check cring_noncausality 8\n"))
    assert code == 0
    r = reports[0]
    assert r.hypothesis is True and r.conclusion is False
    assert r.name == "check cring_noncausality 8"


# reports

def test_empty_report():
    doc = json.loads(emit_report([]))
    assert doc["cases"] == [] and doc["passed"] is True
    assert doc["versions"]["schema"] == 1 and "config" not in doc


def test_failing_case_has_witness():
    doc = json.loads(emit_report([CheckReport("x", False, "bad", witness={"F": [0, 1]}),
                                  CheckReport("y", True, "ok")], "demo", 3, {"depth": Fraction(1, 2)}))
    assert doc["passed"] is False and doc["seed"] == 3
    assert doc["cases"][0]["witness"] == {"F": [0, 1]}
    assert doc["config"] == {"depth": "1/2"}


def test_list_and_usage(capsys):
    assert main(["check", "--list"]) == 0
    assert "axioms" in capsys.readouterr().out
    assert main(["check"]) == 2
    with pytest.raises(SystemExit) as info:
        main(["demo-kolmogorov", "--theta", "abc"])
    assert info.value.code == 2


def test_witness_command(capsys):
    assert main(["witness-setmulti", "--n", "1", "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["passed"] and len(doc["cases"]) == 1


def test_small_suite_through_cli(capsys):
    assert main(["check", "--suite", "aseq", "--count", "50", "--seed", "2"]) == 0
    assert "passed" in capsys.readouterr().out


# Monte Carlo

def _cfg(**kw):
    base = dict(biases=(Fraction(1, 2),), theta=Fraction(3, 5), N=500, samples=400, seed=1)
    base.update(kw)
    return MonteCarloConfig(**base)


def test_certain_coin():
    res = simulate_kolmogorov_demo(_cfg(biases=(1,), theta=Fraction(1, 2)))
    assert res.probability == 1.0 and res.oracle["limit"] == 1
    assert simulate_kolmogorov_demo(_cfg(biases=(0,))).probability == 0.0


def test_degenerate_mixture_is_plain_iid():
    cfg = _cfg(biases=(Fraction(7, 10), Fraction(3, 10)), weights=(1, 0), theta=Fraction(1, 2))
    res = simulate_hs_negative_control(cfg)
    assert res.oracle["limit"] == "1" and res.probability > 0.99


def test_mixture_of_equal_biases_has_no_limit_claim_at_theta():
    cfg = _cfg(biases=(Fraction(1, 2), Fraction(1, 2)), theta=Fraction(1, 2))
    assert simulate_hs_negative_control(cfg).oracle["limit"] is None
    cfg = _cfg(biases=(Fraction(1, 2), Fraction(1, 2)), theta=Fraction(3, 5))
    assert simulate_hs_negative_control(cfg).oracle["limit"] == "0"


@pytest.mark.parametrize("kw", [dict(biases=()), dict(theta=Fraction(3, 2)), dict(N=0), dict(shards=0),
                                dict(weights=(Fraction(1, 2),), biases=(0, 1)), dict(sampler="exact")])
def test_invalid_config(kw):
    with pytest.raises(InvalidConfig):
        _cfg(**kw)


def test_demo_kolmogorov_rejects_mixture():
    with pytest.raises(InvalidConfig):
        simulate_kolmogorov_demo(_cfg(biases=(0, 1)))


def test_flip_sampler_agrees_with_binomial():
    for theta, q in ((Fraction(1, 2), Fraction(1, 2)), (Fraction(11, 20), Fraction(1, 2))):
        a = simulate_kolmogorov_demo(_cfg(theta=theta, biases=(q,), N=200, samples=2000))
        b = simulate_kolmogorov_demo(_cfg(theta=theta, biases=(q,), N=200, samples=2000, sampler="flips"))
        assert abs(a.probability - b.probability) < 0.06


def test_shard_and_thread_determinism():
    cfg = _cfg(shards=3, samples=1001, biases=(Fraction(3, 10), Fraction(7, 10)), theta=Fraction(1, 2))
    a = simulate_hs_negative_control(cfg)
    b = simulate_hs_negative_control(cfg, parallel=True)
    assert a.to_dict() == b.to_dict()
    assert sum(a.per_shard) == a.positives and len(a.per_shard) == 3


# demos

DEMOS = __import__("pathlib").Path(__file__).resolve().parents[1] / "demos"


@pytest.mark.parametrize("name", sorted(p.name for p in DEMOS.glob("*.py")))
def test_demo_runs(name, capsys):
    import runpy
    runpy.run_path(str(DEMOS / name), run_name="__main__")
    assert capsys.readouterr().out


def test_demo_script_passes():
    assert main(["check", str(DEMOS / "check_script.mc")]) == 0
