import pytest

from hybridsample import cli, experiment as ex
from hybridsample.seeds import replication_seeds

SMALL = dict(n_per_graph=60, m1=2, m2=3, m3=4, extra_pairs=40, runs=2, seed=5, budget="2%")


def small_cfg(**kw):
    merged = {**SMALL, **kw}
    return ex.ExperimentConfig(**merged)


def test_budget_resolution():
    assert ex.resolve_budget("2%", 20_000) == 400
    assert ex.resolve_budget("0.02", 20_000) == 400
    assert ex.resolve_budget("1500", 20_000) == 1500
    assert ex.resolve_budget(7, 100) == 7
    with pytest.raises(ValueError):
        ex.resolve_budget("0", 100)


def test_config_validation_errors():
    with pytest.raises(ValueError, match="unknown method"):
        ex.make_config({"method": "bogus"})
    with pytest.raises(ValueError, match="unknown config key"):
        ex.make_config({"nope": "1"})
    with pytest.raises(ValueError, match="boolean"):
        ex.make_config({"directed_target": "maybe"})


def test_config_file_parse_and_overrides(tmp_path):
    p = tmp_path / "exp.cfg"
    p.write_text("# demo\nmethod = SRW\nruns = 3\nseed = 9\nbudget = 5%\n")
    mapping = ex.parse_config_file(p)
    cfg = ex.make_config(mapping, {"runs": "7"})
    assert cfg.method == "SRW" and cfg.runs == 7 and cfg.seed == 9


def test_replication_seeds_distinct():
    seeds = replication_seeds(3, 500)
    assert len(set(seeds)) == 500
    assert seeds == replication_seeds(3, 500)
    assert seeds != replication_seeds(4, 500)


def test_run_experiment_srw_structure():
    cfg = small_cfg(method="SRW")
    table = ex.run_experiment(cfg)
    prep = ex.prepare_experiment(cfg)
    populated = [l for l in prep.truth.labels() if prep.truth[l] > 0]
    assert [r.label for r in table.rows] == sorted(populated)
    for row in table.rows:
        assert row.runs == 2 and row.method == "SRW"
        assert row.budget == ex.resolve_budget("2%", prep.hybrid.target.n)


@pytest.mark.parametrize("method", ["VS-A", "RWT-VSA", "RWT-RWA", "RRZI-VSA"])
def test_run_experiment_all_methods_execute(method):
    cfg = small_cfg(method=method, alpha=1.0, beta=1.0)
    table = ex.run_experiment(cfg)
    assert table.rows
    assert all(r.nrmse >= 0 for r in table.rows)


def test_run_experiment_deterministic_csv(tmp_path):
    cfg = small_cfg(method="RWT-VSA", alpha=2.0)
    a = ex.format_result_csv(ex.run_experiment(cfg))
    b = ex.format_result_csv(ex.run_experiment(cfg))
    assert a == b


def test_run_experiment_workers_match_serial():
    cfg1 = small_cfg(method="RWT-RWA", runs=4)
    cfg3 = small_cfg(method="RWT-RWA", runs=4, workers=3)
    assert ex.format_result_csv(ex.run_experiment(cfg1)) == ex.format_result_csv(
        ex.run_experiment(cfg3)
    )


def test_directed_target_labels():
    cfg = small_cfg(method="SRW", directed_target=True, label="in-degree")
    table = ex.run_experiment(cfg)
    assert table.rows
    with pytest.raises(ValueError, match="in/out-degree"):
        ex.run_experiment(small_cfg(method="SRW", directed_target=True, label="degree"))


def test_result_csv_roundtrip(tmp_path):
    table = ex.run_experiment(small_cfg(method="SRW"))
    path = tmp_path / "res.csv"
    ex.write_result_csv(table, path)
    back = ex.read_result_csv(path)
    assert back.label_axis() == table.label_axis()
    assert [r.nrmse for r in back.rows] == [r.nrmse for r in table.rows]


def test_emit_figure_data(tmp_path):
    tables = [ex.run_experiment(small_cfg(method="SRW", budget=b)) for b in ("2%", "5%", "10%")]
    out = tmp_path / "fig2.csv"
    ex.emit_figure_data("fig2-convergence", tables, out)
    lines = out.read_text().splitlines()
    assert lines[0] == "method,param,label,value"
    per_label = {}
    for line in lines[1:]:
        method, param, label, value = line.split(",")
        per_label.setdefault(label, []).append(param)
    assert all(len(v) == 3 for v in per_label.values())
    # round trip: emitted values sum to the source tables' column sums
    total = sum(float(l.split(",")[3]) for l in lines[1:])
    expect = sum(r.mean_estimate for t in tables for r in t.rows)
    assert total == pytest.approx(expect, rel=1e-12)


def test_emit_figure_data_errors(tmp_path):
    with pytest.raises(ValueError, match="empty sweep"):
        ex.emit_figure_data("fig3-nrmse", [], tmp_path / "x.csv")
    with pytest.raises(ValueError, match="unknown figure kind"):
        ex.emit_figure_data("fig9", [ex.ResultTable([])], tmp_path / "x.csv")
    a = ex.run_experiment(small_cfg(method="SRW"))
    b = ex.run_experiment(small_cfg(method="SRW", seed=77))  # different network
    if a.label_axis() != b.label_axis():
        with pytest.raises(ValueError, match="mismatched label axes"):
            ex.emit_figure_data("fig3-nrmse", [a, b], tmp_path / "x.csv")


def test_raw_and_trace_outputs(tmp_path):
    raw = tmp_path / "raw.csv"
    trace = tmp_path / "trace.csv"
    cfg = small_cfg(method="RWT-VSA", raw_out=str(raw), trace_out=str(trace))
    ex.run_experiment(cfg)
    raw_lines = raw.read_text().splitlines()
    assert raw_lines[0] == "method,label,theta_hat,theta_true,budget,seed"
    assert len(raw_lines) > 2
    assert trace.read_text().startswith("step,node,weight,jumped")


# ------------------------------------------------------------------- CLI


def _write_cfg(tmp_path, **extra):
    lines = [f"{k} = {v}" for k, v in {**SMALL, **extra}.items()]
    p = tmp_path / "exp.cfg"
    p.write_text("\n".join(lines) + "\n")
    return p


def test_cli_truth_and_run(tmp_path, capsys):
    cfgp = _write_cfg(tmp_path, method="SRW")
    assert cli.main(["truth", "--config", str(cfgp)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("label,theta")
    res = tmp_path / "res.csv"
    assert cli.main(["run", "--config", str(cfgp), "-o", str(res)]) == 0
    assert res.read_text().startswith(",".join(ex.RESULT_COLUMNS))


def test_cli_run_twice_byte_identical(tmp_path):
    cfgp = _write_cfg(tmp_path, method="VS-A")
    r1, r2 = tmp_path / "r1.csv", tmp_path / "r2.csv"
    assert cli.main(["run", "--config", str(cfgp), "-o", str(r1)]) == 0
    assert cli.main(["run", "--config", str(cfgp), "-o", str(r2)]) == 0
    assert r1.read_bytes() == r2.read_bytes()


def test_cli_generate_then_run_from_files(tmp_path):
    cfgp = _write_cfg(tmp_path)
    net = tmp_path / "net"
    assert cli.main(["generate", "--config", str(cfgp), "--out-dir", str(net)]) == 0
    for name in ("target.txt", "auxiliary.txt", "affiliation.txt", "venues.txt"):
        assert (net / name).exists()
    res = tmp_path / "res.csv"
    code = cli.main([
        "run",
        "--config", str(cfgp),
        "--set", "source=files",
        "--set", f"target_path={net/'target.txt'}",
        "--set", f"auxiliary_path={net/'auxiliary.txt'}",
        "--set", f"affiliation_path={net/'affiliation.txt'}",
        "--set", f"venues_path={net/'venues.txt'}",
        "--set", "method=RRZI-VSA",
        "--set", "budget=20",
        "-o", str(res),
    ])
    assert code == 0
    assert res.read_text().count("RRZI-VSA") > 0


def test_cli_figdata(tmp_path):
    cfgp = _write_cfg(tmp_path, method="SRW")
    r1, r2 = tmp_path / "r1.csv", tmp_path / "r2.csv"
    cli.main(["run", "--config", str(cfgp), "-o", str(r1)])
    cli.main(["run", "--config", str(cfgp), "--set", "alpha=9", "-o", str(r2)])
    out = tmp_path / "fig3.csv"
    code = cli.main(["figdata", "--kind", "fig3-nrmse", str(r1), str(r2), "-o", str(out)])
    assert code == 0
    assert out.read_text().startswith("method,param,label,value")


def test_cli_exit_codes(tmp_path, capsys):
    badcfg = tmp_path / "bad.cfg"
    badcfg.write_text("method = WRONG\n")
    assert cli.main(["run", "--config", str(badcfg)]) == 1
    assert "config error" in capsys.readouterr().err
    # lbsn source without paths is a config error too
    assert cli.main(["run", "--set", "source=lbsn"]) == 1


def test_cli_runtime_error_exit_code(tmp_path, capsys):
    # coincident venues above the truncation limit make every zoom-in draw
    # fail at run time, which must surface as exit code 2 with the seed named
    (tmp_path / "target.txt").write_text("a b\nb c\n")
    (tmp_path / "aux.txt").write_text("x y\ny z\n")
    (tmp_path / "aff.txt").write_text("a x\nb y\nc z\n")
    (tmp_path / "venues.txt").write_text("0 40.5 -74.0\n1 40.5 -74.0\n2 40.5 -74.0\n")
    code = cli.main([
        "run",
        "--set", "source=files",
        "--set", f"target_path={tmp_path/'target.txt'}",
        "--set", f"auxiliary_path={tmp_path/'aux.txt'}",
        "--set", f"affiliation_path={tmp_path/'aff.txt'}",
        "--set", f"venues_path={tmp_path/'venues.txt'}",
        "--set", "method=RRZI-VSA",
        "--set", "rrzi_k=2",
        "--set", "budget=5",
        "--set", "runs=2",
    ])
    assert code == 2
    err = capsys.readouterr().err
    assert "runtime error" in err and "seed" in err


def test_cli_lbsn_source(tmp_path, capsys):
    (tmp_path / "social.txt").write_text("a b\nb c\na c\n")
    rows = [
        "a\tts\t40.7\t-74.0\tv1",
        "b\tts\t40.8\t-74.1\tv1",
        "c\tts\t40.9\t-73.9\tv2",
        "c\tts\t45.0\t-73.9\tv3",   # outside the box, dropped
    ]
    (tmp_path / "checkins.tsv").write_text("\n".join(rows) + "\n")
    res = tmp_path / "res.csv"
    code = cli.main([
        "run",
        "--set", "source=lbsn",
        "--set", f"social_path={tmp_path/'social.txt'}",
        "--set", f"checkins_path={tmp_path/'checkins.tsv'}",
        "--set", "bbox=nyc",
        "--set", "method=VS-A",
        "--set", "budget=10",
        "--set", "runs=3",
        "--set", "seed=2",
        "-o", str(res),
    ])
    assert code == 0
    text = res.read_text()
    assert text.count("VS-A") == 1  # one populated degree label (triangle)
