import io
import json

import pytest

from commons_lab.cli import run
from commons_lab.commonness import Certificate, DensityProfile, verify_certificate
from commons_lab.graphs import complete_graph, cycle_graph


def call(*argv):
    buf = io.StringIO()
    code = run(list(argv), stdout=buf)
    return code, buf.getvalue()


def raw(*argv):
    code, out = call(*argv, "--raw")
    assert code == 0, out
    return json.loads(out)


def test_compute_density_of_c4_in_g1(tmp_path):
    assert raw("compute", "t", "--pattern", "c4", "--target", "g1")["value"] == "1/4"
    g1 = tmp_path / "g1.json"
    g1.write_text(call("build", "g1", "--raw")[1])
    assert raw("compute", "t", "--pattern", "c4", "--target", str(g1))["value"] == "1/4"
    # a full report is accepted wherever a graph file is expected
    full = tmp_path / "g1-report.json"
    full.write_text(call("build", "g1")[1])
    assert raw("compute", "t", "--pattern", "k4", "--target", str(full))["value"] == "-1/2"


def test_report_shape():
    code, out = call("compute", "hom", "--pattern", "k3", "--target", "k3")
    rep = json.loads(out)
    assert code == 0
    assert rep["schema"] == "commons-lab/report" and rep["version"] == 1
    assert rep["command"] == ["compute", "hom", "--pattern", "k3", "--target", "k3"]
    assert rep["outputs"]["hom"] == {"value": "6", "decimal": "6"}
    assert "duration_s" not in rep
    timed = json.loads(call("compute", "hom", "--pattern", "k3", "--target", "k3", "--timing")[1])
    assert timed["duration_s"] >= 0


def test_reproduce_single_checks():
    code, out = call("reproduce", "g1-density-sum", "--raw")
    assert code == 0
    assert json.loads(out)[0]["data"]["sum"] == "-1/4"
    assert raw("reproduce", "pentagon-triangle", "--k", "14") == "36"
    assert raw("reproduce", "pentagon-triangle", "--k", "24") == "-4"


def test_reproduce_failing_check_exits_4():
    code, _ = call("reproduce", "pentagon-triangle", "--raw")
    assert code == 4


def test_usage_errors_exit_1():
    assert call("frobnicate")[0] == 1
    assert call("compute", "t", "--pattern", "nonsense", "--target", "g1")[0] == 1
    assert call("compute", "t", "--pattern", "c4", "--target", "g1", "--set", "bogus=1")[0] == 1
    assert call("compute", "t", "--pattern", "c4", "--target", "g1", "--set", "node_cap")[0] == 1


def test_guard_exits_3():
    code, _ = call("compute", "hom", "--pattern", "k4", "--target", "g2:6", "--strategy", "brute",
                   "--set", "brute_guard=100")
    assert code == 3


def test_exhausted_search_exits_2(tmp_path):
    prof = tmp_path / "p.json"
    profile = DensityProfile.from_graphs({cycle_graph(4): "1/8", complete_graph(4): "-1/4"}, balanced=True)
    prof.write_text(json.dumps(profile.to_json_obj()))
    code, out = call("witness", "--profile", str(prof), "--eps", "1/100", "--m-max", "3", "--delta-steps", "3")
    assert code == 2
    cert = Certificate.from_json_obj(json.loads(out)["certificates"][0])
    assert cert.verdict == "search-exhausted"


def test_witness_from_g3_profile_reverifies():
    code, out = call("witness", "--g3-profile", "38")
    assert code == 0
    cert = Certificate.from_json_obj(json.loads(out)["certificates"][0])
    assert cert.verdict == "not-locally-common-for-perturbation"
    assert verify_certificate(cert)


def test_classify_and_verdict():
    assert raw("classify", "--pattern", "k4") == "certified-weakly-locally-common"
    assert raw("classify", "--pattern", "pentagon-triangle") == "unknown"
    assert raw("verdict", "--pattern", "c4", "--kernel", "const:0") == "all-zero"


def test_goodman_and_sidorenko():
    assert raw("goodman", "--kernel", "const:1/2") == "0"
    code, out = call("sidorenko", "--pattern", "k3", "--search", "3")
    assert code == 0
    assert json.loads(out)["certificates"][0]["verdict"] == "negative"


def test_kernel_roundtrip(tmp_path):
    k = tmp_path / "k.json"
    k.write_text(call("kernel", "build", "--parts", "3", "--seed", "2", "--balanced", "--raw")[1])
    op = raw("kernel", "op", "--kernel", str(k), "--op", "shrink", "--delta", "1/2")
    assert op["parts"] == 4


@pytest.mark.parametrize("argv", [
    ["compute", "spectrum", "--pattern", "pentagon-triangle"],
    ["build", "prop43", "--k", "3"],
    ["build", "hypergraph", "--source", "heawood"],
    ["witness", "--g3-profile", "38"],
    ["reproduce", "classifier"],
])
def test_reports_are_byte_identical(argv):
    assert call(*argv) == call(*argv)


def test_cache_flag_does_not_change_outputs():
    argv = ["compute", "spectrum", "--pattern", "k4"]
    with_cache = json.loads(call(*argv)[1])
    without = json.loads(call(*argv, "--no-cache")[1])
    assert with_cache["outputs"] == without["outputs"]
    first = call("verdict", "--pattern", "k4", "--kernel", "const:1/3")[1]
    again = json.loads(call("verdict", "--pattern", "k4", "--kernel", "const:1/3", "--no-cache")[1])
    assert json.loads(first)["certificates"] == again["certificates"]


def test_config_file(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"brute_guard": 10}))
    argv = ["compute", "hom", "--pattern", "k3", "--target", "g2:2", "--strategy", "brute", "--config", str(cfg)]
    assert call(*argv)[0] == 3
    # flags win over the file
    assert call(*argv, "--set", "brute_guard=1000000")[0] == 0
