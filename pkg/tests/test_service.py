import time

import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from molinverse.chem import parse_smiles
from molinverse.cli import main as cli
from molinverse.service import create_app, depict
from molinverse.service.depict import DepictError

CSV = (
    "smiles,bp\n"
    "CCO,78.4\nCCC,-42.0\nCO,64.7\nCC=O,20.2\n"
    "CCCO,97.0\nCNC,7.4\nC=O,-19.1\nCCN,16.6\n"
)


@pytest.fixture
def client(tmp_path):
    app = create_app(data_dir=str(tmp_path), max_jobs=2)
    with TestClient(app) as c:
        yield c
    app.state.queue.shutdown()


def upload(client, csv=CSV, name="demo"):
    r = client.post(
        "/workspaces", files={"file": ("demo.csv", csv)}, data={"name": name}
    )
    assert r.status_code == 201, r.text
    return r.json()


def wait_job(client, job_id, timeout=60.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        r = client.get(f"/jobs/{job_id}")
        assert r.status_code == 200
        d = r.json()
        if d["state"] in ("done", "failed"):
            return d
        time.sleep(0.05)
    raise AssertionError("job did not finish")


def run_sync(client, ws, parent, method, params):
    r = client.post(
        f"/workspaces/{ws}/nodes/{parent}/run",
        json={"method": method, "params": params},
    )
    assert r.status_code == 202, r.text
    d = wait_job(client, r.json()["job"])
    assert d["state"] == "done", d
    return d["node"]


class TestWorkspaces:
    def test_upload_two_rows(self, client):
        d = upload(client, "smiles,bp\nCC,1.0\nCCO,2.0\n")
        tree = client.get(f"/workspaces/{d['workspace']}/tree").json()
        assert len(tree["nodes"]) == 1
        assert tree["nodes"][0]["kind"] == "dataset"

    def test_ingest_error_carries_row(self, client):
        r = client.post(
            "/workspaces", files={"file": ("x.csv", "smiles,bp\nC1CC,2.0\n")}
        )
        assert r.status_code == 400
        body = r.json()
        assert body["code"] == "ingest"
        assert "row 2" in body["message"]

    def test_duplicate_workspace_conflict(self, client):
        upload(client, name="same")
        r = client.post(
            "/workspaces", files={"file": ("d.csv", CSV)}, data={"name": "same"}
        )
        assert r.status_code == 409

    def test_unknown_workspace_404(self, client):
        assert client.get("/workspaces/nope/tree").status_code == 404


class TestRun:
    def test_unknown_method_lists_valid(self, client):
        d = upload(client)
        r = client.post(
            f"/workspaces/{d['workspace']}/nodes/{d['root']}/run",
            json={"method": "transmute", "params": {}},
        )
        assert r.status_code == 400
        assert "extract_features" in r.json()["message"]

    def test_lineage_violation_422(self, client):
        d = upload(client)
        r = client.post(
            f"/workspaces/{d['workspace']}/nodes/{d['root']}/run",
            json={"method": "build_model", "params": {"property": "bp"}},
        )
        assert r.status_code == 422

    def test_job_pipeline(self, client):
        d = upload(client)
        ws = d["workspace"]
        fs = run_sync(client, ws, d["root"], "extract_features", {"levels": [1, 2]})
        model = run_sync(
            client, ws, fs, "build_model", {"property": "bp", "folds": 4}
        )
        r = client.get(f"/nodes/{model}/model")
        assert r.status_code == 200
        assert "property" in r.json()["params"]
        tree = client.get(f"/workspaces/{ws}/tree").json()
        assert [n["kind"] for n in tree["nodes"]] == [
            "dataset", "feature-set", "model",
        ]

    def test_failed_job_reports_error(self, client):
        d = upload(client)
        fs = run_sync(client, d["workspace"], d["root"], "extract_features", {})
        r = client.post(
            f"/workspaces/{d['workspace']}/nodes/{fs}/run",
            json={"method": "build_model", "params": {"property": "absent"}},
        )
        job = wait_job(client, r.json()["job"])
        assert job["state"] == "failed"
        assert "absent" in job["error"]

    def test_cancel_unknown_job(self, client):
        assert client.delete("/jobs/zzz").status_code == 404


class TestNodes:
    def test_molecules_paging(self, client):
        d = upload(client)
        r = client.get(f"/nodes/{d['root']}/molecules", params={"limit": 3})
        body = r.json()
        assert body["total"] == 8
        assert len(body["smiles"]) == 3
        r2 = client.get(
            f"/nodes/{d['root']}/molecules", params={"offset": 6, "limit": 5}
        )
        assert len(r2.json()["smiles"]) == 2

    def test_node_metadata(self, client):
        d = upload(client)
        body = client.get(f"/nodes/{d['root']}").json()
        assert body["kind"] == "dataset"
        assert body["payload_size"] > 0

    def test_unknown_node_404(self, client):
        assert client.get("/nodes/n9999-missing").status_code == 404

    def test_candidates_wrong_kind(self, client):
        d = upload(client)
        assert client.get(f"/nodes/{d['root']}/candidates").status_code == 400


class TestSvg:
    def test_methane_single_label(self, client):
        r = client.get("/molecules/svg", params={"smiles": "C"})
        assert r.status_code == 200
        assert r.headers["content-type"].startswith("image/svg+xml")
        assert r.text.count("<text") == 1
        assert "CH4" in r.text

    def test_benzene_double_bond_marks(self, client):
        svg = client.get("/molecules/svg", params={"smiles": "c1ccccc1"}).text
        # 3 single bonds + 3 double bonds drawn as parallel pairs
        assert svg.count("<line") == 9

    def test_deterministic(self, client):
        a = client.get("/molecules/svg", params={"smiles": "CC(C)c1ccccc1O"}).text
        b = client.get("/molecules/svg", params={"smiles": "CC(C)c1ccccc1O"}).text
        assert a == b

    def test_bad_smiles_400(self, client):
        assert client.get("/molecules/svg", params={"smiles": "C1CC"}).status_code == 400

    def test_size_limit(self):
        m = parse_smiles("C" * 101)
        with pytest.raises(DepictError):
            depict(m)

    def test_heteroatom_labels(self, client):
        svg = client.get("/molecules/svg", params={"smiles": "CCO"}).text
        assert ">OH<" in svg


class TestCli:
    def pipeline(self, runner, ws):
        r = runner.invoke(cli, ["-w", ws, "featurize", "--levels", "1,2"])
        assert r.exit_code == 0, r.output
        return r.output.strip()

    def test_ingest_and_tree(self, tmp_path):
        runner = CliRunner()
        csv = tmp_path / "d.csv"
        csv.write_text(CSV)
        ws = str(tmp_path / "ws")
        r = runner.invoke(cli, ["-w", ws, "ingest", str(csv)])
        assert r.exit_code == 0, r.output
        root = r.output.strip()
        r = runner.invoke(cli, ["-w", ws, "tree"])
        assert r.exit_code == 0
        lines = r.output.strip().splitlines()
        assert len(lines) == 2  # header + the root node
        assert root in r.output

    def test_train_folds_validation(self, tmp_path):
        runner = CliRunner()
        csv = tmp_path / "d.csv"
        csv.write_text(CSV)
        ws = str(tmp_path / "ws")
        runner.invoke(cli, ["-w", ws, "ingest", str(csv)])
        self.pipeline(runner, ws)
        r = runner.invoke(cli, ["-w", ws, "train", "--property", "bp", "--folds", "1"])
        assert r.exit_code == 1
        assert "folds must be >= 2" in r.output

    def test_full_pipeline_and_export(self, tmp_path):
        runner = CliRunner()
        csv = tmp_path / "d.csv"
        csv.write_text(CSV)
        ws = str(tmp_path / "ws")
        runner.invoke(cli, ["-w", ws, "ingest", str(csv)])
        fs = self.pipeline(runner, ws)
        r = runner.invoke(
            cli, ["-w", ws, "train", "--property", "bp", "--folds", "4"]
        )
        assert r.exit_code == 0, r.output
        model = r.output.strip().splitlines()[0]
        out = tmp_path / "model.txt"
        r = runner.invoke(cli, ["-w", ws, "export", model, str(out)])
        assert r.exit_code == 0
        assert "property" in out.read_text()

    def test_missing_workspace_exit_1(self, tmp_path):
        r = CliRunner().invoke(cli, ["-w", str(tmp_path / "nope"), "tree"])
        assert r.exit_code == 1


class TestCliApiParity:
    def test_identical_payloads(self, tmp_path, client):
        # same pipeline once through the CLI, once through the API
        d = upload(client)
        ws_api = d["workspace"]
        fs = run_sync(client, ws_api, d["root"], "extract_features", {"levels": [1, 2]})
        api_payload = client.get(f"/nodes/{fs}/payload").text

        runner = CliRunner()
        csv = tmp_path / "d.csv"
        csv.write_text(CSV)
        ws_cli = str(tmp_path / "wscli")
        runner.invoke(cli, ["-w", ws_cli, "ingest", str(csv)])
        r = runner.invoke(cli, ["-w", ws_cli, "featurize", "--levels", "1,2"])
        from molinverse.workspace import Workspace

        w = Workspace.open(ws_cli)
        assert w.payload_text(r.output.strip()) == api_payload
