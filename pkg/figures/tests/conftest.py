import shutil
import subprocess
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture()
def power_csv(tmp_path):
    p = tmp_path / "power.csv"
    p.write_text(
        "kind,test,n,m,d,trials,reject_rate,reject_sd,mean_stat,predicted_perm_power\n"
        "power-curve,xmmd,40,40,5,50,0.42,0.07,1.1,0.64\n"
        "power-curve,xmmd,80,80,5,50,0.8,0.05,2.3,0.952\n"
        "power-curve,mmd-perm{100},40,40,5,50,0.6,0.06,0.012,\n"
        "power-curve,mmd-perm{100},80,80,5,50,0.94,0.03,0.013,\n")
    return str(p)


@pytest.fixture()
def roc_csvs(tmp_path):
    pts = tmp_path / "roc_points.csv"
    pts.write_text(
        "test,n,m,fpr,tpr\n"
        "xmmd,50,50,0,0\n"
        "xmmd,50,50,0.1,0.7\n"
        "xmmd,50,50,1,1\n"
        "linear,50,50,0,0\n"
        "linear,50,50,0.4,0.5\n"
        "linear,50,50,1,1\n")
    agg = tmp_path / "roc.csv"
    agg.write_text(
        "kind,test,n,m,d,trials,auc\n"
        "roc,xmmd,50,50,5,100,0.83\n"
        "roc,linear,50,50,5,100,0.55\n")
    return str(pts), str(agg)


@pytest.fixture()
def bench_csv(tmp_path):
    p = tmp_path / "bench.csv"
    p.write_text(
        "kind,test,n,m,d,trials,median_s,iqr_s,total_s,reject_rate\n"
        "bench,xmmd,100,100,5,10,0.002,0.0004,0.02,0.9\n"
        "bench,xmmd,200,200,5,10,0.008,0.001,0.08,0.97\n"
        "bench,mmd-perm{200},100,100,5,10,0.05,0.004,0.5,0.95\n"
        "bench,mmd-perm{200},200,200,5,10,0.21,0.01,2.1,1\n")
    return str(p)


@pytest.fixture()
def raw_csv(tmp_path):
    import numpy as np
    rng = np.random.default_rng(0)
    p = tmp_path / "raw.csv"
    lines = ["statistic"] + [f"{v:.9g}" for v in rng.normal(size=400)]
    p.write_text("\n".join(lines) + "\n")
    return str(p)


def _crossmmd_available() -> bool:
    return shutil.which("crossmmd") is not None


@pytest.fixture(scope="session")
def harness_artifacts(tmp_path_factory):
    """Real desk-scale artifacts produced through the primary's CLI.

    The figures package consumes the primary only through these files; if
    the CLI is not installed the dependent tests are skipped (the rest of
    this suite runs standalone).
    """
    if not _crossmmd_available():
        pytest.skip("crossmmd CLI not installed")
    root = tmp_path_factory.mktemp("artifacts")

    def run(args):
        proc = subprocess.run(["crossmmd"] + args, cwd=root,
                              capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        return proc

    run(["null-sim", "--d", "4", "--sizes", "48", "--trials", "120",
         "--tests", "xmmd", "--seed", "3", "--out", "ns"])
    run(["power-curve", "--d", "4", "--eps", "0.6", "--j", "2",
         "--sizes", "32,64", "--trials", "60",
         "--tests", "xmmd,mmd-perm{100}", "--seed", "3", "--out", "pw"])
    run(["roc", "--d", "4", "--eps", "0.7", "--j", "2", "--sizes", "48",
         "--trials", "80", "--tests", "xmmd,mmd,block{sqrt},linear",
         "--seed", "3", "--out", "rc"])
    run(["bench", "--d", "4", "--eps", "0.5", "--j", "1", "--sizes", "32,64",
         "--trials", "5", "--tests", "xmmd,mmd-perm{100}", "--seed", "3",
         "--out", "bn"])
    return root
