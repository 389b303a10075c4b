"""Smoke test for the lexsim Python extension.

Uses an installed `lexsim` module if there is one (e.g. after
`maturin develop -m crates/python/Cargo.toml`); otherwise builds the
extension with cargo and loads it from a temporary directory.
"""

import importlib
import os
import shutil
import subprocess
import sys
import sysconfig
import tempfile

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def load():
    try:
        return importlib.import_module("lexsim")
    except ImportError:
        pass
    subprocess.run(
        ["cargo", "build", "--release", "-p", "lexsim-py"],
        cwd=ROOT,
        check=True,
    )
    lib = os.path.join(ROOT, "target", "release", "liblexsim_py.so")
    tmp = tempfile.mkdtemp()
    suffix = sysconfig.get_config_var("EXT_SUFFIX") or ".so"
    shutil.copy(lib, os.path.join(tmp, "lexsim" + suffix))
    sys.path.insert(0, tmp)
    return importlib.import_module("lexsim")


def main():
    lx = load()

    cfg = lx.RunConfig(p_sm=1.0, theta=1.0, arrangement="community", epochs=50, window=10, seed=3)
    res = lx.run_simulation(cfg)
    assert res["committed_ratio"] is not None and 0.0 <= res["committed_ratio"] <= 1.0
    assert abs(sum(res["share_exactly"]) - 1.0) < 1e-12
    assert res == lx.run_simulation(cfg), "runs are not deterministic"

    lex = lx.Lexicon()
    lex.commit(1, "ab")
    lex.commit(2, "cd")
    matches, guesses, gaps = lx.decode(lex, "abxcd", [1, 2, 3], [3, 1, 2])
    assert matches == [(0, 2, 1), (3, 5, 2)], matches
    assert guesses == [(2, 3, 3)] and gaps == [(2, 3)]
    assert lx.decode(lex, "abxcd", [1, 2, 3], exhaustive=True)[0] == matches
    assert lex.stats()["synonymy"] == 1.0

    t, df, p = lx.welch_t([1, 2, 3], [2, 3, 4])
    assert abs(t + 1.224745) < 1e-6 and abs(df - 4) < 1e-12
    assert abs(lx.student_t_sf(12.7062, 1) - 0.05) < 1e-4

    pts = [(p, k, 4 ** p * 2.0 ** -k) for p in (0, 0.5, 1) for k in range(2, 11)]
    fit = lx.fit_mapshare(pts)
    assert abs(fit["a"] - 4) < 1e-9 and abs(fit["b"] - 2) < 1e-9

    assert len(lx.expand_grid()) == 34
    assert lx.derive_seed(0, 1, 2) != lx.derive_seed(0, 2, 1)

    out = tempfile.mkdtemp()
    n = lx.simulate("epochs = 20\nwindow = 5\nround_length = 5\np_sm_levels = 0, 1\ntheta_levels = 1", out, runs=2)
    assert n == 8, n
    lx.analyze(out, out)
    figures = lx.report(out, out)
    assert len(figures) == 10 and os.path.exists(os.path.join(out, "fit.csv"))

    try:
        lx.RunConfig(p_sm=2.0)
    except ValueError:
        pass
    else:
        raise AssertionError("invalid config accepted")

    print("lexsim smoke test ok")


if __name__ == "__main__":
    main()
