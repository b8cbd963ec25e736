# Copyright 2026 The irelab Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import numpy as np
import pytest

import irelab


def test_toy_closed_forms():
    toy = irelab.Toy2D()
    x = np.array([2.0, 1.0])
    assert toy.loss(x) == 2.5
    np.testing.assert_array_equal(toy.grad(x), [2.0, 5.0])
    assert irelab.trace_hessian(toy, x) == pytest.approx(6.0)
    np.testing.assert_allclose(toy.hessian(x), [[1.0, 4.0], [4.0, 5.0]])


def test_eigh_residual():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(8, 8))
    a = a + a.T
    vals, vecs = irelab.eigh(a)
    assert np.all(np.diff(vals) <= 0)
    assert np.linalg.norm(a @ vecs - vecs * vals) <= 1e-8


def test_mask_matches_sort():
    h = np.array([5.0, -1.0, 1.0, 0.5])
    assert irelab.build_mask(h, 0.5) == [False, True, False, True]
    assert irelab.flat_count(10, 0.8) == 8
    with pytest.raises(ValueError):
        irelab.build_mask(np.array([1.0, 2.0, 3.0]), 0.2)


def test_limit_map_on_valley():
    valley = irelab.QuadraticValley.default_instance()
    z = irelab.phi_limit(valley, irelab.QuadraticValley.default_start())
    assert valley.loss(z) < 1e-12
    assert irelab.dist_to_manifold(valley, z) < 1e-6
    np.testing.assert_allclose(irelab.riemannian_trace_grad(valley, z)[:7], 3.0 * z[:7], atol=1e-8)


def test_run_and_sweep():
    out = irelab.run("optimizer.lr = 1\nrun.steps = 50\n")
    assert out["status"] == "converged"
    assert out["csv"].splitlines()[0].startswith("step,loss")
    text = "ire.gamma = 0.5\nire.estimator = exact_diag\nrun.steps = 20\nsweep.kappa = 0, 1\n"
    assert irelab.sweep(text, jobs=1) == irelab.sweep(text, jobs=2)
    with pytest.raises(ValueError):
        irelab.run("run.stepz = 3\n")


def test_divergence_is_reported():
    out = irelab.run("optimizer.lr = 3\nlandscape.init = 0.5, 0.5\nrun.steps = 200\n")
    assert out["status"] == "diverged"


def test_sde_and_verify():
    path = irelab.sde_simulate(lambda u: 2.0, lambda u: 0.0, horizon=0.1, seed=3)
    assert len(path["time"]) == len(path["v"])
    assert path["u"][0] == path["u"][-1]
    rep = irelab.verify("masks")
    assert rep["passed"]
    assert "masks" in irelab.suite_names()
    with pytest.raises(ValueError):
        irelab.verify("nosuch")
