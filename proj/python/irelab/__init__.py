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

"""Python bindings for the irelab C++ core."""

from irelab._irelab import (
    ConfigError,
    DivergenceError,
    InterpolatingRegression,
    Landscape,
    NonConvergenceError,
    QuadraticValley,
    SoftmaxModel,
    Toy2D,
    build_mask,
    canonical_config,
    dist_to_manifold,
    eigh,
    flat_count,
    measure_drift,
    phi_limit,
    riemannian_trace_grad,
    run,
    sde_simulate,
    suite_names,
    sweep,
    trace_hessian,
    verify,
)

__all__ = [
    "ConfigError",
    "DivergenceError",
    "InterpolatingRegression",
    "Landscape",
    "NonConvergenceError",
    "QuadraticValley",
    "SoftmaxModel",
    "Toy2D",
    "build_mask",
    "canonical_config",
    "dist_to_manifold",
    "eigh",
    "flat_count",
    "measure_drift",
    "phi_limit",
    "riemannian_trace_grad",
    "run",
    "sde_simulate",
    "suite_names",
    "sweep",
    "trace_hessian",
    "verify",
]
