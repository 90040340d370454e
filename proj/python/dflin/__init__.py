# Copyright 2026 The dflin Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Feedback-linearizable discretization schemes and audits."""

from ._dflin import (
    check_map_axioms,
    grizzle_audit,
    linearity_residual,
    order_estimate,
    phi,
    phi_inv,
    preset_names,
    simulate,
    static_fl_check,
    verify_linearization,
)

__all__ = [
    "check_map_axioms",
    "grizzle_audit",
    "linearity_residual",
    "order_estimate",
    "phi",
    "phi_inv",
    "preset_names",
    "simulate",
    "static_fl_check",
    "verify_linearization",
]
