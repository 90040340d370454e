/*
 Copyright 2026 The dflin Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

     http://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#ifndef DFLIN_LINEARIZABILITY_HPP_
#define DFLIN_LINEARIZABILITY_HPP_

#include <optional>
#include <string>
#include <vector>

#include "dflin/systems.hpp"

namespace dflin {

/// Point-indexed span of vector fields on R^d.
struct Distribution {
  int dim = 0;
  std::vector<SmoothVectorFun> generators;

  /// Generator values stacked as columns.
  MatXd evaluate(const VecXd& p) const;
  int rank_at(const VecXd& p) const;

  static Distribution from_constants(const std::vector<VecXd>& vectors,
                                     int dim);
};

/// Discrete map  x_{k+1} = F_h(x_k, u_k)  audited for linearizability.
struct DiscreteMapModel {
  int d_s = 0;  // state dimension
  int m = 0;    // control dimension
  SmoothVectorFun map;  // R^{d_s + m} -> R^{d_s}
  Guard guard = always_valid();  // over stacked (x, u) points
};

/// [X, Y](x) = DY(x) X(x) - DX(x) Y(x).
VecXd lie_bracket(const SmoothVectorFun& x_field, const SmoothVectorFun& y_field,
                  const VecXd& p);

/// The bracket as a field, differentiable one level less than its parents.
SmoothVectorFun lie_bracket_field(const SmoothVectorFun& x_field,
                                  const SmoothVectorFun& y_field);

/// Orthonormal basis of ker [dF/dx | dF/du] at p, as constant fields.
Distribution kernel_distribution(const DiscreteMapModel& model,
                                 const VecXd& p);

/// Smooth kernel generators: control direction e_i completed by the state
/// solve  (dF/dx) v = -(dF/du) e_i.  Differentiable, so usable in brackets.
std::vector<SmoothVectorFun> kernel_fields(const DiscreteMapModel& model);

Distribution dist_sum(const Distribution& a, const Distribution& b);

/// Pointwise intersection via stacked orthogonal complements; constant
/// fields anchored at p.
Distribution dist_intersect(const Distribution& a, const Distribution& b,
                            const VecXd& p);

struct InvolutivityWitness {
  VecXd point;
  int generator_i = -1;
  int generator_j = -1;
  int rank_before = 0;
  int rank_after = 0;
};

struct InvolutivityReport {
  bool involutive = false;
  std::optional<InvolutivityWitness> witness;
  std::vector<int> ranks;  // distribution rank at each sample point
};

/// Checks rank([generators | [X_i, X_j]]) = rank(generators) at every
/// sample point; full-rank points are skipped (nothing can escape).
InvolutivityReport involutive(const Distribution& dist,
                              const std::vector<VecXd>& points);

enum class AuditVerdict {
  NotLinearizable,
  LinearizableConsistent,
  Inconclusive,
};

std::string to_string(AuditVerdict verdict);

struct AuditStage {
  std::string name;
  bool passed = false;
  std::vector<int> ranks;
  std::optional<InvolutivityWitness> witness;
  std::string note;
};

struct AuditReport {
  AuditVerdict verdict = AuditVerdict::Inconclusive;
  std::string failing_stage;
  std::vector<AuditStage> stages;

  std::string to_text() const;
  std::string to_json() const;
};

/// Discrete-time linearizability audit: control distribution, kernel of
/// the map Jacobian, their sum/intersection, and the propagated
/// distribution with its kernel sum, each tested for involutivity and
/// constant rank over the sample cloud.
AuditReport grizzle_audit(const DiscreteMapModel& model,
                          const std::vector<VecXd>& points);

struct StaticFlReport {
  AuditVerdict verdict = AuditVerdict::Inconclusive;
  std::string detail;
  std::vector<std::vector<int>> ranks_per_level;
  std::optional<InvolutivityWitness> witness;

  bool linearizable() const {
    return verdict == AuditVerdict::LinearizableConsistent;
  }
  std::string to_text() const;
  std::string to_json() const;
};

/// Continuous-time static feedback linearizability: grows the chain
/// G_0 = span{g_i}, G_{k+1} = G_k + span{[f, X], [g_i, X]} and requires
/// involutivity + constant rank at each level and full rank at level n-1.
StaticFlReport static_fl_check(const ControlAffineSystem& sys,
                               const std::vector<VecXd>& points);

/// Sample cloud in the unit box intersected with a guard, rejecting
/// points the guard refuses; deterministic for a fixed seed.
std::vector<VecXd> sample_points(int dim, int count, unsigned seed,
                                 const Guard& guard = always_valid(),
                                 double box_half_width = 0.5);

}  // namespace dflin

#endif  // DFLIN_LINEARIZABILITY_HPP_
