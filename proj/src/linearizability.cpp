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

#include "dflin/linearizability.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include <json.hpp>

namespace dflin {

namespace {

using nlohmann::json;

json witness_json(const std::optional<InvolutivityWitness>& w) {
  if (!w) return nullptr;
  json j;
  j["point"] = std::vector<double>(w->point.data(),
                                   w->point.data() + w->point.size());
  j["generator_i"] = w->generator_i;
  j["generator_j"] = w->generator_j;
  j["rank_before"] = w->rank_before;
  j["rank_after"] = w->rank_after;
  return j;
}

std::string witness_text(const InvolutivityWitness& w) {
  std::ostringstream os;
  os << "bracket [X_" << w.generator_i << ", X_" << w.generator_j
     << "] escapes the span (rank " << w.rank_before << " -> " << w.rank_after
     << ") at point (";
  for (int i = 0; i < w.point.size(); ++i) {
    if (i) os << ", ";
    os << w.point(i);
  }
  os << ")";
  return os.str();
}

}  // namespace

MatXd Distribution::evaluate(const VecXd& p) const {
  MatXd m(dim, static_cast<Eigen::Index>(generators.size()));
  for (std::size_t j = 0; j < generators.size(); ++j)
    m.col(static_cast<Eigen::Index>(j)) = generators[j](p);
  return m;
}

int Distribution::rank_at(const VecXd& p) const {
  if (generators.empty()) return 0;
  return numerical_rank(evaluate(p), dim);
}

Distribution Distribution::from_constants(const std::vector<VecXd>& vectors,
                                          int dim) {
  Distribution d;
  d.dim = dim;
  for (const VecXd& v : vectors) {
    if (v.size() != dim)
      throw DimensionError("Distribution::from_constants: dimension mismatch");
    d.generators.push_back(
        SmoothVectorFun::make<2>(dim, dim, [v](const auto& p) {
          using S = typename std::decay_t<decltype(p)>::Scalar;
          VecX<S> out(v.size());
          for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = S(v(i));
          return out;
        }));
  }
  return d;
}

VecXd lie_bracket(const SmoothVectorFun& x_field, const SmoothVectorFun& y_field,
                  const VecXd& p) {
  if (x_field.in_dim() != y_field.in_dim() ||
      x_field.out_dim() != y_field.out_dim() ||
      x_field.in_dim() != x_field.out_dim())
    throw DimensionError("lie_bracket: fields must share a square dimension");
  const MatXd dx = jacobian(x_field, p);
  const MatXd dy = jacobian(y_field, p);
  return dy * x_field(p) - dx * y_field(p);
}

SmoothVectorFun lie_bracket_field(const SmoothVectorFun& x_field,
                                  const SmoothVectorFun& y_field) {
  if (x_field.in_dim() != y_field.in_dim() ||
      x_field.out_dim() != y_field.out_dim() ||
      x_field.in_dim() != x_field.out_dim())
    throw DimensionError("lie_bracket_field: fields must share a square "
                         "dimension");
  const int n = x_field.in_dim();
  const int depth = std::min(x_field.depth(), y_field.depth());
  auto bracket = [x_field, y_field](const auto& p) {
    using S = typename std::decay_t<decltype(p)>::Scalar;
    const VecX<S> pt = p;
    const MatX<S> dx = jacobian_t<S>(x_field, pt);
    const MatX<S> dy = jacobian_t<S>(y_field, pt);
    return VecX<S>(dy * x_field.eval(pt) - dx * y_field.eval(pt));
  };
  // Differentiating the bracket needs the parents one dual level deeper,
  // so the field loses a level; at depth 0 jacobian_t falls back to FD.
  if (depth >= 2) return SmoothVectorFun::make<1>(n, n, bracket);
  return SmoothVectorFun::make<0>(n, n, bracket);
}

Distribution kernel_distribution(const DiscreteMapModel& model,
                                 const VecXd& p) {
  if (p.size() != model.d_s + model.m)
    throw DimensionError("kernel_distribution: point has wrong dimension");
  const MatXd jac = jacobian(model.map, p);
  const MatXd basis = nullspace(jac, model.d_s + model.m);
  std::vector<VecXd> cols;
  for (int j = 0; j < basis.cols(); ++j) cols.push_back(basis.col(j));
  return Distribution::from_constants(cols, model.d_s + model.m);
}

std::vector<SmoothVectorFun> kernel_fields(const DiscreteMapModel& model) {
  const int ds = model.d_s, m = model.m, d = ds + m;
  std::vector<SmoothVectorFun> fields;
  for (int i = 0; i < m; ++i) {
    auto ker = [map = model.map, ds, m, i](const auto& p) {
      using S = typename std::decay_t<decltype(p)>::Scalar;
      const VecX<S> pt = p;
      const MatX<S> jac = jacobian_t<S>(map, pt);
      MatX<S> jx = jac.leftCols(ds);
      VecX<S> rhs = -jac.col(ds + i);
      const VecX<S> vx = solve_dense<S>(jx, rhs);
      VecX<S> out = VecX<S>::Zero(ds + m);
      out.head(ds) = vx;
      out(ds + i) = S(1.0);
      return out;
    };
    if (model.map.depth() >= 2)
      fields.push_back(SmoothVectorFun::make<1>(d, d, ker));
    else
      fields.push_back(SmoothVectorFun::make<0>(d, d, ker));
  }
  return fields;
}

Distribution dist_sum(const Distribution& a, const Distribution& b) {
  if (a.dim != b.dim)
    throw DimensionError("dist_sum: ambient dimensions differ");
  Distribution out = a;
  out.generators.insert(out.generators.end(), b.generators.begin(),
                        b.generators.end());
  return out;
}

Distribution dist_intersect(const Distribution& a, const Distribution& b,
                            const VecXd& p) {
  if (a.dim != b.dim)
    throw DimensionError("dist_intersect: ambient dimensions differ");
  const int d = a.dim;
  // x lies in both spans iff it is annihilated by both orthogonal
  // complement projectors; stack them and take the nullspace.
  auto complement = [d](const MatXd& gens) -> MatXd {
    if (gens.cols() == 0) return MatXd::Identity(d, d);
    Eigen::JacobiSVD<MatXd> svd(gens, Eigen::ComputeFullU);
    const int r = numerical_rank(gens, d);
    const MatXd u = svd.matrixU().leftCols(r);
    return MatXd::Identity(d, d) - u * u.transpose();
  };
  MatXd stacked(2 * d, d);
  stacked.topRows(d) = complement(a.evaluate(p));
  stacked.bottomRows(d) = complement(b.evaluate(p));
  const MatXd basis = nullspace(stacked, d);
  std::vector<VecXd> cols;
  for (int j = 0; j < basis.cols(); ++j) cols.push_back(basis.col(j));
  return Distribution::from_constants(cols, d);
}

InvolutivityReport involutive(const Distribution& dist,
                              const std::vector<VecXd>& points) {
  InvolutivityReport report;
  report.involutive = true;
  const int n_gen = static_cast<int>(dist.generators.size());
  for (const VecXd& p : points) {
    const MatXd base = dist.evaluate(p);
    const int r = numerical_rank(base, dist.dim);
    report.ranks.push_back(r);
    if (r == dist.dim) continue;  // full rank: no bracket can escape
    if (!report.involutive) continue;  // keep collecting ranks only
    MatXd augmented(dist.dim, base.cols() + 1);
    augmented.leftCols(base.cols()) = base;
    for (int i = 0; i < n_gen && report.involutive; ++i) {
      for (int j = i + 1; j < n_gen; ++j) {
        augmented.col(base.cols()) =
            lie_bracket(dist.generators[i], dist.generators[j], p);
        const int r_aug = numerical_rank(augmented, dist.dim);
        if (r_aug > r) {
          report.involutive = false;
          report.witness = InvolutivityWitness{p, i, j, r, r_aug};
          break;
        }
      }
    }
  }
  return report;
}

std::string to_string(AuditVerdict verdict) {
  switch (verdict) {
    case AuditVerdict::NotLinearizable: return "NOT-LINEARIZABLE";
    case AuditVerdict::LinearizableConsistent:
      return "LINEARIZABLE-CONSISTENT";
    case AuditVerdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

std::string AuditReport::to_text() const {
  std::ostringstream os;
  os << "discrete-time linearizability audit\n";
  os << "verdict: " << to_string(verdict) << "\n";
  if (!failing_stage.empty()) os << "failing stage: " << failing_stage << "\n";
  for (const AuditStage& s : stages) {
    os << "  [" << (s.passed ? "pass" : "FAIL") << "] " << s.name;
    if (!s.ranks.empty()) {
      os << " (rank";
      const bool constant =
          std::all_of(s.ranks.begin(), s.ranks.end(),
                      [&](int r) { return r == s.ranks.front(); });
      if (constant) {
        os << " " << s.ranks.front();
      } else {
        os << "s";
        for (int r : s.ranks) os << " " << r;
      }
      os << ")";
    }
    os << "\n";
    if (s.witness) os << "        " << witness_text(*s.witness) << "\n";
    if (!s.note.empty()) os << "        " << s.note << "\n";
  }
  return os.str();
}

std::string AuditReport::to_json() const {
  json j;
  j["verdict"] = to_string(verdict);
  j["failing_stage"] = failing_stage;
  j["stages"] = json::array();
  for (const AuditStage& s : stages) {
    json js;
    js["name"] = s.name;
    js["passed"] = s.passed;
    js["ranks"] = s.ranks;
    js["witness"] = witness_json(s.witness);
    js["note"] = s.note;
    j["stages"].push_back(js);
  }
  return j.dump(2) + "\n";
}

namespace {

bool constant_ranks(const std::vector<int>& ranks) {
  return std::all_of(ranks.begin(), ranks.end(),
                     [&](int r) { return r == ranks.front(); });
}

}  // namespace

AuditReport grizzle_audit(const DiscreteMapModel& model,
                          const std::vector<VecXd>& points) {
  if (points.empty())
    throw DimensionError("grizzle_audit: need at least one sample point");
  const int ds = model.d_s, m = model.m, d = ds + m;
  AuditReport report;

  // Delta_0: the raw control directions in the stacked (x, u) space.
  std::vector<VecXd> ctrl_dirs;
  for (int i = 0; i < m; ++i) {
    VecXd e = VecXd::Zero(d);
    e(ds + i) = 1.0;
    ctrl_dirs.push_back(e);
  }
  const Distribution delta0 = Distribution::from_constants(ctrl_dirs, d);

  Distribution kernel;
  kernel.dim = d;
  kernel.generators = kernel_fields(model);

  // Delta_1: control directions plus the map's control-derivative columns
  // embedded back into the state slots.
  Distribution delta1 = delta0;
  for (int i = 0; i < m; ++i) {
    auto img = [map = model.map, ds, m, i](const auto& p) {
      using S = typename std::decay_t<decltype(p)>::Scalar;
      const VecX<S> pt = p;
      const MatX<S> jac = jacobian_t<S>(map, pt);
      VecX<S> out = VecX<S>::Zero(ds + m);
      out.head(ds) = jac.col(ds + i);
      return out;
    };
    if (model.map.depth() >= 2)
      delta1.generators.push_back(SmoothVectorFun::make<1>(d, d, img));
    else
      delta1.generators.push_back(SmoothVectorFun::make<0>(d, d, img));
  }

  bool inconclusive = false;
  auto run_involutivity_stage = [&](const std::string& name,
                                    const Distribution& dist) -> bool {
    AuditStage stage;
    stage.name = name;
    InvolutivityReport inv = involutive(dist, points);
    stage.ranks = inv.ranks;
    stage.witness = inv.witness;
    if (!constant_ranks(inv.ranks)) {
      stage.passed = false;
      stage.note = "rank varies across sample points";
      inconclusive = true;
      report.stages.push_back(stage);
      return false;
    }
    stage.passed = inv.involutive;
    report.stages.push_back(stage);
    if (!inv.involutive && report.failing_stage.empty())
      report.failing_stage = name;
    return inv.involutive;
  };

  bool ok = true;
  ok = run_involutivity_stage("Delta_0 + K involutive",
                              dist_sum(delta0, kernel)) && ok;

  {
    AuditStage stage;
    stage.name = "Delta_0 ^ K constant dimension";
    for (const VecXd& p : points) {
      const Distribution inter = dist_intersect(delta0, kernel, p);
      stage.ranks.push_back(static_cast<int>(inter.generators.size()));
    }
    stage.passed = constant_ranks(stage.ranks);
    if (!stage.passed) {
      stage.note = "intersection dimension varies across sample points";
      inconclusive = true;
    }
    report.stages.push_back(stage);
    ok = stage.passed && ok;
  }

  ok = run_involutivity_stage("Delta_1 involutive", delta1) && ok;
  ok = run_involutivity_stage("Delta_1 + K involutive",
                              dist_sum(delta1, kernel)) && ok;

  if (inconclusive)
    report.verdict = AuditVerdict::Inconclusive;
  else if (ok)
    report.verdict = AuditVerdict::LinearizableConsistent;
  else
    report.verdict = AuditVerdict::NotLinearizable;
  return report;
}

std::string StaticFlReport::to_text() const {
  std::ostringstream os;
  os << "static feedback linearizability check\n";
  os << "verdict: " << to_string(verdict) << "\n";
  if (!detail.empty()) os << detail << "\n";
  for (std::size_t k = 0; k < ranks_per_level.size(); ++k) {
    os << "  G_" << k << " ranks:";
    for (int r : ranks_per_level[k]) os << " " << r;
    os << "\n";
  }
  if (witness) os << "  " << witness_text(*witness) << "\n";
  return os.str();
}

std::string StaticFlReport::to_json() const {
  json j;
  j["verdict"] = to_string(verdict);
  j["linearizable"] = linearizable();
  j["detail"] = detail;
  j["ranks_per_level"] = ranks_per_level;
  j["witness"] = witness_json(witness);
  return j.dump(2) + "\n";
}

StaticFlReport static_fl_check(const ControlAffineSystem& sys,
                               const std::vector<VecXd>& points) {
  if (points.empty())
    throw DimensionError("static_fl_check: need at least one sample point");
  const int n = sys.n, m = sys.m;
  StaticFlReport report;

  std::vector<SmoothVectorFun> input_fields;
  for (int i = 0; i < m; ++i) {
    auto gi = [g = sys.g, i](const auto& x) {
      using S = typename std::decay_t<decltype(x)>::Scalar;
      const VecX<S> xt = x;
      return VecX<S>(g.eval(xt).col(i));
    };
    input_fields.push_back(SmoothVectorFun::make<2>(n, n, gi));
  }

  Distribution chain;
  chain.dim = n;
  chain.generators = input_fields;

  for (int level = 0; level < n; ++level) {
    std::vector<int> ranks;
    for (const VecXd& p : points) ranks.push_back(chain.rank_at(p));
    report.ranks_per_level.push_back(ranks);
    if (!constant_ranks(ranks)) {
      report.verdict = AuditVerdict::Inconclusive;
      report.detail = "G_" + std::to_string(level) +
                      " has non-constant rank across sample points";
      return report;
    }
    const int rank = ranks.front();
    if (rank == n) {
      // Full rank reached: the chain is stationary and trivially
      // involutive from here on.
      report.verdict = AuditVerdict::LinearizableConsistent;
      report.detail = "full rank " + std::to_string(n) + " reached at G_" +
                      std::to_string(level);
      return report;
    }
    InvolutivityReport inv = involutive(chain, points);
    if (!inv.involutive) {
      report.verdict = AuditVerdict::NotLinearizable;
      report.detail = "G_" + std::to_string(level) + " is not involutive";
      report.witness = inv.witness;
      return report;
    }
    if (level == n - 1) break;
    std::vector<SmoothVectorFun> grown = chain.generators;
    for (const SmoothVectorFun& x : chain.generators) {
      grown.push_back(lie_bracket_field(sys.f, x));
      for (const SmoothVectorFun& gi : input_fields)
        grown.push_back(lie_bracket_field(gi, x));
    }
    chain.generators = std::move(grown);
  }

  report.verdict = AuditVerdict::NotLinearizable;
  report.detail = "G_" + std::to_string(n - 1) + " has rank " +
                  std::to_string(report.ranks_per_level.back().front()) +
                  " < " + std::to_string(n);
  return report;
}

std::vector<VecXd> sample_points(int dim, int count, unsigned seed,
                                 const Guard& guard, double box_half_width) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(-box_half_width, box_half_width);
  std::vector<VecXd> points;
  int attempts = 0;
  const int max_attempts = 1000 * count;
  while (static_cast<int>(points.size()) < count &&
         attempts++ < max_attempts) {
    VecXd p(dim);
    for (int i = 0; i < dim; ++i) p(i) = unif(rng);
    if (guard(p)) points.push_back(p);
  }
  if (static_cast<int>(points.size()) < count)
    throw DomainError("sample_points: guard rejected too many draws");
  return points;
}

}  // namespace dflin
