#include "dfocast/sdfo.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "dfocast/error.hpp"
#include "dfocast/random.hpp"
#include "dfocast/text.hpp"

namespace dfocast::sdfo {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void SdfoConfig::validate(std::size_t dim) const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::InvalidParameter, what); };
  if (dim < 1) fail("optimizer dimension must be >= 1");
  if (budget < 1) fail("budget must be >= 1");
  if (!(initial_radius > 0.0)) fail("initial radius z0 must be positive");
  if (!(shrink > 0.0 && shrink < 1.0)) fail("gamma1 must lie in (0, 1)");
  if (!(expand > 1.0)) fail("gamma2 must exceed 1");
  if (!(eta0 > 0.0 && eta0 < eta1 && eta1 < 1.0)) fail("need 0 < eta0 < eta1 < 1");
  if (!(theta > 1.0)) fail("theta must exceed 1");
  if (!(penalty > 0.0)) fail("penalty coefficient must be positive");
  if (!(max_radius >= initial_radius)) fail("max_radius must be >= initial radius");
  if (!bounds.empty() && bounds.size() != dim) fail("bounds dimension mismatch");
  for (const auto& b : bounds) {
    if (!(b.lower < b.upper)) fail("each bound needs lower < upper");
  }
  if (!x0.empty() && x0.size() != dim) fail("x0 dimension mismatch");
}

std::vector<Bounds> SdfoConfig::bounds_for(std::size_t dim) const {
  return bounds.empty() ? std::vector<Bounds>(dim) : bounds;
}

std::size_t IntegerEncoding::index_of(double x) const {
  if (values.empty()) throw Error(ErrorKind::InvalidParameter, "empty feasible set");
  if (!(x >= 0.0 && x <= 1.0)) {
    throw Error(ErrorKind::InvalidInput, "decode requires x in [0, 1]; route through the penalty");
  }
  const auto n = values.size();
  const auto k = static_cast<std::size_t>(std::floor(x * static_cast<double>(n)));
  return std::min(k, n - 1);
}

int IntegerEncoding::decode(double x) const { return values[index_of(x)]; }

double IntegerEncoding::centre(std::size_t index) const {
  return (static_cast<double>(index) + 0.5) / static_cast<double>(values.size());
}

std::optional<double> penalty_objective(std::span<const double> x,
                                        std::span<const Bounds> bounds, double upper_bound,
                                        double penalty) {
  if (x.size() != bounds.size()) {
    throw Error(ErrorKind::InvalidInput, "point and bounds differ in dimension");
  }
  bool inside = true;
  double violation = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < bounds[i].lower || x[i] > bounds[i].upper) {
      inside = false;
      violation += std::min(std::abs(x[i] - bounds[i].lower), std::abs(x[i] - bounds[i].upper));
    }
  }
  if (inside) return std::nullopt;
  return upper_bound + penalty * violation;
}

double QuadraticModel::operator()(const VectorXd& x) const {
  const VectorXd d = x - centre;
  return f + g.dot(d) + 0.5 * d.dot(H * d);
}

QuadraticModel build_quadratic_model(const InterpolationSet& set, const VectorXd& centre) {
  const auto m = static_cast<Eigen::Index>(set.size());
  const Eigen::Index dim = centre.size();
  if (static_cast<std::size_t>(m) < static_cast<std::size_t>(dim) + 1) {
    throw Error(ErrorKind::GeometryFailure, "fewer than P+1 interpolation points");
  }
  if (static_cast<std::size_t>(m) > full_quadratic_size(static_cast<std::size_t>(dim))) {
    throw Error(ErrorKind::InvalidInput, "more than (P+1)(P+2)/2 interpolation points");
  }

  // Shift to the centre and scale to the unit ball for conditioning; the
  // minimum-Frobenius solution is equivariant under uniform scaling.
  MatrixXd Y(dim, m);
  double scale = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    Y.col(j) = set.points[static_cast<std::size_t>(j)] - centre;
    scale = std::max(scale, Y.col(j).norm());
  }
  if (!(scale > 0.0)) throw Error(ErrorKind::GeometryFailure, "interpolation points coincide");
  Y /= scale;

  const Eigen::Index n = m + dim + 1;
  MatrixXd K = MatrixXd::Zero(n, n);
  const MatrixXd gram = Y.transpose() * Y;
  K.topLeftCorner(m, m) = 0.5 * gram.array().square().matrix();
  K.block(0, m, m, 1).setOnes();
  K.block(0, m + 1, m, dim) = Y.transpose();
  K.block(m, 0, 1, m).setOnes();
  K.block(m + 1, 0, dim, m) = Y;
  VectorXd rhs = VectorXd::Zero(n);
  for (Eigen::Index j = 0; j < m; ++j) rhs(j) = set.values[static_cast<std::size_t>(j)];

  Eigen::FullPivLU<MatrixXd> lu(K);
  if (lu.rank() < n) throw Error(ErrorKind::GeometryFailure, "interpolation set is not poised");
  const VectorXd sol = lu.solve(rhs);
  const VectorXd lambda = sol.head(m);

  QuadraticModel model;
  model.centre = centre;
  model.f = sol(m);
  model.g = sol.segment(m + 1, dim) / scale;
  MatrixXd H_scaled = Y * lambda.asDiagonal() * Y.transpose();
  model.H = 0.5 * (H_scaled + H_scaled.transpose()) / (scale * scale);

  double magnitude = 1.0;
  for (double v : set.values) magnitude = std::max(magnitude, std::abs(v));
  for (std::size_t j = 0; j < set.size(); ++j) {
    if (!(std::abs(model(set.points[j]) - set.values[j]) <= 1e-8 * magnitude)) {
      throw Error(ErrorKind::GeometryFailure, "interpolation residual too large");
    }
  }
  return model;
}

namespace {

double model_step_value(const QuadraticModel& m, const VectorXd& d) {
  return m.f + m.g.dot(d) + 0.5 * d.dot(m.H * d);
}

VectorXd cauchy_step(const QuadraticModel& m, double radius) {
  const double gnorm = m.g.norm();
  if (gnorm == 0.0) return VectorXd::Zero(m.g.size());
  const double curvature = m.g.dot(m.H * m.g);
  double tau = 1.0;
  if (curvature > 0.0) tau = std::min(1.0, gnorm * gnorm * gnorm / (radius * curvature));
  return -tau * radius / gnorm * m.g;
}

// Dogleg path between the unconstrained steepest-descent minimiser and the
// Newton step; requires H positive definite.
VectorXd dogleg_step(const QuadraticModel& m, const Eigen::LLT<MatrixXd>& llt, double radius) {
  const VectorXd newton = -llt.solve(m.g);
  if (newton.norm() <= radius) return newton;
  const double gg = m.g.squaredNorm();
  const VectorXd sd = -(gg / m.g.dot(m.H * m.g)) * m.g;
  if (sd.norm() >= radius) return -radius / m.g.norm() * m.g;
  const VectorXd diff = newton - sd;
  const double a = diff.squaredNorm();
  const double b = 2.0 * sd.dot(diff);
  const double c = sd.squaredNorm() - radius * radius;
  const double tau = (-b + std::sqrt(b * b - 4.0 * a * c)) / (2.0 * a);
  return sd + tau * diff;
}

// Boundary solution of min m(d), |d| = radius, from the eigendecomposition:
// d(mu) = -(H + mu I)^{-1} g with mu chosen so that |d(mu)| = radius.
VectorXd eigen_boundary_step(const QuadraticModel& m, double radius) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(m.H);
  const VectorXd lam = eig.eigenvalues();
  const MatrixXd Q = eig.eigenvectors();
  const VectorXd gq = Q.transpose() * m.g;
  const double lam_min = lam.minCoeff();
  const double tiny = 1e-12 * std::max(1.0, lam.cwiseAbs().maxCoeff());

  auto step_norm = [&](double mu) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
      const double denom = lam(i) + mu;
      if (std::abs(gq(i)) > 0.0) s += (gq(i) / denom) * (gq(i) / denom);
    }
    return std::sqrt(s);
  };
  auto step_at = [&](double mu) {
    VectorXd c(lam.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
      const double denom = lam(i) + mu;
      c(i) = std::abs(gq(i)) > 0.0 ? -gq(i) / denom : 0.0;
    }
    return VectorXd(Q * c);
  };

  const double mu_low = std::max(0.0, -lam_min) + tiny;
  if (step_norm(mu_low) < radius) {
    // Hard case: fill up to the boundary along the lowest eigenvector.
    VectorXd c = Q.transpose() * step_at(mu_low);
    double rest = radius * radius - c.squaredNorm();
    Eigen::Index imin = 0;
    lam.minCoeff(&imin);
    c(imin) += std::sqrt(std::max(0.0, rest));
    return Q * c;
  }
  double lo = mu_low;
  double hi = mu_low + m.g.norm() / radius + lam.cwiseAbs().maxCoeff() + 1.0;
  while (step_norm(hi) > radius) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (step_norm(mid) > radius ? lo : hi) = mid;
  }
  return step_at(hi);
}

}  // namespace

VectorXd solve_trust_region_subproblem(const QuadraticModel& model, const VectorXd& centre,
                                       double radius) {
  if (!(radius > 0.0)) throw Error(ErrorKind::InvalidParameter, "radius must be positive");
  const Eigen::Index dim = centre.size();

  std::vector<VectorXd> candidates;
  candidates.push_back(VectorXd::Zero(dim));
  candidates.push_back(cauchy_step(model, radius));

  Eigen::LLT<MatrixXd> llt(model.H);
  const bool positive_definite =
      llt.info() == Eigen::Success && (llt.matrixL().toDenseMatrix().diagonal().array() > 0.0).all();
  if (positive_definite && model.g.norm() > 0.0) {
    candidates.push_back(dogleg_step(model, llt, radius));
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(model.H);
  Eigen::Index imin = 0;
  const double lam_min = eig.eigenvalues().minCoeff(&imin);
  if (lam_min < 0.0) {
    const VectorXd v = eig.eigenvectors().col(imin);
    candidates.push_back(radius * v);
    candidates.push_back(-radius * v);
  }
  if (model.g.norm() > 0.0 || lam_min < 0.0) {
    candidates.push_back(eigen_boundary_step(model, radius));
  }

  const VectorXd* best = &candidates.front();
  double best_value = model_step_value(model, *best);
  for (const VectorXd& d : candidates) {
    if (!(d.norm() <= radius * (1.0 + 1e-12))) continue;
    const double v = model_step_value(model, d);
    if (v < best_value) {
      best_value = v;
      best = &d;
    }
  }
  VectorXd step = *best;
  const double norm = step.norm();
  if (norm > radius) step *= radius / norm;
  return centre + step;
}

double success_ratio(double f_current, double f_trial, double m_current, double m_trial) {
  const double predicted = m_current - m_trial;
  if (predicted == 0.0) {
    throw Error(ErrorKind::DegenerateStep, "model predicts no decrease");
  }
  return (f_current - f_trial) / predicted;
}

namespace {

std::size_t farthest_index(const InterpolationSet& set, const VectorXd& from) {
  std::size_t far = 0;
  double far_dist = -1.0;
  for (std::size_t j = 0; j < set.size(); ++j) {
    const double d = (set.points[j] - from).norm();
    if (d > far_dist) {
      far_dist = d;
      far = j;
    }
  }
  return far;
}

bool contains(const InterpolationSet& set, const VectorXd& x) {
  return std::any_of(set.points.begin(), set.points.end(),
                     [&](const VectorXd& p) { return p == x; });
}

void discard_distant(InterpolationSet& set, const VectorXd& incumbent, double limit) {
  InterpolationSet kept;
  for (std::size_t j = 0; j < set.size(); ++j) {
    if ((set.points[j] - incumbent).norm() < limit) {
      kept.points.push_back(set.points[j]);
      kept.values.push_back(set.values[j]);
    }
  }
  set = std::move(kept);
}

// Appends while there is room, otherwise substitutes for the farthest point
// when `substitute` holds or the new point is nearer than that point.
void insert_point(InterpolationSet& set, const VectorXd& incumbent, const VectorXd& x,
                  double value, bool substitute) {
  if (contains(set, x)) return;
  const std::size_t cap = full_quadratic_size(static_cast<std::size_t>(x.size()));
  if (set.size() < cap) {
    set.points.push_back(x);
    set.values.push_back(value);
    return;
  }
  const std::size_t far = farthest_index(set, incumbent);
  if (substitute || (x - incumbent).norm() < (set.points[far] - incumbent).norm()) {
    set.points[far] = x;
    set.values[far] = value;
  }
}

}  // namespace

InterpolationSet update_interpolation_set(InterpolationSet set, const VectorXd& incumbent,
                                          const VectorXd& trial, double trial_value,
                                          double rho, double radius, const SetUpdate& rule) {
  discard_distant(set, incumbent, rule.theta * radius);
  insert_point(set, incumbent, trial, trial_value, rho >= rule.eta0);
  return set;
}

const char* to_string(StepKind kind) noexcept {
  switch (kind) {
    case StepKind::Initial: return "initial";
    case StepKind::Step: return "step";
    case StepKind::Explore: return "explore";
    case StepKind::Repair: return "repair";
  }
  return "unknown";
}

namespace {

class Optimizer {
 public:
  Optimizer(const ScaledObjective& objective, std::size_t dim, const SdfoConfig& config,
            std::uint64_t seed)
      : objective_(objective),
        dim_(static_cast<Eigen::Index>(dim)),
        config_(config),
        bounds_(config.bounds_for(dim)),
        rng_(seeded_engine(seed, 0xDF0u)) {}

  SdfoResult run() {
    initial_set();
    result_.best_trace.push_back(result_.best_value);
    for (int k = 0; k < config_.budget; ++k) {
      if (radius_ < config_.min_radius) break;
      iterate(k);
      result_.iterations = k + 1;
      result_.best_trace.push_back(result_.best_value);
    }
    return std::move(result_);
  }

 private:
  VectorXd clip(VectorXd x) const {
    for (Eigen::Index i = 0; i < dim_; ++i) {
      const auto& b = bounds_[static_cast<std::size_t>(i)];
      x(i) = std::clamp(x(i), b.lower, b.upper);
    }
    return x;
  }

  bool inside(const VectorXd& x) const {
    return !penalty_objective(std::span<const double>(x.data(), static_cast<std::size_t>(dim_)),
                              bounds_, config_.upper_bound, config_.penalty);
  }

  double evaluate(const VectorXd& x, int iteration, StepKind kind) {
    Evaluation e;
    e.iteration = iteration;
    e.kind = kind;
    e.point = x;
    e.radius = radius_;
    const std::vector<double> key(x.data(), x.data() + x.size());
    if (auto hit = cache_.find(key); hit != cache_.end()) {
      return hit->second;
    }
    const auto penalized = penalty_objective(key, bounds_, config_.upper_bound, config_.penalty);
    if (penalized) {
      e.value = *penalized;
      e.penalized = true;
    } else {
      try {
        e.value = objective_(x);
        if (!std::isfinite(e.value)) throw std::runtime_error("objective returned a non-finite value");
      } catch (const std::exception& ex) {
        e.value = config_.upper_bound;
        e.failed = true;
        e.note = ex.what();
      }
      if (result_.best_point.size() == 0 || e.value < result_.best_value) {
        result_.best_value = e.value;
        result_.best_point = x;
      }
    }
    cache_.emplace(key, e.value);
    result_.history.push_back(std::move(e));
    return result_.history.back().value;
  }

  void mark_last(const VectorXd& x, double rho, bool accepted) {
    if (result_.history.empty() || result_.history.back().point != x) return;
    result_.history.back().rho = rho;
    result_.history.back().accepted = accepted;
  }

  void initial_set() {
    VectorXd x0(dim_);
    for (Eigen::Index i = 0; i < dim_; ++i) {
      const auto& b = bounds_[static_cast<std::size_t>(i)];
      x0(i) = config_.x0.empty() ? 0.5 * (b.lower + b.upper) : config_.x0[static_cast<std::size_t>(i)];
    }
    x0 = clip(x0);
    radius_ = config_.initial_radius;
    result_.best_value = std::numeric_limits<double>::infinity();

    std::vector<VectorXd> points{x0};
    for (Eigen::Index i = 0; i < dim_; ++i) {
      const double sign = i % 2 == 0 ? 1.0 : -1.0;
      VectorXd p = x0;
      p(i) += sign * radius_;
      p = clip(p);
      if (p == x0) {
        p = x0;
        p(i) -= sign * radius_;
        p = clip(p);
      }
      points.push_back(p);
    }
    for (const VectorXd& p : points) {
      const double v = evaluate(p, -1, StepKind::Initial);
      if (!contains(set_, p)) {
        set_.points.push_back(p);
        set_.values.push_back(v);
      }
    }
    std::size_t best = 0;
    for (std::size_t j = 1; j < set_.size(); ++j) {
      if (set_.values[j] < set_.values[best]) best = j;
    }
    incumbent_ = set_.points[best];
    f_incumbent_ = set_.values[best];
  }

  VectorXd random_direction() {
    std::normal_distribution<double> normal(0.0, 1.0);
    VectorXd u(dim_);
    do {
      for (Eigen::Index i = 0; i < dim_; ++i) u(i) = normal(rng_);
    } while (u.norm() == 0.0);
    return u / u.norm();
  }

  // An in-box point at distance `radius` from the incumbent that is not yet
  // in the set; falls back to a uniformly random in-box point.
  VectorXd fresh_point(double radius) {
    for (int attempt = 0; attempt < 32; ++attempt) {
      VectorXd p = clip(incumbent_ + radius * random_direction());
      if (!contains(set_, p) && !cache_.contains(std::vector<double>(p.data(), p.data() + dim_))) {
        return p;
      }
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    VectorXd p(dim_);
    for (Eigen::Index i = 0; i < dim_; ++i) {
      const auto& b = bounds_[static_cast<std::size_t>(i)];
      p(i) = b.lower + unit(rng_) * (b.upper - b.lower);
    }
    return p;
  }

  void move_if_better(const VectorXd& x, double value) {
    if (value < f_incumbent_) {
      incumbent_ = x;
      f_incumbent_ = value;
      mark_last(x, std::numeric_limits<double>::quiet_NaN(), true);
    }
  }

  void sample_point(int k, StepKind kind, double radius, bool replace_farthest) {
    const VectorXd p = fresh_point(radius);
    const double v = evaluate(p, k, kind);
    if (replace_farthest && set_.size() > 1) {
      const std::size_t far = farthest_index(set_, incumbent_);
      set_.points[far] = p;
      set_.values[far] = v;
    } else {
      insert_point(set_, incumbent_, p, v, true);
    }
    move_if_better(p, v);
  }

  void iterate(int k) {
    discard_distant(set_, incumbent_, config_.theta * radius_);
    if (set_.size() < static_cast<std::size_t>(dim_) + 1) {
      sample_point(k, StepKind::Repair, radius_, false);
      return;
    }
    QuadraticModel model;
    try {
      model = build_quadratic_model(set_, incumbent_);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::GeometryFailure) throw;
      sample_point(k, StepKind::Repair, radius_, true);
      return;
    }

    const VectorXd trial = solve_trust_region_subproblem(model, incumbent_, radius_);
    const double m_current = model(incumbent_);
    const double m_trial = model(trial);
    const double predicted = m_current - m_trial;
    if (!(predicted > 1e-12 * std::max(1.0, std::abs(m_current)))) {
      // No predicted decrease. A curved model with its minimum at the
      // incumbent means local convergence: shrink. A flat model means a
      // plateau of the piecewise-constant objective: widen and sample.
      const bool flat = model.g.norm() <= 1e-12 && model.H.norm() <= 1e-12;
      if (flat) {
        radius_ = std::min(config_.expand * radius_, config_.max_radius);
        sample_point(k, StepKind::Explore, radius_, false);
      } else {
        radius_ *= config_.shrink;
      }
      return;
    }

    const double f_trial = evaluate(trial, k, StepKind::Step);
    const double rho = success_ratio(f_incumbent_, f_trial, m_current, m_trial);
    set_ = update_interpolation_set(std::move(set_), incumbent_, trial, f_trial, rho, radius_,
                                    {config_.eta0, config_.theta});
    const bool improved = f_trial < f_incumbent_;
    mark_last(trial, rho, improved);
    if (rho >= config_.eta1) {
      radius_ = std::min(config_.expand * radius_, config_.max_radius);
    } else if (rho < config_.eta0 && set_.size() > static_cast<std::size_t>(dim_) + 1) {
      radius_ *= config_.shrink;
    }
    if (improved) {
      incumbent_ = trial;
      f_incumbent_ = f_trial;
    }
  }

  const ScaledObjective& objective_;
  Eigen::Index dim_;
  SdfoConfig config_;
  std::vector<Bounds> bounds_;
  std::mt19937_64 rng_;
  std::map<std::vector<double>, double> cache_;
  InterpolationSet set_;
  VectorXd incumbent_;
  double f_incumbent_ = 0.0;
  double radius_ = 0.0;
  SdfoResult result_;
};

}  // namespace

SdfoResult minimize(const ScaledObjective& objective, std::size_t dim, const SdfoConfig& config,
                    std::uint64_t seed) {
  config.validate(dim);
  return Optimizer(objective, dim, config, seed).run();
}

std::vector<double> SearchSpace::decode(const VectorXd& x) const {
  if (static_cast<std::size_t>(x.size()) != dims.size()) {
    throw Error(ErrorKind::InvalidInput, "point and search space differ in dimension");
  }
  std::vector<double> out(dims.size());
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const double xi = x(static_cast<Eigen::Index>(i));
    out[i] = dims[i].encoding ? static_cast<double>(dims[i].encoding->decode(xi)) : xi;
  }
  return out;
}

SdfoResult minimize(const DecodedObjective& objective, const SearchSpace& space,
                    const SdfoConfig& config, std::uint64_t seed) {
  const ScaledObjective scaled = [&](const VectorXd& x) { return objective(space.decode(x)); };
  SdfoResult result = minimize(scaled, space.size(), config, seed);
  for (auto& e : result.history) {
    if (!e.penalized) e.decoded = space.decode(e.point);
  }
  if (result.best_point.size()) result.best_decoded = space.decode(result.best_point);
  return result;
}

void write_history_csv(std::ostream& out, const SdfoResult& result, const SearchSpace* space) {
  const Eigen::Index dim = result.best_point.size()
                               ? result.best_point.size()
                               : (result.history.empty() ? 0 : result.history.front().point.size());
  out << "iteration,kind";
  for (Eigen::Index i = 0; i < dim; ++i) out << ",x_" << i;
  if (space) {
    for (const auto& d : space->dims) out << ',' << d.name;
  }
  out << ",value,rho,radius,accepted,note\n";
  for (const auto& e : result.history) {
    out << e.iteration << ',' << to_string(e.kind);
    for (Eigen::Index i = 0; i < dim; ++i) out << ',' << format_double(e.point(i));
    if (space) {
      for (std::size_t i = 0; i < space->dims.size(); ++i) {
        out << ',' << (i < e.decoded.size() ? format_double(e.decoded[i]) : std::string{});
      }
    }
    std::string note = e.failed ? e.note : (e.penalized ? "out of bounds" : "");
    std::replace(note.begin(), note.end(), ',', ';');
    out << ',' << format_double(e.value) << ','
        << (std::isnan(e.rho) ? std::string{} : format_double(e.rho)) << ','
        << format_double(e.radius) << ',' << (e.accepted ? 1 : 0) << ',' << note << '\n';
  }
}

}  // namespace dfocast::sdfo
