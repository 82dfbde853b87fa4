#pragma once

// Scaled trust-region derivative-free optimization over the unit box.
//
// Every variable lives in [0, 1]. Integer hyperparameters are encoded by
// splitting [0, 1) into equal sub-intervals, one per feasible value, so the
// objective is piecewise constant along those coordinates. Points outside the
// box are never handed to the objective: they are charged the upper bound c
// plus b times their distance to the nearer violated bound face.
//
// Each iteration builds a quadratic interpolation model around the incumbent
// (minimum-Frobenius-norm Hessian when the set is not yet full), minimises it
// over the trust region, and grows or shrinks the radius according to the
// ratio of actual to predicted decrease.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace dfocast::sdfo {

struct Bounds {
  double lower = 0.0;
  double upper = 1.0;
};

struct SdfoConfig {
  int budget = 50;                // iterations after the initial set
  double initial_radius = 0.25;   // z0
  double shrink = 0.5;            // gamma1
  double expand = 2.0;            // gamma2
  double eta0 = 0.1;
  double eta1 = 0.75;
  double theta = 10.0;            // discard radius factor
  double penalty = 2.0;           // b
  double upper_bound = std::numbers::pi / 2.0;  // c
  double max_radius = 1.0;
  double min_radius = 1e-6;       // stop once the radius falls below this
  std::vector<Bounds> bounds;     // empty: [0, 1] for every variable
  std::vector<double> x0;         // empty: centre of the box

  /// Checks the ordering constraints for a problem of dimension `dim`.
  void validate(std::size_t dim) const;
  std::vector<Bounds> bounds_for(std::size_t dim) const;
};

/// Ordered feasible values of one integer variable; value k owns
/// [k / n, (k + 1) / n), and x = 1 maps to the last value.
struct IntegerEncoding {
  std::vector<int> values;

  int decode(double x) const;
  std::size_t index_of(double x) const;
  /// Midpoint of the sub-interval owned by values[index].
  double centre(std::size_t index) const;
};

/// nullopt when x is inside the bounds (the true objective must be
/// evaluated); otherwise c + b * sum over violated coordinates of
/// min(|x_i - l_i|, |x_i - u_i|).
std::optional<double> penalty_objective(std::span<const double> x,
                                        std::span<const Bounds> bounds, double upper_bound,
                                        double penalty);

struct InterpolationSet {
  std::vector<Eigen::VectorXd> points;
  std::vector<double> values;

  std::size_t size() const { return points.size(); }
};

inline std::size_t full_quadratic_size(std::size_t dim) { return (dim + 1) * (dim + 2) / 2; }

/// M(x) = f + g'(x - centre) + 1/2 (x - centre)' H (x - centre).
struct QuadraticModel {
  Eigen::VectorXd centre;
  double f = 0.0;
  Eigen::VectorXd g;
  Eigen::MatrixXd H;

  double operator()(const Eigen::VectorXd& x) const;
};

/// Interpolating quadratic around `centre`. Exact when the set holds
/// (P+1)(P+2)/2 points, minimum-Frobenius-norm Hessian when it holds fewer.
/// Throws GeometryFailure when the set is not poised.
QuadraticModel build_quadratic_model(const InterpolationSet& set,
                                     const Eigen::VectorXd& centre);

/// Approximate minimiser of the model over the closed ball of `radius`
/// around `centre`; never worse than the Cauchy point.
Eigen::VectorXd solve_trust_region_subproblem(const QuadraticModel& model,
                                              const Eigen::VectorXd& centre, double radius);

/// (f(x_k) - f(x_bar)) / (M(x_k) - M(x_bar)); throws DegenerateStep when the
/// model predicts no change.
double success_ratio(double f_current, double f_trial, double m_current, double m_trial);

struct SetUpdate {
  double eta0 = 0.1;
  double theta = 10.0;
};

/// Drops points at distance >= theta * radius from the incumbent, then
/// appends the trial point while the set is below full size, or substitutes
/// it for the farthest point when the step succeeded or the trial point is
/// nearer than that farthest point.
InterpolationSet update_interpolation_set(InterpolationSet set, const Eigen::VectorXd& incumbent,
                                          const Eigen::VectorXd& trial, double trial_value,
                                          double rho, double radius, const SetUpdate& rule);

enum class StepKind { Initial, Step, Explore, Repair };
const char* to_string(StepKind kind) noexcept;

struct Evaluation {
  int iteration = -1;  // -1 for the initial set
  StepKind kind = StepKind::Initial;
  Eigen::VectorXd point;
  std::vector<double> decoded;
  double value = 0.0;
  double rho = std::numeric_limits<double>::quiet_NaN();
  double radius = 0.0;
  bool accepted = false;
  bool penalized = false;
  bool failed = false;
  std::string note;
};

struct SdfoResult {
  Eigen::VectorXd best_point;
  std::vector<double> best_decoded;
  double best_value = 0.0;
  std::vector<Evaluation> history;
  std::vector<double> best_trace;  // best value after the initial set and each iteration
  int iterations = 0;
};

using ScaledObjective = std::function<double(const Eigen::VectorXd&)>;

/// Runs the optimizer on [bounds] with a black box that receives in-bounds
/// scaled points. An objective that throws is charged the upper bound.
SdfoResult minimize(const ScaledObjective& objective, std::size_t dim, const SdfoConfig& config,
                    std::uint64_t seed);

/// One coordinate of an encoded search space: integer-encoded when
/// `encoding` is set, otherwise passed through as a continuous value.
struct SearchDimension {
  std::string name;
  std::optional<IntegerEncoding> encoding;
};

struct SearchSpace {
  std::vector<SearchDimension> dims;

  std::size_t size() const { return dims.size(); }
  std::vector<double> decode(const Eigen::VectorXd& x) const;
};

using DecodedObjective = std::function<double(const std::vector<double>&)>;

SdfoResult minimize(const DecodedObjective& objective, const SearchSpace& space,
                    const SdfoConfig& config, std::uint64_t seed);

/// CSV: iteration,kind,x_0..,<decoded names>,value,rho,radius,accepted,note
void write_history_csv(std::ostream& out, const SdfoResult& result, const SearchSpace* space);

}  // namespace dfocast::sdfo
