#pragma once

// Mean-cube-density increment for the upper bound.
//
// b(H) = E_g alpha(H+g)^3 is nondecreasing under refinement and bounded by
// alpha. When the nontrivial 3-AP density inside the cosets of H is below
// alpha^3 - eps, refining each coset by an eta-weakly-regular subspace
// yields H' with b(H') >= 2 b(H) - E_j lambda(H_j) - 6 eta.

#include <apd/apstats.hpp>
#include <apd/error.hpp>
#include <apd/fourier.hpp>
#include <apd/regularity.hpp>
#include <apd/space.hpp>
#include <apd/tower.hpp>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace apd {

/// Raised when E_j lambda(H_j) >= alpha^3 - eps: the subspace already
/// carries nontrivial 3-APs at the random rate.
class LambdaPreconditionError : public Error {
 public:
  LambdaPreconditionError(double measured, double threshold)
      : Error(ErrorKind::PreconditionFailed, "mean nontrivial 3-AP density " + std::to_string(measured) +
                                                 " is not below alpha^3 - eps = " + std::to_string(threshold)),
        measured_(measured),
        threshold_(threshold) {}

  double measured() const { return measured_; }
  double threshold() const { return threshold_; }

 private:
  double measured_;
  double threshold_;
};

inline double mean_cube_density(const GFunction& f, const CosetPartition& part) {
  const std::vector<Index> label = part.labels();
  std::vector<double> sums(part.count(), 0.0);
  for (Index x = 0; x < f.size(); ++x) sums[label[x]] += f[x];
  const double inv = 1.0 / static_cast<double>(part.subspace().size());
  double acc = 0.0;
  for (double s : sums) {
    const double a = s * inv;
    acc += a * a * a;
  }
  return acc / static_cast<double>(part.count());
}

inline double mean_cube_density(const GFunction& f, const Subspace& h) { return mean_cube_density(f, cosets(h)); }

struct StepRecord {
  unsigned codim = 0;
  double b = 0.0;
  /// E_j lambda(H_j); NaN when |H| < 2.
  double mean_lambda = std::numeric_limits<double>::quiet_NaN();
  double eta = 0.0;
};

struct IncrementBudget {
  unsigned max_steps = 16;
  Index max_cosets = Index{1} << 16;
};

struct StepResult {
  Subspace next;
  StepRecord record;     ///< statistics of the input subspace
  double b_next = 0.0;
  double b_floor = 0.0;  ///< 2 b(H) - E_j lambda(H_j) - 6 eta
  unsigned codim_ceiling = 0;
};

/// One increment: per coset H_j, an eta-weakly-regular linear subspace T_j
/// of the coset-translated function (codim floor(eta^-2) capped at dim H),
/// then H' = H cap (cap_j T_j). Both postconditions are asserted.
inline StepResult increment_step(const GFunction& f, const Subspace& h, double eps, double eta,
                                 const IncrementBudget& budget = {}) {
  require(eta > 0.0 && eta <= 1.0, ErrorKind::InvalidArgument, "eta must lie in (0, 1]");
  const Space& space = f.space();
  require(h.space() == space, ErrorKind::InvalidArgument, "subspace of a different space");
  const double alpha = f.density();
  const double size = static_cast<double>(h.size());
  require(h.size() >= 2 && size > alpha / (3.0 * eta), ErrorKind::SubspaceTooSmall,
          "|H| = " + std::to_string(h.size()) + " does not exceed alpha/(3 eta) = " +
              std::to_string(alpha / (3.0 * eta)));
  const unsigned per_coset = inverse_square_floor(eta);
  const Index coset_count = space.place(h.codim());
  require(coset_count <= budget.max_cosets, ErrorKind::BudgetExceeded,
          std::to_string(coset_count) + " cosets exceed the step budget");

  const CosetPartition part(h, budget.max_cosets);
  StepResult out;
  out.record.codim = h.codim();
  out.record.eta = eta;
  out.record.b = mean_cube_density(f, part);
  out.record.mean_lambda = mean_lambda_over_cosets(f, part);
  const double threshold = alpha * alpha * alpha - eps;
  if (out.record.mean_lambda >= threshold) throw LambdaPreconditionError(out.record.mean_lambda, threshold);

  std::vector<Subspace::Row> rows = h.rows();
  const std::vector<unsigned>& free = h.free_columns();
  for (Point g : part.representatives()) {
    const GFunction local = restrict_to_coset(f, h, g);
    const RegularityCertificate cert = weak_regular_subspace(local, eta, true);
    for (const Subspace::Row& r : cert.subspace.rows()) {
      Subspace::Row lifted(space.n(), 0);
      for (std::size_t j = 0; j < free.size(); ++j) lifted[free[j]] = r[j];
      rows.push_back(std::move(lifted));
    }
  }
  out.next = Subspace::from_rows(space, std::move(rows));
  out.b_next = mean_cube_density(f, out.next);

  const double ceiling = static_cast<double>(h.codim()) + static_cast<double>(per_coset) * static_cast<double>(coset_count);
  out.codim_ceiling = static_cast<unsigned>(std::min<double>(ceiling, space.n()));
  out.b_floor = 2.0 * out.record.b - out.record.mean_lambda - 6.0 * eta;
  require(out.next.codim() <= ceiling, ErrorKind::CertificationFailed, "codimension bound violated");
  require(out.b_next >= out.b_floor - 1e-12, ErrorKind::CertificationFailed,
          "b(H') = " + std::to_string(out.b_next) + " below 2b(H) - E lambda - 6 eta = " + std::to_string(out.b_floor));
  return out;
}

enum class Termination { SmallSubspace, PreconditionFailed, Budget };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::SmallSubspace: return "SmallSubspace";
    case Termination::PreconditionFailed: return "PreconditionFailed";
    case Termination::Budget: return "Budget";
  }
  return "Unknown";
}

struct IncrementTrace {
  std::vector<StepRecord> steps;
  Termination termination = Termination::Budget;
  Subspace final_subspace;
};

/// Iterates increment_step from H_0 = G. eta_schedule[i] is used at step i,
/// the last entry repeating. A step that does not refine H ends the run
/// with Budget, since every later step would repeat it.
inline IncrementTrace run_increment(const GFunction& f, double eps, const std::vector<double>& eta_schedule,
                                    const IncrementBudget& budget = {}) {
  require(!eta_schedule.empty(), ErrorKind::InvalidArgument, "empty eta schedule");
  const double alpha = f.density();
  const double threshold = alpha * alpha * alpha - eps;
  IncrementTrace trace;
  Subspace h = Subspace::whole(f.space());
  for (unsigned i = 0;; ++i) {
    const double eta = eta_schedule[std::min<std::size_t>(i, eta_schedule.size() - 1)];
    StepRecord rec;
    rec.codim = h.codim();
    rec.eta = eta;
    const Index coset_count = f.space().place(h.codim());
    if (coset_count > budget.max_cosets) {
      trace.steps.push_back(rec);
      trace.termination = Termination::Budget;
      break;
    }
    const CosetPartition part(h, budget.max_cosets);
    rec.b = mean_cube_density(f, part);
    const double size = static_cast<double>(h.size());
    if (h.size() >= 2) rec.mean_lambda = mean_lambda_over_cosets(f, part);
    trace.steps.push_back(rec);

    if (h.size() < 2 || size <= alpha / (3.0 * eta)) {
      trace.termination = Termination::SmallSubspace;
      break;
    }
    if (rec.mean_lambda >= threshold) {
      trace.termination = Termination::PreconditionFailed;
      break;
    }
    if (i >= budget.max_steps) {
      trace.termination = Termination::Budget;
      break;
    }
    StepResult step;
    try {
      step = increment_step(f, h, eps, eta, budget);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::BudgetExceeded) throw;
      trace.termination = Termination::Budget;
      break;
    }
    if (step.next == h) {
      trace.termination = Termination::Budget;
      break;
    }
    h = std::move(step.next);
  }
  trace.final_subspace = h;
  return trace;
}

struct UpperBoundPlan {
  unsigned p = 3;
  double epsilon = 0.0;
  double alpha = 0.0;
  /// ceil(log2((alpha - alpha^3)/eps)) + 5.
  unsigned height = 0;
  TowerValue bound;  ///< tower of p's of that height with 1/eps on top
  /// Largest i with alpha^3 + (2^i - 1) eps/2 <= alpha.
  unsigned max_increments = 0;
  std::vector<PlanCheck> checks;
};

/// Tower-height bound for the upper-bound iteration, with the codimension
/// recursion c_{i+1} = c_i + p^{c_i} 144/eps^2 checked against
/// 2 c_{i+1} <= max(145^2 eps^-4, p^{2 c_i}) in log space for every step
/// whose c_i is representable.
inline UpperBoundPlan plan_upper_bound(unsigned p, double eps, double alpha) {
  require(is_odd_prime(p), ErrorKind::InvalidArgument, "p must be an odd prime");
  require(alpha > 0.0 && alpha <= 1.0, ErrorKind::InvalidArgument, "alpha must lie in (0, 1]");
  const double gap = alpha - alpha * alpha * alpha;
  require(eps > 0.0 && eps <= gap, ErrorKind::InvalidArgument,
          "epsilon must lie in (0, alpha - alpha^3 = " + std::to_string(gap) + "]");
  UpperBoundPlan plan;
  plan.p = p;
  plan.epsilon = eps;
  plan.alpha = alpha;
  const double ratio = gap / eps;
  plan.height = static_cast<unsigned>(std::max(0.0, std::ceil(std::log2(ratio)))) + 5;
  plan.bound = TowerValue::tower(p, plan.height, 1.0 / eps);

  unsigned s = 0;
  while (s < 4096 && alpha * alpha * alpha + (std::ldexp(1.0, static_cast<int>(s) + 1) - 1.0) * eps / 2.0 <= alpha) ++s;
  plan.max_increments = s;
  plan.checks.push_back({"increments_within_log_ratio", static_cast<double>(s) <= 2.0 + std::log2(ratio),
                         static_cast<double>(s), 2.0 + std::log2(ratio), "s <= 2 + log2((alpha - alpha^3)/eps)"});

  // With K = 144/eps^2: ln(2 c') = ln 2 + c ln p + ln K + log1p(c p^-c / K)
  // for c' = c + p^c K. The gap to 2 c ln p grows with c, and c_i >= c_1 = K
  // for i >= 1, so step 0 and the step from c = K cover the whole chain.
  const double lp = std::log(static_cast<double>(p));
  const double log_k = std::log(144.0) - 2.0 * std::log(eps);
  const double log_cap = 2.0 * std::log(145.0) - 4.0 * std::log(eps);
  auto log_twice_next = [&](double c) {
    return std::log(2.0) + c * lp + log_k + std::log1p(c * std::exp(-c * lp - log_k));
  };
  const double lhs0 = log_twice_next(0.0), rhs0 = std::max(log_cap, 0.0);
  const double c1 = std::exp(log_k);
  const double lhs1 = log_twice_next(c1), rhs1 = std::max(log_cap, 2.0 * c1 * lp);
  plan.checks.push_back({"codim_recursion_step0", lhs0 <= rhs0 + 1e-12, lhs0, rhs0,
                         "2 Codim(H_1) <= max(145^2 eps^-4, 1)"});
  plan.checks.push_back({"codim_recursion_later_steps", lhs1 <= rhs1 + 1e-12, lhs1, rhs1,
                         "2 Codim(H_{i+1}) <= max(145^2 eps^-4, p^{2 Codim(H_i)}) at Codim(H_i) = 144/eps^2"});

  const TowerValue cap = TowerValue::exact(p, std::exp(log_cap));
  const TowerValue three = TowerValue::tower(p, 3, 1.0 / eps);
  plan.checks.push_back({"cap_below_height3_tower", cap < three, log_cap, 0.0, "145^2 eps^-4 < p^p^p^(1/eps)"});
  return plan;
}

}  // namespace apd
