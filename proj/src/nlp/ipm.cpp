#include "nprace/nlp/ipm.hpp"

#include <Eigen/SparseCore>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "nprace/errors.hpp"

namespace nprace::nlp {

const char* status_name(IpmStatus s) {
  switch (s) {
    case IpmStatus::Converged:
      return "converged";
    case IpmStatus::MaxIterations:
      return "max_iterations";
    case IpmStatus::LineSearchFailed:
      return "line_search_failed";
    case IpmStatus::EvaluationFailed:
      return "evaluation_failed";
    case IpmStatus::FactorizationFailed:
      return "factorization_failed";
  }
  return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Line-search and barrier constants.
constexpr double kKappaEps = 10.0;
constexpr double kKappaMu = 0.2;
constexpr double kThetaMu = 1.5;
constexpr double kTauMin = 0.99;
constexpr double kKappaSigma = 1e10;
constexpr double kGammaTheta = 1e-5;
constexpr double kGammaPhi = 1e-8;
constexpr double kDelta = 1.0;
constexpr double kSTheta = 1.1;
constexpr double kSPhi = 2.3;
constexpr double kEtaPhi = 1e-8;
constexpr double kGammaAlpha = 0.05;
constexpr double kDeltaC = 1e-9;
constexpr double kDeltaWFloor = 1e-8;
constexpr double kLsqMultMax = 1e3;
constexpr double kEpsMachine = std::numeric_limits<double>::epsilon();
constexpr int kMaxSoc = 4;
constexpr int kWatchdogShortened = 10;
constexpr int kWatchdogTrials = 3;

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

struct Evaluation {
  double f = 0.0;   // scaled objective
  VectorXd c;       // scaled constraint values
  bool ok = false;
};

class Solver {
 public:
  Solver(const Problem& p, const IpmOptions& o) : p_(p), o_(o), kkt_(make_kkt_solver(o.backend)) {}

  IpmResult run();

 private:
  // Setup.
  void setup();
  void compute_scaling(const VectorXd& x0);
  VectorXd push_inside(const VectorXd& v, const VectorXd& lo, const VectorXd& hi) const;

  // Evaluation helpers.
  Evaluation evaluate(const VectorXd& w) const;
  VectorXd residual(const VectorXd& w, const VectorXd& c) const;
  void eval_derivatives(const VectorXd& w);
  VectorXd at_y(const VectorXd& y) const;  // A^T y (length N)
  double barrier(const VectorXd& w, double f) const;
  VectorXd barrier_gradient(const VectorXd& w) const;  // grad f - mu/(w-l) + mu/(u-w)

  // Linear algebra.
  bool factor_kkt(const VectorXd& sigma, double delta_w, double delta_c, bool with_hessian);
  bool factor_with_inertia_correction(const VectorXd& sigma);
  VectorXd solve_kkt(const VectorXd& rhs) const;

  // Optimality measures.
  double optimality_error(double mu) const;
  double unscaled_violation(const VectorXd& x) const;
  VectorXd sigma() const;
  double fraction_to_boundary(const VectorXd& v, const VectorXd& dv, const VectorXd& lo, const VectorXd& hi,
                              double tau) const;
  double fraction_to_boundary_z(const VectorXd& z, const VectorXd& dz, double tau) const;
  void reset_multipliers_bounds();
  void least_squares_multipliers();
  void protect_slacks();

  bool line_search(const VectorXd& dw, const VectorXd& dy, const VectorXd& dzl, const VectorXd& dzu,
                   const VectorXd& rhs_w, double& alpha_out);
  bool restoration();
  enum class WatchdogOutcome { Accepted, Continue, Reverted, Failed };
  WatchdogOutcome watchdog_step(const VectorXd& dw, const VectorXd& dy, const VectorXd& dzl, const VectorXd& dzu);
  bool filter_acceptable(double theta, double phi) const;

  void log(const std::string& line) const {
    if (o_.verbosity <= 0) return;
    if (o_.log) {
      o_.log(line);
    } else {
      std::fprintf(stderr, "%s\n", line.c_str());
    }
  }

  const Problem& p_;
  IpmOptions o_;
  std::unique_ptr<KktSolver> kkt_;

  int n_ = 0, m_ = 0, mi_ = 0, nw_ = 0;
  VectorXd x_lo_, x_hi_, c_lo_, c_hi_;
  std::vector<int> slot_;  // row -> slack index or -1
  std::vector<int> slack_row_;
  double sf_ = 1.0;
  VectorXd sc_;
  VectorXd lw_, uw_;  // bounds on w
  std::vector<char> has_l_, has_u_;
  int num_bounds_ = 0;

  // Current iterate.
  VectorXd w_, y_, zl_, zu_;
  Evaluation ev_;
  VectorXd r_;
  VectorXd grad_;    // scaled objective gradient (N)
  VectorXd jac_;     // scaled Jacobian values in structure order
  VectorXd hess_;    // Hessian values in structure order
  double mu_ = 0.1;
  double tau_ = kTauMin;
  double delta_w_last_ = 0.0;
  double delta_w_ = 0.0;
  // Watchdog: after repeated short steps, try full steps for a few
  // iterations and fall back to the saved iterate if they do not pay off.
  struct Saved {
    VectorXd w, y, zl, zu, r;
    Evaluation ev;
    std::vector<std::pair<double, double>> filter;
    double theta = 0.0, phi = 0.0, gd = 0.0;
  };
  int shortened_ = 0;
  int watchdog_trials_ = -1;  // < 0 when inactive
  bool watchdog_blocked_ = false;
  Saved saved_;
  double theta_max_ = kInf, theta_min_ = 0.0;
  std::vector<std::pair<double, double>> filter_;
  std::vector<Triplet> triplets_;
  SpMat kkt_lower_;
  SpMat kkt_exact_;
};

VectorXd Solver::push_inside(const VectorXd& v, const VectorXd& lo, const VectorXd& hi) const {
  VectorXd out = v;
  const double k = o_.bound_push;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const bool hl = std::isfinite(lo(i)), hu = std::isfinite(hi(i));
    if (hl && hu) {
      const double pl = std::min(k * std::max(1.0, std::abs(lo(i))), k * (hi(i) - lo(i)));
      const double pu = std::min(k * std::max(1.0, std::abs(hi(i))), k * (hi(i) - lo(i)));
      out(i) = std::clamp(out(i), lo(i) + pl, hi(i) - pu);
    } else if (hl) {
      out(i) = std::max(out(i), lo(i) + k * std::max(1.0, std::abs(lo(i))));
    } else if (hu) {
      out(i) = std::min(out(i), hi(i) - k * std::max(1.0, std::abs(hi(i))));
    }
  }
  return out;
}

void Solver::setup() {
  n_ = p_.num_variables();
  m_ = p_.num_constraints();
  p_.variable_bounds(x_lo_, x_hi_);
  p_.constraint_bounds(c_lo_, c_hi_);
  if (x_lo_.size() != n_ || x_hi_.size() != n_ || c_lo_.size() != m_ || c_hi_.size() != m_) {
    throw DomainError("problem bounds have inconsistent sizes");
  }
  for (int i = 0; i < n_; ++i) {
    if (x_lo_(i) > x_hi_(i)) throw DomainError("variable " + std::to_string(i) + " has empty bounds");
  }
  slot_.assign(m_, -1);
  slack_row_.clear();
  for (int i = 0; i < m_; ++i) {
    if (c_lo_(i) > c_hi_(i)) throw DomainError("constraint " + std::to_string(i) + " has empty bounds");
    if (c_lo_(i) != c_hi_(i)) {
      slot_[i] = static_cast<int>(slack_row_.size());
      slack_row_.push_back(i);
    }
  }
  mi_ = static_cast<int>(slack_row_.size());
  nw_ = n_ + mi_;
}

void Solver::compute_scaling(const VectorXd& x0) {
  sf_ = 1.0;
  sc_ = VectorXd::Ones(m_);
  if (!o_.gradient_scaling) return;
  VectorXd g(n_);
  p_.gradient(x0, g);
  const double gmax = g.lpNorm<Eigen::Infinity>();
  if (std::isfinite(gmax) && gmax > o_.max_gradient) sf_ = o_.max_gradient / gmax;
  VectorXd vals(p_.jacobian_structure().size());
  p_.jacobian_values(x0, vals);
  VectorXd rowmax = VectorXd::Zero(m_);
  const auto& js = p_.jacobian_structure();
  for (std::size_t k = 0; k < js.size(); ++k) {
    rowmax(js[k].first) = std::max(rowmax(js[k].first), std::abs(vals(k)));
  }
  for (int i = 0; i < m_; ++i) {
    if (std::isfinite(rowmax(i)) && rowmax(i) > o_.max_gradient) sc_(i) = o_.max_gradient / rowmax(i);
  }
}

Evaluation Solver::evaluate(const VectorXd& w) const {
  Evaluation e;
  const VectorXd x = w.head(n_);
  try {
    e.f = sf_ * p_.objective(x);
    VectorXd c(m_);
    p_.constraints(x, c);
    e.c = sc_.cwiseProduct(c);
  } catch (const Error&) {
    return e;
  }
  e.ok = std::isfinite(e.f) && e.c.allFinite();
  return e;
}

VectorXd Solver::residual(const VectorXd& w, const VectorXd& c) const {
  VectorXd r(m_);
  for (int i = 0; i < m_; ++i) {
    r(i) = slot_[i] < 0 ? c(i) - sc_(i) * c_lo_(i) : c(i) - w(n_ + slot_[i]);
  }
  return r;
}

void Solver::eval_derivatives(const VectorXd& w) {
  const VectorXd x = w.head(n_);
  VectorXd g(n_);
  p_.gradient(x, g);
  grad_ = VectorXd::Zero(nw_);
  grad_.head(n_) = sf_ * g;
  const auto& js = p_.jacobian_structure();
  jac_.resize(static_cast<Eigen::Index>(js.size()));
  p_.jacobian_values(x, jac_);
  for (std::size_t k = 0; k < js.size(); ++k) jac_(k) *= sc_(js[k].first);
  if (!grad_.allFinite() || !jac_.allFinite()) throw NonconvergenceError("non-finite derivatives");
}

VectorXd Solver::at_y(const VectorXd& y) const {
  VectorXd out = VectorXd::Zero(nw_);
  const auto& js = p_.jacobian_structure();
  for (std::size_t k = 0; k < js.size(); ++k) out(js[k].second) += jac_(k) * y(js[k].first);
  for (int j = 0; j < mi_; ++j) out(n_ + j) -= y(slack_row_[j]);
  return out;
}

double Solver::barrier(const VectorXd& w, double f) const {
  double phi = f;
  for (int i = 0; i < nw_; ++i) {
    if (has_l_[i]) phi -= mu_ * std::log(w(i) - lw_(i));
    if (has_u_[i]) phi -= mu_ * std::log(uw_(i) - w(i));
  }
  return phi;
}

VectorXd Solver::barrier_gradient(const VectorXd& w) const {
  VectorXd g = grad_;
  for (int i = 0; i < nw_; ++i) {
    if (has_l_[i]) g(i) -= mu_ / (w(i) - lw_(i));
    if (has_u_[i]) g(i) += mu_ / (uw_(i) - w(i));
  }
  return g;
}

VectorXd Solver::sigma() const {
  VectorXd s = VectorXd::Zero(nw_);
  for (int i = 0; i < nw_; ++i) {
    if (has_l_[i]) s(i) += zl_(i) / (w_(i) - lw_(i));
    if (has_u_[i]) s(i) += zu_(i) / (uw_(i) - w_(i));
  }
  return s;
}

bool Solver::factor_kkt(const VectorXd& sig, double delta_w, double delta_c, bool with_hessian) {
  const int dim = nw_ + m_;
  triplets_.clear();
  // Hessian entries are always present so the sparsity pattern never changes.
  const auto& hs = p_.hessian_structure();
  for (std::size_t k = 0; k < hs.size(); ++k) {
    triplets_.emplace_back(hs[k].first, hs[k].second, with_hessian ? hess_(k) : 0.0);
  }
  for (int i = 0; i < nw_; ++i) triplets_.emplace_back(i, i, sig(i) + delta_w);
  const auto& js = p_.jacobian_structure();
  for (std::size_t k = 0; k < js.size(); ++k) triplets_.emplace_back(nw_ + js[k].first, js[k].second, jac_(k));
  for (int j = 0; j < mi_; ++j) triplets_.emplace_back(nw_ + slack_row_[j], n_ + j, -1.0);
  const std::size_t exact_end = triplets_.size();
  for (int i = 0; i < m_; ++i) triplets_.emplace_back(nw_ + i, nw_ + i, -delta_c);
  kkt_lower_.resize(dim, dim);
  kkt_lower_.setFromTriplets(triplets_.begin(), triplets_.end());
  // Unregularized-in-c matrix (full symmetric) for iterative refinement.
  SpMat lower_exact(dim, dim);
  lower_exact.setFromTriplets(triplets_.begin(), triplets_.begin() + static_cast<std::ptrdiff_t>(exact_end));
  SpMat strict = lower_exact.triangularView<Eigen::StrictlyLower>();
  kkt_exact_ = lower_exact + SpMat(strict.transpose());
  return kkt_->factor(kkt_lower_);
}

bool Solver::factor_with_inertia_correction(const VectorXd& sig) {
  auto good = [&]() {
    const Inertia in = kkt_->inertia();
    return in.positive == nw_ && in.negative == m_ && in.zero == 0;
  };
  // A tiny floor keeps structurally zero diagonals from producing exact zero pivots.
  double dw = kDeltaWFloor;
  if (factor_kkt(sig, dw, kDeltaC, true) && good()) {
    delta_w_ = dw;
    return true;
  }
  dw = delta_w_last_ == 0.0 ? 1e-4 : std::max(kDeltaWFloor, delta_w_last_ / 3.0);
  for (int k = 0; k < 60; ++k) {
    if (factor_kkt(sig, dw, kDeltaC, true) && good()) {
      delta_w_ = dw;
      delta_w_last_ = dw;
      return true;
    }
    dw *= delta_w_last_ == 0.0 ? 100.0 : 8.0;
    if (dw > 1e40) break;
  }
  return false;
}

VectorXd Solver::solve_kkt(const VectorXd& rhs) const {
  VectorXd d = kkt_->solve(rhs);
  for (int k = 0; k < 3; ++k) {
    const VectorXd res = rhs - kkt_exact_ * d;
    if (res.lpNorm<Eigen::Infinity>() <= 1e-14 * (1.0 + rhs.lpNorm<Eigen::Infinity>())) break;
    d += kkt_->solve(res);
  }
  return d;
}

double Solver::optimality_error(double mu) const {
  constexpr double smax = 100.0;
  VectorXd rd = grad_ + at_y(y_) - zl_ + zu_;
  double compl_err = 0.0;
  double zsum = 0.0;
  for (int i = 0; i < nw_; ++i) {
    if (has_l_[i]) compl_err = std::max(compl_err, std::abs((w_(i) - lw_(i)) * zl_(i) - mu));
    if (has_u_[i]) compl_err = std::max(compl_err, std::abs((uw_(i) - w_(i)) * zu_(i) - mu));
    zsum += zl_(i) + zu_(i);
  }
  const double nb = std::max(1, num_bounds_);
  const double sd = std::max(smax, (y_.lpNorm<1>() + zsum) / (m_ + nb)) / smax;
  const double scmp = std::max(smax, zsum / nb) / smax;
  const double primal = m_ > 0 ? r_.lpNorm<Eigen::Infinity>() : 0.0;
  return std::max({rd.lpNorm<Eigen::Infinity>() / sd, primal, compl_err / scmp});
}

double Solver::unscaled_violation(const VectorXd& x) const {
  double v = 0.0;
  for (int i = 0; i < n_; ++i) v = std::max({v, x_lo_(i) - x(i), x(i) - x_hi_(i)});
  VectorXd c(m_);
  try {
    p_.constraints(x, c);
  } catch (const Error&) {
    return kInf;
  }
  for (int i = 0; i < m_; ++i) v = std::max({v, c_lo_(i) - c(i), c(i) - c_hi_(i)});
  return v;
}

double Solver::fraction_to_boundary(const VectorXd& v, const VectorXd& dv, const VectorXd& lo, const VectorXd& hi,
                                    double tau) const {
  double a = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::isfinite(lo(i)) && dv(i) < 0.0) a = std::min(a, -tau * (v(i) - lo(i)) / dv(i));
    if (std::isfinite(hi(i)) && dv(i) > 0.0) a = std::min(a, tau * (hi(i) - v(i)) / dv(i));
  }
  return a;
}

double Solver::fraction_to_boundary_z(const VectorXd& z, const VectorXd& dz, double tau) const {
  double a = 1.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (dz(i) < 0.0 && z(i) > 0.0) a = std::min(a, -tau * z(i) / dz(i));
  }
  return a;
}

void Solver::protect_slacks() {
  // Roundoff can put an iterate on its bound; relax that bound a little.
  constexpr double eps = 1e-14;
  for (int i = 0; i < nw_; ++i) {
    if (has_l_[i] && w_(i) - lw_(i) < eps * std::max(1.0, std::abs(lw_(i)))) {
      lw_(i) -= std::pow(kEpsMachine, 0.75) * std::max(1.0, std::abs(lw_(i)));
    }
    if (has_u_[i] && uw_(i) - w_(i) < eps * std::max(1.0, std::abs(uw_(i)))) {
      uw_(i) += std::pow(kEpsMachine, 0.75) * std::max(1.0, std::abs(uw_(i)));
    }
  }
}

void Solver::least_squares_multipliers() {
  if (m_ == 0 || !factor_kkt(VectorXd::Ones(nw_), 0.0, kDeltaC, false)) return;
  VectorXd rhs = VectorXd::Zero(nw_ + m_);
  rhs.head(nw_) = -(grad_ - zl_ + zu_);
  const VectorXd ylsq = solve_kkt(rhs).tail(m_);
  y_ = ylsq.allFinite() && ylsq.lpNorm<Eigen::Infinity>() <= kLsqMultMax ? ylsq : VectorXd::Zero(m_);
}

void Solver::reset_multipliers_bounds() {
  for (int i = 0; i < nw_; ++i) {
    if (has_l_[i]) {
      const double sl = w_(i) - lw_(i);
      zl_(i) = std::clamp(zl_(i), mu_ / (kKappaSigma * sl), kKappaSigma * mu_ / sl);
    }
    if (has_u_[i]) {
      const double su = uw_(i) - w_(i);
      zu_(i) = std::clamp(zu_(i), mu_ / (kKappaSigma * su), kKappaSigma * mu_ / su);
    }
  }
}

bool Solver::filter_acceptable(double theta, double phi) const {
  for (const auto& [ft, fp] : filter_) {
    if (theta >= ft && phi >= fp) return false;
  }
  return true;
}

bool Solver::line_search(const VectorXd& dw, const VectorXd& dy, const VectorXd& dzl, const VectorXd& dzu,
                         const VectorXd& rhs_w, double& alpha_out) {
  const double theta = r_.lpNorm<1>();
  const double phi = barrier(w_, ev_.f);
  const VectorXd gphi = barrier_gradient(w_);
  const double gd = gphi.dot(dw);
  const double alpha_max = fraction_to_boundary(w_, dw, lw_, uw_, tau_);

  double alpha_min = kGammaTheta;
  if (gd < 0.0) {
    alpha_min = std::min({kGammaTheta, kGammaPhi * theta / (-gd),
                          kDelta * std::pow(theta, kSTheta) / std::pow(-gd, kSPhi)});
  }
  alpha_min *= kGammaAlpha;

  auto accept_test = [&](double alpha, double theta_t, double phi_t, bool& f_type) {
    if (!(theta_t <= theta_max_)) return false;
    if (!filter_acceptable(theta_t, phi_t)) return false;
    const bool switching = gd < 0.0 && alpha * std::pow(-gd, kSPhi) > kDelta * std::pow(theta, kSTheta);
    if (theta <= theta_min_ && switching) {
      f_type = true;
      return phi_t <= phi + kEtaPhi * alpha * gd;
    }
    f_type = false;
    return theta_t <= (1.0 - kGammaTheta) * theta || phi_t <= phi - kGammaPhi * theta;
  };

  auto commit = [&](const VectorXd& w_new, const VectorXd& y_new, double alpha, const Evaluation& e, bool f_type) {
    if (!f_type) filter_.emplace_back((1.0 - kGammaTheta) * theta, phi - kGammaPhi * theta);
    const double alpha_z = std::min(fraction_to_boundary_z(zl_, dzl, tau_), fraction_to_boundary_z(zu_, dzu, tau_));
    w_ = w_new;
    y_ = y_new;
    zl_ += alpha_z * dzl;
    zu_ += alpha_z * dzu;
    ev_ = e;
    r_ = residual(w_, ev_.c);
    protect_slacks();
    alpha_out = alpha;
  };

  double alpha = alpha_max;
  for (int trial = 0; trial < 60; ++trial) {
    const VectorXd wt = w_ + alpha * dw;
    const Evaluation e = evaluate(wt);
    if (e.ok) {
      const VectorXd rt = residual(wt, e.c);
      const double theta_t = rt.lpNorm<1>();
      const double phi_t = barrier(wt, e.f);
      bool f_type = false;
      if (accept_test(alpha, theta_t, phi_t, f_type)) {
        commit(wt, y_ + alpha * dy, alpha, e, f_type);
        return true;
      }
      // Second-order correction on the first trial.
      if (trial == 0 && theta_t >= theta) {
        VectorXd csoc = alpha * r_ + rt;
        double theta_old = theta;
        for (int k = 0; k < kMaxSoc; ++k) {
          VectorXd rhs(nw_ + m_);
          rhs.head(nw_) = rhs_w;
          rhs.tail(m_) = -csoc;
          const VectorXd d = solve_kkt(rhs);
          const VectorXd dws = d.head(nw_);
          const double as = fraction_to_boundary(w_, dws, lw_, uw_, tau_);
          const VectorXd ws = w_ + as * dws;
          const Evaluation es = evaluate(ws);
          if (!es.ok) break;
          const VectorXd rs = residual(ws, es.c);
          const double theta_s = rs.lpNorm<1>();
          const double phi_s = barrier(ws, es.f);
          bool ft = false;
          if (accept_test(alpha, theta_s, phi_s, ft)) {
            commit(ws, y_ + as * d.tail(m_), as, es, ft);
            return true;
          }
          if (theta_s > 0.99 * theta_old) break;
          theta_old = theta_s;
          csoc = as * csoc + rs;
        }
      }
    }
    alpha *= 0.5;
    if (alpha < alpha_min) break;
  }
  return false;
}

Solver::WatchdogOutcome Solver::watchdog_step(const VectorXd& dw, const VectorXd& dy, const VectorXd& dzl,
                                              const VectorXd& dzu) {
  if (watchdog_trials_ == 0) {
    saved_ = {w_, y_, zl_, zu_, r_, ev_, filter_, r_.lpNorm<1>(), barrier(w_, ev_.f), barrier_gradient(w_).dot(dw)};
  }
  const double alpha = fraction_to_boundary(w_, dw, lw_, uw_, tau_);
  const VectorXd wt = w_ + alpha * dw;
  const Evaluation e = evaluate(wt);
  auto revert = [&]() {
    w_ = saved_.w;
    y_ = saved_.y;
    zl_ = saved_.zl;
    zu_ = saved_.zu;
    r_ = saved_.r;
    ev_ = saved_.ev;
    filter_ = saved_.filter;
    watchdog_trials_ = -1;
    watchdog_blocked_ = true;
    shortened_ = 0;
  };
  if (!e.ok) {
    revert();
    return WatchdogOutcome::Reverted;
  }
  const VectorXd rt = residual(wt, e.c);
  const double theta_t = rt.lpNorm<1>(), phi_t = barrier(wt, e.f);
  const Saved& ref = saved_;
  bool ok = theta_t <= theta_max_ && filter_acceptable(theta_t, phi_t);
  if (ok) {
    const bool switching = ref.gd < 0.0 && std::pow(-ref.gd, kSPhi) > kDelta * std::pow(ref.theta, kSTheta);
    if (ref.theta <= theta_min_ && switching) {
      ok = phi_t <= ref.phi + kEtaPhi * ref.gd;
    } else {
      ok = theta_t <= (1.0 - kGammaTheta) * ref.theta || phi_t <= ref.phi - kGammaPhi * ref.theta;
    }
  }
  const bool last = ++watchdog_trials_ >= kWatchdogTrials;
  if (!ok && last) {
    revert();
    return WatchdogOutcome::Reverted;
  }
  const double alpha_z = std::min(fraction_to_boundary_z(zl_, dzl, tau_), fraction_to_boundary_z(zu_, dzu, tau_));
  w_ = wt;
  y_ += alpha * dy;
  zl_ += alpha_z * dzl;
  zu_ += alpha_z * dzu;
  ev_ = e;
  r_ = rt;
  protect_slacks();
  if (ok) {
    watchdog_trials_ = -1;
    shortened_ = 0;
    return WatchdogOutcome::Accepted;
  }
  return WatchdogOutcome::Continue;
}

bool Solver::restoration() {
  // Gauss-Newton steps on the constraint residual in the barrier metric,
  // until the point is acceptable to the filter with reduced infeasibility.
  const double theta0 = r_.lpNorm<1>();
  const double phi0 = barrier(w_, ev_.f);
  filter_.emplace_back((1.0 - kGammaTheta) * theta0, phi0 - kGammaPhi * theta0);
  for (int it = 0; it < 100; ++it) {
    const VectorXd sig = sigma();
    const double xi = std::sqrt(mu_);
    bool factored = false;
    for (double dc = kDeltaC; dc <= 1e-2 && !factored; dc *= 100.0) {
      factored = factor_kkt(sig + VectorXd::Constant(nw_, xi), 0.0, dc, false);
    }
    if (!factored) {
      log("restoration: factorization failed");
      return false;
    }
    VectorXd rhs = VectorXd::Zero(nw_ + m_);
    rhs.tail(m_) = -r_;
    const VectorXd d = solve_kkt(rhs);
    const VectorXd dw = d.head(nw_);
    double alpha = fraction_to_boundary(w_, dw, lw_, uw_, tau_);
    const double theta = r_.lpNorm<1>();
    bool moved = false;
    for (int k = 0; k < 40; ++k) {
      const VectorXd wt = w_ + alpha * dw;
      const Evaluation e = evaluate(wt);
      if (e.ok) {
        const VectorXd rt = residual(wt, e.c);
        if (rt.lpNorm<1>() <= (1.0 - 1e-4 * alpha) * theta) {
          w_ = wt;
          ev_ = e;
          r_ = rt;
          protect_slacks();
          moved = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!moved) {
      log("restoration stalled at it " + std::to_string(it) + " theta " + std::to_string(theta));
      return false;
    }
    try {
      eval_derivatives(w_);
    } catch (const Error& e) {
      log(std::string("restoration: derivative evaluation failed: ") + e.what());
      return false;
    }
    const double theta_t = r_.lpNorm<1>();
    const double phi_t = barrier(w_, ev_.f);
    if (o_.verbosity > 1) {
      char buf[120];
      std::snprintf(buf, sizeof buf, "  restoration %3d  theta=%.3e  alpha=%.2e", it, theta_t, alpha);
      log(buf);
    }
    if (theta_t <= 0.9 * theta0 && filter_acceptable(theta_t, phi_t)) {
      reset_multipliers_bounds();
      least_squares_multipliers();
      return true;
    }
  }
  log("restoration hit its iteration limit");
  return false;
}

IpmResult Solver::run() {
  const auto t0 = std::chrono::steady_clock::now();
  IpmResult res;
  setup();
  VectorXd x0 = push_inside(p_.initial_point(), x_lo_, x_hi_);
  compute_scaling(x0);

  lw_.resize(nw_);
  uw_.resize(nw_);
  lw_.head(n_) = x_lo_;
  uw_.head(n_) = x_hi_;
  for (int j = 0; j < mi_; ++j) {
    lw_(n_ + j) = sc_(slack_row_[j]) * c_lo_(slack_row_[j]);
    uw_(n_ + j) = sc_(slack_row_[j]) * c_hi_(slack_row_[j]);
  }
  has_l_.assign(nw_, 0);
  has_u_.assign(nw_, 0);
  num_bounds_ = 0;
  for (int i = 0; i < nw_; ++i) {
    has_l_[i] = std::isfinite(lw_(i));
    has_u_[i] = std::isfinite(uw_(i));
    num_bounds_ += has_l_[i] + has_u_[i];
  }

  w_ = VectorXd::Zero(nw_);
  w_.head(n_) = x0;
  ev_ = evaluate(w_);
  if (!ev_.ok) {
    res.status = IpmStatus::EvaluationFailed;
    res.message = "model evaluation failed at the initial point";
    res.x = x0;
    return res;
  }
  {
    VectorXd s0(mi_);
    VectorXd lo(mi_), hi(mi_);
    for (int j = 0; j < mi_; ++j) {
      s0(j) = ev_.c(slack_row_[j]);
      lo(j) = lw_(n_ + j);
      hi(j) = uw_(n_ + j);
    }
    w_.tail(mi_) = push_inside(s0, lo, hi);
  }
  r_ = residual(w_, ev_.c);
  zl_ = VectorXd::Zero(nw_);
  zu_ = VectorXd::Zero(nw_);
  for (int i = 0; i < nw_; ++i) {
    if (has_l_[i]) zl_(i) = 1.0;
    if (has_u_[i]) zu_(i) = 1.0;
  }
  y_ = VectorXd::Zero(m_);
  mu_ = o_.mu_init;
  tau_ = std::max(kTauMin, 1.0 - mu_);

  try {
    eval_derivatives(w_);
  } catch (const Error& e) {
    res.status = IpmStatus::EvaluationFailed;
    res.message = e.what();
    res.x = x0;
    return res;
  }

  hess_ = VectorXd::Zero(static_cast<Eigen::Index>(p_.hessian_structure().size()));

  least_squares_multipliers();

  const double theta0 = r_.lpNorm<1>();
  theta_max_ = o_.theta_max_factor * std::max(1.0, theta0);
  theta_min_ = 1e-4 * std::max(1.0, theta0);
  filter_.clear();


  int iter = 0;
  double alpha = 0.0;
  for (;; ++iter) {
    const double e0 = optimality_error(0.0);
    const double viol = unscaled_violation(w_.head(n_));
    IterationRecord rec{iter, ev_.f / sf_, r_.size() ? r_.lpNorm<Eigen::Infinity>() : 0.0, e0, mu_, alpha, delta_w_};
    res.history.push_back(rec);
    if (o_.verbosity > 0) {
      char buf[200];
      std::snprintf(buf, sizeof buf, "%4d  f=% .8e  inf_pr=%.2e  err=%.2e  viol=%.2e  mu=%.1e  a=%.2e  dw=%.1e", iter,
                    rec.objective, rec.primal_inf, e0, viol, mu_, alpha, delta_w_);
      log(buf);
    }
    if (e0 <= o_.tol && viol <= o_.constr_viol_tol) {
      res.status = IpmStatus::Converged;
      break;
    }
    if (iter >= o_.max_iter) {
      res.status = IpmStatus::MaxIterations;
      res.message = "iteration limit reached";
      break;
    }
    // Barrier update.
    while (watchdog_trials_ < 0 && mu_ > o_.tol / 10.0 && optimality_error(mu_) <= kKappaEps * mu_) {
      mu_ = std::max(o_.tol / 10.0, std::min(kKappaMu * mu_, std::pow(mu_, kThetaMu)));
      tau_ = std::max(kTauMin, 1.0 - mu_);
      filter_.clear();
    }

    // Newton direction.
    try {
      p_.hessian_values(w_.head(n_), sf_, sc_.cwiseProduct(y_), hess_);
    } catch (const Error& e) {
      res.status = IpmStatus::EvaluationFailed;
      res.message = e.what();
      break;
    }
    if (!hess_.allFinite()) {
      res.status = IpmStatus::EvaluationFailed;
      res.message = "non-finite Hessian";
      break;
    }
    const VectorXd sig = sigma();
    if (!factor_with_inertia_correction(sig)) {
      res.status = IpmStatus::FactorizationFailed;
      res.message = "KKT factorization failed (" + kkt_->name() + ")";
      break;
    }
    const VectorXd rhs_w = -(barrier_gradient(w_) + at_y(y_));
    VectorXd rhs(nw_ + m_);
    rhs.head(nw_) = rhs_w;
    rhs.tail(m_) = -r_;
    const VectorXd d = solve_kkt(rhs);
    if (!d.allFinite()) {
      res.status = IpmStatus::FactorizationFailed;
      res.message = "non-finite search direction";
      break;
    }
    const VectorXd dw = d.head(nw_);
    const VectorXd dy = d.tail(m_);
    VectorXd dzl = VectorXd::Zero(nw_), dzu = VectorXd::Zero(nw_);
    for (int i = 0; i < nw_; ++i) {
      if (has_l_[i]) {
        const double sl = w_(i) - lw_(i);
        dzl(i) = mu_ / sl - zl_(i) - zl_(i) / sl * dw(i);
      }
      if (has_u_[i]) {
        const double su = uw_(i) - w_(i);
        dzu(i) = mu_ / su - zu_(i) + zu_(i) / su * dw(i);
      }
    }

    if (watchdog_trials_ < 0 && shortened_ >= kWatchdogShortened && !watchdog_blocked_) watchdog_trials_ = 0;
    if (watchdog_trials_ >= 0) {
      const WatchdogOutcome wd = watchdog_step(dw, dy, dzl, dzu);
      if (wd == WatchdogOutcome::Reverted) log("watchdog: reverting to the saved iterate");
      alpha = wd == WatchdogOutcome::Reverted ? 0.0 : 1.0;
    } else if (!line_search(dw, dy, dzl, dzu, rhs_w, alpha)) {
      log("line search failed; entering restoration");
      if (!restoration()) {
        res.status = IpmStatus::LineSearchFailed;
        res.message = "line search and feasibility restoration failed";
        break;
      }
      alpha = 0.0;
      shortened_ = 0;
      watchdog_blocked_ = false;
    } else {
      const double amax = fraction_to_boundary(w_ - alpha * dw, dw, lw_, uw_, tau_);
      shortened_ = alpha < 0.99 * amax ? shortened_ + 1 : 0;
      if (shortened_ == 0) watchdog_blocked_ = false;
    }
    reset_multipliers_bounds();
    try {
      eval_derivatives(w_);
    } catch (const Error& e) {
      res.status = IpmStatus::EvaluationFailed;
      res.message = e.what();
      break;
    }
  }

  res.x = w_.head(n_);
  res.lambda = sc_.cwiseProduct(y_) / sf_;
  res.iterations = iter;
  res.objective = ev_.f / sf_;
  res.kkt_error = optimality_error(0.0);
  res.primal_inf = unscaled_violation(res.x);
  {
    const VectorXd rd = grad_ + at_y(y_) - zl_ + zu_;
    res.dual_inf = rd.lpNorm<Eigen::Infinity>();
    double cmp = 0.0;
    for (int i = 0; i < nw_; ++i) {
      if (has_l_[i]) cmp = std::max(cmp, (w_(i) - lw_(i)) * zl_(i));
      if (has_u_[i]) cmp = std::max(cmp, (uw_(i) - w_(i)) * zu_(i));
    }
    res.complementarity = cmp;
  }
  res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (res.message.empty()) res.message = status_name(res.status);
  return res;
}

}  // namespace

IpmResult solve(const Problem& problem, const IpmOptions& options) {
  Solver s(problem, options);
  return s.run();
}

}  // namespace nprace::nlp
