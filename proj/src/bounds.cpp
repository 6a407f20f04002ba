#include "betaexp/bounds.hpp"

#include "betaexp/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <iomanip>
#include <mutex>
#include <sstream>

namespace betaexp {

namespace {

constexpr double kThresholdTol = 1e-30;

struct ThresholdCache {
  std::mutex mutex;
  std::deque<Real> omega;
  std::deque<Real> lambda;

  const Real& get(std::deque<Real>& values, int m, Real (*compute)(int, double)) {
    if (m < 1) throw BetaError(ErrorKind::InvalidArgument, "m must be >= 1");
    std::lock_guard<std::mutex> lock(mutex);
    while (values.size() < static_cast<std::size_t>(m)) {
      values.push_back(compute(static_cast<int>(values.size()) + 1, kThresholdTol));
    }
    return values[static_cast<std::size_t>(m - 1)];
  }
};

ThresholdCache& cache() {
  static ThresholdCache instance;
  return instance;
}

Real omega_at(int m, double tol) { return omega(m, tol); }
Real lambda_at(int m, double tol) { return lambda(m, tol); }

template <typename T>
int floor_log(const T& beta, const T& arg) {
  using boost::multiprecision::floor;
  using boost::multiprecision::log;
  return static_cast<int>(floor(log(arg) / log(beta)));
}

template <typename T>
T kappa_argument(const T& beta, bool above_sqrt2) {
  if (above_sqrt2) return (beta * beta - 1) / (1 + beta - beta * beta);
  return 1 / (beta - 1);
}

double log_beta_2(const Real& beta) {
  return std::log(2.0) / static_cast<double>(boost::multiprecision::log(beta));
}

std::string fixed(double v, int decimals = 6) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(decimals) << v;
  return os.str();
}

}  // namespace

const Real& cached_omega(int m) {
  auto& c = cache();
  return c.get(c.omega, m, &omega_at);
}

const Real& cached_lambda(int m) {
  auto& c = cache();
  return c.get(c.lambda, m, &lambda_at);
}

Real kappa(const BetaContext& ctx) {
  const Real& beta = ctx.beta();
  if (beta >= golden_ratio()) {
    throw BetaError(ErrorKind::OutOfDomain, "kappa needs beta < (1+sqrt5)/2");
  }
  const bool above = beta * beta > 2;
  const Real arg = kappa_argument(beta, above);
  const Real ratio = boost::multiprecision::log(arg) / boost::multiprecision::log(beta);
  int n = 0;
  if (boost::multiprecision::abs(ratio - boost::multiprecision::round(ratio)) < Real("1e-12")) {
    const WideReal wide_beta(beta);
    n = floor_log(wide_beta, kappa_argument(wide_beta, above));
  } else {
    n = static_cast<int>(boost::multiprecision::floor(ratio));
  }
  return Real(1) / (2 * (n + 1));
}

UpperBound cap_bound(int m) {
  if (m < 2) throw BetaError(ErrorKind::OutOfDomain, "the 2^m - 1 cap needs m >= 2");
  UpperBound b;
  b.m = m;
  b.value = 1.0 + std::log2(1.0 - std::ldexp(1.0, -m)) / m;
  b.threshold = boost::multiprecision::pow(Real(2), Real(1) / m);
  return b;
}

double BoundReport::min_upper() const {
  double best = 1.0;
  for (const auto& u : upper_bounds) best = std::min(best, u.value);
  return best;
}

std::optional<double> BoundReport::local_dim_min() const {
  std::optional<double> best;
  for (const auto& b : local_dim_upper) {
    if (b.applicable && (!best || b.value < *best)) best = b.value;
  }
  return best;
}

BoundReport best_lower_bounds(const Real& beta, int m_max) {
  if (m_max < 1) throw BetaError(ErrorKind::InvalidArgument, "m_max must be >= 1");
  BoundReport r;
  r.beta = beta;
  if (beta > 1 && beta < golden_ratio()) {
    r.kappa = static_cast<double>(kappa(BetaContext(beta)));
    r.best_lower = r.kappa;
    r.best_lower_source = "kappa";
  }
  // omega_m decreases, so the admissible m form an initial segment and the last one is best.
  for (int m = 1; m <= m_max && beta <= cached_omega(m); ++m) r.best_m_omega = m;
  // lambda_m increases; the first admissible m gives the largest 1/(m+2).
  for (int m = 1; m <= m_max; ++m) {
    if (beta <= cached_lambda(m)) {
      r.best_m_lambda = m;
      break;
    }
  }
  if (r.best_m_omega) {
    const int m = *r.best_m_omega;
    r.omega_bound = 2.0 * m / (2.0 * m + 1);
    if (!r.best_lower || *r.omega_bound > *r.best_lower) {
      r.best_lower = r.omega_bound;
      r.best_lower_source = "omega";
    }
  }
  if (r.best_m_lambda) {
    r.lambda_bound = 1.0 / (*r.best_m_lambda + 2);
    if (!r.best_lower || *r.lambda_bound > *r.best_lower) {
      r.best_lower = r.lambda_bound;
      r.best_lower_source = "lambda";
    }
  }
  return r;
}

std::vector<LocalDimBound> local_dim_upper(const BetaContext& ctx, int m_max) {
  const BoundReport lower = best_lower_bounds(ctx.beta(), m_max);
  const double lb2 = log_beta_2(ctx.beta());
  std::vector<LocalDimBound> out;

  LocalDimBound k{"kappa", std::nullopt, 0, false};
  if (lower.kappa) {
    k.value = (1.0 - *lower.kappa) * lb2;
    k.applicable = true;
  }
  out.push_back(k);

  LocalDimBound w{"omega", lower.best_m_omega, 0, false};
  if (lower.best_m_omega) {
    w.value = lb2 / (2.0 * *lower.best_m_omega + 1);
    w.applicable = true;
  }
  out.push_back(w);

  LocalDimBound l{"lambda", lower.best_m_lambda, 0, false};
  if (lower.best_m_lambda) {
    const double m = *lower.best_m_lambda;
    l.value = (m + 1) / (m + 2) * lb2;
    l.applicable = true;
  }
  out.push_back(l);
  return out;
}

BoundReport bound_report(const BetaContext& ctx, int m_max) {
  BoundReport r = best_lower_bounds(ctx.beta(), m_max);
  for (int m = 2; m <= m_max; ++m) {
    UpperBound u = cap_bound(m);
    if (ctx.beta() > u.threshold) r.upper_bounds.push_back(std::move(u));
  }
  r.local_dim_upper = local_dim_upper(ctx, m_max);
  return r;
}

double min_gap(double beta, int m) {
  if (m < 1 || m > 24) throw BetaError(ErrorKind::InvalidArgument, "separation needs 1 <= m <= 24");
  if (!(beta > 1 && beta <= 2)) throw BetaError(ErrorKind::InvalidArgument, "beta must lie in (1, 2]");
  const std::size_t n = std::size_t{1} << m;
  std::vector<double> points(n, 0.0);
  // points[mask] = sum of bits of mask (most significant = first digit) weighted by beta^-n.
  std::vector<double> weights(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) weights[static_cast<std::size_t>(i)] = std::pow(beta, -(m - i));
  for (std::size_t mask = 1; mask < n; ++mask) {
    const int low = std::countr_zero(mask);
    points[mask] = points[mask & (mask - 1)] + weights[static_cast<std::size_t>(low)];
  }
  std::sort(points.begin(), points.end());
  double best = INFINITY;
  for (std::size_t i = 1; i < n; ++i) {
    const double gap = points[i] - points[i - 1];
    if (gap > 1e-13) best = std::min(best, gap);
  }
  return best;
}

bool separation_holds(double beta, int m) {
  return min_gap(beta, m) > 1.0 / (2.0 * std::pow(beta, m) * (beta - 1.0));
}

bool separation_holds(const BetaContext& ctx, int m) {
  return separation_holds(static_cast<double>(ctx.beta()), m);
}

DeltaWitness delta_search(int m, double abs_tol) {
  if (!(abs_tol > 0)) throw BetaError(ErrorKind::InvalidArgument, "abs_tol must be positive");
  constexpr double kStep = 1e-3;
  DeltaWitness w;
  w.m = m;
  double good = 2.0;
  double bad = 1.0;
  bool failed = false;
  for (int i = 1; 2.0 - i * kStep > 1.0 + kStep / 2; ++i) {
    const double beta = 2.0 - i * kStep;
    if (!separation_holds(beta, m)) {
      bad = beta;
      failed = true;
      break;
    }
    good = beta;
  }
  if (failed) {
    while (good - bad > abs_tol) {
      const double mid = 0.5 * (good + bad);
      (separation_holds(mid, m) ? good : bad) = mid;
    }
  } else {
    good = 1.0;
  }
  w.threshold = good;
  w.delta = 2.0 - good;
  return w;
}

Real inverse_iterate(const BetaContext& ctx, int digit, int m, const Real& y) {
  Real v = y;
  for (int i = 0; i < m; ++i) v = (v + digit) / ctx.beta();
  return v;
}

Real inverse_one_of_zero(const BetaContext& ctx, int m) {
  const Real bm = boost::multiprecision::pow(ctx.beta(), m);
  return (bm - 1) / (bm * (ctx.beta() - 1));
}

Real inverse_zero_of_endpoint(const BetaContext& ctx, int m) {
  return 1 / (boost::multiprecision::pow(ctx.beta(), m) * (ctx.beta() - 1));
}

namespace {

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json optional_json(const std::optional<int>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

void write_records(std::ostream& out, const BoundReport& r) {
  nlohmann::json rec = {{"record", "bound_report"},
                        {"beta", format_real(r.beta)},
                        {"kappa", optional_json(r.kappa)},
                        {"best_m_omega", optional_json(r.best_m_omega)},
                        {"omega_bound", optional_json(r.omega_bound)},
                        {"best_m_lambda", optional_json(r.best_m_lambda)},
                        {"lambda_bound", optional_json(r.lambda_bound)},
                        {"best_lower", optional_json(r.best_lower)},
                        {"best_lower_source", r.best_lower_source},
                        {"min_upper", r.min_upper()},
                        {"local_dim_min", optional_json(r.local_dim_min())}};
  out << rec.dump() << '\n';
  for (const auto& u : r.upper_bounds) {
    nlohmann::json row = {{"record", "upper_bound"},
                          {"m", u.m},
                          {"value", u.value},
                          {"threshold", format_real(u.threshold)}};
    out << row.dump() << '\n';
  }
  for (const auto& b : r.local_dim_upper) {
    nlohmann::json row = {{"record", "local_dim_bound"},
                          {"source", b.source},
                          {"m", optional_json(b.m)},
                          {"value", b.applicable ? nlohmann::json(b.value) : nlohmann::json(nullptr)},
                          {"applicable", b.applicable}};
    out << row.dump() << '\n';
  }
}

void write_table(std::ostream& out, const BoundReport& r) {
  auto row = [&](const std::string& name, const std::string& value) {
    out << std::left << std::setw(24) << name << value << '\n';
  };
  auto opt = [](const std::optional<double>& v) { return v ? fixed(*v) : std::string("absent"); };
  row("beta", format_fixed(r.beta, 12));
  row("kappa", opt(r.kappa));
  row("omega bound", r.best_m_omega ? "m=" + std::to_string(*r.best_m_omega) + "  " + fixed(*r.omega_bound)
                                    : std::string("absent"));
  row("lambda bound", r.best_m_lambda
                          ? "m=" + std::to_string(*r.best_m_lambda) + "  " + fixed(*r.lambda_bound)
                          : std::string("absent"));
  row("best lower", r.best_lower ? fixed(*r.best_lower) + "  (" + r.best_lower_source + ")"
                                 : std::string("absent"));
  if (r.upper_bounds.empty()) {
    row("upper bound", fixed(1.0) + "  (trivial)");
  } else {
    const auto& u = r.upper_bounds.front();
    row("upper bound", "m=" + std::to_string(u.m) + "  " + fixed(u.value) + "  (beta > " +
                           format_fixed(u.threshold, 6) + ")");
  }
  for (const auto& b : r.local_dim_upper) {
    std::string value = b.applicable ? fixed(b.value) : std::string("absent");
    if (b.applicable && b.m) value = "m=" + std::to_string(*b.m) + "  " + value;
    row("local dim (" + b.source + ")", value);
  }
  const auto best = r.local_dim_min();
  row("local dim min", best ? fixed(*best) : std::string("absent"));
}

void write_csv(std::ostream& out, const BoundReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? fixed(*v, 12) : std::string(); };
  out << "beta,kappa,best_m_omega,omega_bound,best_m_lambda,lambda_bound,best_lower,min_upper,local_dim_min\n";
  out << format_real(r.beta) << ',' << opt(r.kappa) << ','
      << (r.best_m_omega ? std::to_string(*r.best_m_omega) : "") << ',' << opt(r.omega_bound) << ','
      << (r.best_m_lambda ? std::to_string(*r.best_m_lambda) : "") << ',' << opt(r.lambda_bound) << ','
      << opt(r.best_lower) << ',' << fixed(r.min_upper(), 12) << ',' << opt(r.local_dim_min()) << '\n';
}

}  // namespace betaexp
