// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "betaexp/bernoulli.hpp"
#include "betaexp/bounds.hpp"
#include "betaexp/cli.hpp"
#include "betaexp/errors.hpp"
#include "betaexp/generators.hpp"
#include "betaexp/prefix_engine.hpp"

#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace betaexp;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
  return buf;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// A point distributed by the Bernoulli convolution: random digits, 160 terms.
Real sample_mu(std::mt19937_64& rng, const Real& beta) {
  Real x = 0;
  Real scale = 1 / beta;
  for (int n = 0; n < 160; ++n) {
    if (rng() & 1) x += scale;
    scale /= beta;
  }
  return x;
}

Real interior_uniform(std::mt19937_64& rng, const BetaContext& ctx, double margin) {
  const double c = static_cast<double>(ctx.one_over_beta_minus_one());
  return Real(uniform(rng, margin * c, (1 - margin) * c));
}

// Criterion 1
Outcome table_reproduction() {
  std::ostringstream out, err;
  const int code = cli::run({"roots", "--reproduce-tables", "--format", "csv"}, out, err);
  if (code != 0) return {false, "roots exited " + std::to_string(code) + ": " + err.str()};
  std::map<std::pair<std::string, int>, std::string> printed;
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string table, m, value;
    std::getline(row, table, ',');
    std::getline(row, m, ',');
    std::getline(row, value, ',');
    printed[{table, std::stoi(m)}] = value;
  }
  int matched = 0;
  std::string misses;
  for (const auto& p : oracle::kPublished) {
    for (const auto& [table, expected] : {std::pair<std::string, const char*>{"omega", p.omega}, {"lambda", p.lambda}}) {
      const auto it = printed.find({table, p.m});
      const std::string got = it == printed.end() ? "missing" : it->second;
      const bool ok = it != printed.end() && std::abs(std::stod(got) - std::stod(expected)) <= 1e-5 + 1e-12;
      if (ok) {
        ++matched;
      } else {
        misses += " " + table + "_" + std::to_string(p.m) + "=" + got + " (published " + expected + ")";
      }
    }
  }
  return {matched == 10, std::to_string(matched) + "/10 within one unit in the 5th decimal" + misses};
}

// Criterion 2
Outcome branching_equals_direct() {
  std::mt19937_64 rng(1001);
  int mismatches = 0;
  std::size_t words = 0;
  for (int i = 0; i < 200; ++i) {
    const BetaContext ctx(Real(uniform(rng, 1.01, 1.99)));
    const Real x = interior_uniform(rng, ctx, 0);
    const std::size_t k = 1 + rng() % 16;
    auto a = enumerate_prefixes_branching(ctx, x, k).words;
    auto b = enumerate_prefixes_direct(ctx, x, k).words;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) ++mismatches;
    words += a.size();
  }
  return {mismatches == 0, std::to_string(mismatches) + " mismatched pairs of 200, " + std::to_string(words) +
                               " words compared"};
}

struct AuditedRun {
  GeneratorRun run;
  RunAudit audit;
};

std::vector<AuditedRun> g_runs;

// Criterion 3
Outcome generator_count_law() {
  std::mt19937_64 rng(1003);
  std::size_t count_law = 0, containment = 0, membership = 0, errors = 0, literal = 0;
  std::string first;
  auto record = [&](const BetaContext& ctx, GeneratorRun run) {
    RunAudit audit = audit_run(ctx, run);
    count_law += audit.count_law_violations;
    containment += audit.containment_violations;
    membership += audit.soundness_violations + audit.enumeration_mismatches;
    literal += audit.enumeration_checked ? 1 : 0;
    if (first.empty() && !audit.messages.empty()) first = audit.messages.front();
    g_runs.push_back({std::move(run), std::move(audit)});
  };
  for (int m = 1; m <= 3; ++m) {
    const double w = static_cast<double>(omega(m, 1e-30));
    const double l = static_cast<double>(lambda(m, 1e-30));
    for (int i = 0; i < 20; ++i) {
      const std::size_t blocks = 1 + rng() % (m == 3 ? 2 : 3);
      const BetaContext ctx(Real(uniform(rng, (1 + w) / 2, w)));
      try {
        record(ctx, run_generator_m(ctx, m, interior_uniform(rng, ctx, 1e-3), blocks));
      } catch (const BetaError& e) {
        ++errors;
        if (first.empty()) first = e.what();
      }
      const BetaContext pctx(Real(uniform(rng, (1 + l) / 2, l)));
      try {
        record(pctx, run_generator_s3(pctx, m, interior_uniform(rng, pctx, 1e-3), 1 + rng() % 3));
      } catch (const BetaError& e) {
        ++errors;
        if (first.empty()) first = e.what();
      }
    }
  }
  const std::size_t total = count_law + containment + membership + errors;
  std::string detail = std::to_string(g_runs.size()) + " runs; count law " + std::to_string(count_law) +
                       ", containment " + std::to_string(containment) + ", not a prefix " +
                       std::to_string(membership) + ", errors " + std::to_string(errors) + "; " +
                       std::to_string(literal) + " runs also checked against the full enumeration";
  if (!first.empty()) detail += "; first: " + first;
  return {total == 0 && g_runs.size() == 120, detail};
}

// Criterion 4
Outcome bridge_and_count_bounds() {
  if (g_runs.empty()) return {false, "no runs from criterion 3"};
  std::size_t bridge = 0, lower = 0, upper = 0, mono = 0;
  for (const auto& r : g_runs) {
    bridge += r.audit.bridge_violations;
    lower += r.audit.lower_count_violations;
    upper += r.audit.upper_count_violations;
    mono += r.audit.monotonicity_violations;
  }
  return {bridge + lower + upper + mono == 0,
          std::to_string(g_runs.size()) + " runs; descendant mismatches " + std::to_string(bridge) +
              ", lower-count " + std::to_string(lower) + ", upper-count " + std::to_string(upper) +
              ", monotonicity " + std::to_string(mono)};
}

// Criterion 5
Outcome cap_on_prefix_counts() {
  std::mt19937_64 rng(1005);
  int violations = 0, checks = 0;
  for (int m : {2, 3}) {
    const double t = std::pow(2.0, 1.0 / m);
    const double cap = std::exp2(m) - 1;
    for (int i = 0; i < 5; ++i) {
      const BetaContext ctx(Real(t + (2 - t) * (i + 0.5) / 5));
      for (int j = 0; j < 100; ++j) {
        const auto counts = count_prefixes_by_length(ctx, interior_uniform(rng, ctx, 0), 2 * m);
        checks += 2;
        if (counts[m] > cap) ++violations;
        if (counts[2 * m] > cap * cap) ++violations;
      }
    }
  }
  return {violations == 0, std::to_string(violations) + " violations in " + std::to_string(checks) + " checks"};
}

// Criterion 6
Outcome separation_region() {
  const auto w1 = delta_search(1);
  const bool threshold_ok = std::abs(w1.threshold - 1.5) <= 1e-6;
  const auto w3 = delta_search(3);
  std::mt19937_64 rng(1006);
  int violations = 0, checks = 0;
  for (int i = 0; i < 5; ++i) {
    const BetaContext ctx(Real(w3.threshold + (2 - w3.threshold) * (i + 0.5) / 5));
    for (int j = 0; j < 20; ++j) {
      const auto counts = count_prefixes_by_length(ctx, interior_uniform(rng, ctx, 0), 12);
      for (int k = 1; k <= 4; ++k) {
        ++checks;
        if (static_cast<double>(counts[static_cast<std::size_t>(3 * k)]) > std::exp2(k)) ++violations;
      }
    }
  }
  return {threshold_ok && violations == 0,
          fmt("m=1 threshold %.9f (delta %.9f); m=3 threshold %.6f, ", w1.threshold, w1.delta, w3.threshold) +
              std::to_string(violations) + " violations in " + std::to_string(checks) + " checks"};
}

// Criterion 7
Outcome growth_against_bounds(std::string& info) {
  std::mt19937_64 rng(1007);
  int failures = 0, samples = 0, uniform_failures = 0;
  double worst_lower = 1e9, worst_upper = 1e9;
  for (int i = 0; i < 20; ++i) {
    const Real beta(1.01 + 0.6 * (i + 1) / 21.0);
    const BetaContext ctx(beta);
    const auto report = bound_report(ctx);
    const double lower = report.best_lower.value_or(0) - 0.15;
    const double upper = report.min_upper() + 0.15;
    for (int j = 0; j < 5; ++j) {
      const auto est = growth_estimate(ctx, sample_mu(rng, beta), 8, 28);
      ++samples;
      worst_lower = std::min(worst_lower, est.lower_slope - lower);
      worst_upper = std::min(worst_upper, upper - est.upper_slope);
      if (!(est.lower_slope > lower && est.upper_slope < upper)) ++failures;
      const auto flat = growth_estimate(ctx, interior_uniform(rng, ctx, 0), 8, 28);
      if (!(flat.lower_slope > lower && flat.upper_slope < upper)) ++uniform_failures;
    }
  }
  info = "uniform x instead: " + std::to_string(uniform_failures) + "/100 outside the slack";
  return {failures == 0, std::to_string(failures) + "/" + std::to_string(samples) +
                             fmt(" outside; smallest margins %.3f (lower) %.3f (upper)", worst_lower, worst_upper)};
}

// Criterion 8
Outcome almost_every_growth(std::string& info) {
  std::mt19937_64 rng(1008);
  int close = 0, uniform_close = 0;
  double worst = 0;
  for (int i = 0; i < 10; ++i) {
    const Real beta(uniform(rng, 1.05, 1.40));
    const BetaContext ctx(beta);
    const double target = std::log2(2 / static_cast<double>(beta));
    for (int j = 0; j < 10; ++j) {
      const double s = growth_estimate(ctx, sample_mu(rng, beta), 28, 28).slope_at(28);
      const double gap = std::abs(s - target);
      worst = std::max(worst, gap);
      if (gap < 0.08) ++close;
      const double u = growth_estimate(ctx, interior_uniform(rng, ctx, 0), 28, 28).slope_at(28);
      if (std::abs(u - target) < 0.08) ++uniform_close;
    }
  }
  info = "uniform x instead: " + std::to_string(uniform_close) + "/100 within 0.08";
  return {close >= 80, std::to_string(close) + "/100 within 0.08" + fmt(" (largest gap %.3f)", worst)};
}

// Criterion 9
Outcome bernoulli_consistency() {
  std::mt19937_64 rng(1009);
  int disagreements = 0, intervals = 0, over_bound = 0, points = 0;
  double worst_ratio = 0, worst_slack = 1e9;
  for (const char* b : {"1.3", "1.5"}) {
    const BetaContext ctx(parse_real(b));
    const double c = static_cast<double>(ctx.one_over_beta_minus_one());
    for (int i = 0; i < 20; ++i) {
      const double lo = uniform(rng, -0.1 * c, c);
      const double hi = lo + uniform(rng, 0.01, 0.5 * c);
      const auto rec = measure_interval(ctx, lo, hi, 24);
      const auto mc = measure_monte_carlo(ctx, lo, hi, 200'000, 40, 5000 + static_cast<std::uint64_t>(i));
      const double allowed = 3 * (rec.half_width + mc.half_width);
      ++intervals;
      if (std::abs(rec.value - mc.value) > allowed) ++disagreements;
      if (allowed > 0) worst_ratio = std::max(worst_ratio, std::abs(rec.value - mc.value) / allowed);
    }
    const double bound = *bound_report(ctx).local_dim_min();
    const std::size_t k_max = std::string(b) == "1.3" ? 18 : 22;
    for (int j = 0; j < 5; ++j) {
      const double x = uniform(rng, 0.2 * c, 0.8 * c);
      const auto e = local_dimension(ctx, x, 8, k_max);
      ++points;
      worst_slack = std::min(worst_slack, bound + 0.1 - e.slope_upper);
      if (e.slope_upper > bound + 0.1) ++over_bound;
    }
  }
  return {disagreements == 0 && over_bound == 0,
          std::to_string(disagreements) + "/" + std::to_string(intervals) + " intervals disagree" +
              fmt(" (worst |diff|/allowed %.2f); ", worst_ratio) + std::to_string(over_bound) + "/" +
              std::to_string(points) + " local dimensions over bound+0.1" +
              fmt(" (smallest margin %.3f)", worst_slack)};
}

// Criterion 10
Outcome identities() {
  std::mt19937_64 rng(1010);
  int ones = 0, extremal = 0, inverse = 0;
  auto rel = [](const Real& a, const Real& b) {
    return static_cast<double>(abs(a - b) / (1 + abs(b)));
  };
  for (int i = 0; i < 500; ++i) {
    const BetaContext ctx(Real(uniform(rng, 1.01, 1.99)));
    const Real& b = ctx.beta();
    const int n = static_cast<int>(rng() % 8);
    const int k = static_cast<int>(rng() % 13);
    const Real start = pow(b, n) / (b * b - 1);
    const Real closed = (pow(b, n + k) - pow(b, k + 1) - pow(b, k) + b + 1) / (b * b - 1);
    if (rel(iterate_word(ctx, BinaryWord::ones(static_cast<std::size_t>(k)), start), closed) > 1e-28) ++ones;
  }
  for (int i = 0; i < 500; ++i) {
    const BetaContext ctx(Real(uniform(rng, 1.01, 1.99)));
    const Real x(uniform(rng, -2, 2 + static_cast<double>(ctx.one_over_beta_minus_one())));
    const std::size_t k = 1 + rng() % 8;
    const std::size_t len = 2 * k + 1;
    const BinaryWord w = BinaryWord::from_bits(rng() & ((std::uint64_t{1} << len) - 1), len);
    const Real v = iterate_word(ctx, w, x);
    const Real slack = Real("1e-28") * (1 + abs(v));
    if (w.count_zeros() >= k + 1 &&
        v < iterate_word(ctx, BinaryWord::ones(k).concat(BinaryWord::zeros(k + 1)), x) - slack)
      ++extremal;
    if (w.count_ones() >= k + 1 &&
        v > iterate_word(ctx, BinaryWord::zeros(k).concat(BinaryWord::ones(k + 1)), x) + slack)
      ++extremal;
  }
  for (int i = 0; i < 500; ++i) {
    const BetaContext ctx(Real(uniform(rng, 1.01, 1.99)));
    const int m = 1 + static_cast<int>(rng() % 24);
    const Real one_of_zero = inverse_one_of_zero(ctx, m);
    const Real zero_of_end = inverse_zero_of_endpoint(ctx, m);
    bool ok = rel(inverse_iterate(ctx, 1, m, Real(0)), one_of_zero) < 1e-28 &&
              rel(inverse_iterate(ctx, 0, m, ctx.one_over_beta_minus_one()), zero_of_end) < 1e-28 &&
              (one_of_zero > zero_of_end) == (pow(ctx.beta(), m) > 2);
    if (!ok) ++inverse;
  }
  return {ones + extremal + inverse == 0, "violations: ones-word closed form " + std::to_string(ones) +
                                              "/500, balanced-block extremality " + std::to_string(extremal) +
                                              "/500, inverse images " + std::to_string(inverse) + "/500"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_s;
    std::function<Outcome(std::string&)> check;
  };
  const std::vector<Criterion> criteria = {
      {"table reproduction", 5, [](std::string&) { return table_reproduction(); }},
      {"branching equals direct enumeration", 120, [](std::string&) { return branching_equals_direct(); }},
      {"generator count law", 120, [](std::string&) { return generator_count_law(); }},
      {"descendant counts and count bounds", 120, [](std::string&) { return bridge_and_count_bounds(); }},
      {"2^m-1 cap", 60, [](std::string&) { return cap_on_prefix_counts(); }},
      {"separation region near 2", 600, [](std::string&) { return separation_region(); }},
      {"growth against bounds", 600, growth_against_bounds},
      {"almost-every growth log2(2/beta)", 600, almost_every_growth},
      {"Bernoulli convolution consistency", 600, [](std::string&) { return bernoulli_consistency(); }},
      {"closed forms and extremality", 600, [](std::string&) { return identities(); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    std::string info;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check(info);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (s > c.budget_s) {
      o.pass = false;
      o.detail += fmt(" [over the %.0f s budget]", c.budget_s);
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << c.name << ": " << o.detail
              << fmt(" (%.2f s)", s) << "\n";
    if (!info.empty()) std::cout << "      info: " << info << "\n";
    std::cout.flush();
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
            << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
