#include "betaexp/cli.hpp"

#include "betaexp/bernoulli.hpp"
#include "betaexp/bounds.hpp"
#include "betaexp/errors.hpp"
#include "betaexp/generators.hpp"
#include "betaexp/numeric_core.hpp"
#include "betaexp/prefix_engine.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <optional>
#include <sstream>

namespace betaexp::cli {

namespace {

enum class Format { Table, Csv, Records };

struct Common {
  std::string format = "table";
  std::optional<int> precision_bits;
  std::string tolerance;
};

Format parse_format(const std::string& name) {
  if (name == "table") return Format::Table;
  if (name == "csv") return Format::Csv;
  if (name == "records") return Format::Records;
  throw BetaError(ErrorKind::InvalidArgument, "unknown format '" + name + "'");
}

int env_precision_bits() {
  const char* value = std::getenv("BETAEXP_PRECISION_BITS");
  if (!value || !*value) return BetaContext::kDefaultPrecisionBits;
  char* end = nullptr;
  const long bits = std::strtol(value, &end, 10);
  if (*end != '\0') {
    throw BetaError(ErrorKind::InvalidArgument, "BETAEXP_PRECISION_BITS is not an integer");
  }
  return static_cast<int>(bits);
}

BetaContext make_context(const Common& common, const Real& beta) {
  const int bits = common.precision_bits ? *common.precision_bits : env_precision_bits();
  if (common.tolerance.empty()) return BetaContext(beta, bits);
  return BetaContext(beta, bits, parse_real(common.tolerance));
}

std::string fixed(double v, int decimals = 6) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(decimals) << v;
  return os.str();
}

void row(std::ostream& out, const std::string& name, const std::string& value) {
  out << std::left << std::setw(22) << name << value << '\n';
}

// ---- roots ---------------------------------------------------------------------------

constexpr double kRootTol = 1e-30;

std::string family_name(PolynomialFamily family) {
  switch (family) {
    case PolynomialFamily::P1: return "P1";
    case PolynomialFamily::P2: return "P2";
    case PolynomialFamily::P3: return "P3";
    case PolynomialFamily::Lambda: return "Lambda";
  }
  return "?";
}

int cmd_roots(const std::vector<int>& ms, bool reproduce, Format format, std::ostream& out) {
  for (int m : ms) {
    if (m < 1) throw BetaError(ErrorKind::InvalidArgument, "m must be >= 1");
  }
  const PolynomialFamily families[] = {PolynomialFamily::P1, PolynomialFamily::P2, PolynomialFamily::P3};

  if (reproduce) {
    if (format == Format::Csv) out << "table,m,value,polynomials\n";
    if (format == Format::Table) out << "Table 1  omega_m to 5 decimals\n" << std::left << std::setw(6) << "m"
                                     << std::setw(10) << "omega_m" << "associated polynomials\n";
    for (int m : ms) {
      const Real w = omega(m, kRootTol);
      std::vector<std::string> polys;
      for (auto f : families) polys.push_back(PolynomialSpec::make(f, m).to_unicode());
      if (format == Format::Table) {
        for (std::size_t i = 0; i < polys.size(); ++i) {
          out << std::left << std::setw(6) << (i == 0 ? std::to_string(m) : "")
              << std::setw(10) << (i == 0 ? format_fixed(w, 5) : "") << 'P' << i + 1 << " = " << polys[i]
              << '\n';
        }
      } else if (format == Format::Csv) {
        out << "omega," << m << ',' << format_fixed(w, 5) << ',';
        for (std::size_t i = 0; i < 3; ++i) out << (i ? ";" : "") << PolynomialSpec::make(families[i], m).to_ascii();
        out << '\n';
      } else {
        out << nlohmann::json{{"record", "table_row"}, {"table", 1}, {"m", m},
                              {"value", format_fixed(w, 5)}, {"polynomials", polys}}.dump()
            << '\n';
      }
    }
    if (format == Format::Table) out << "\nTable 2  lambda_m to 5 decimals\n" << std::left << std::setw(6) << "m"
                                     << std::setw(10) << "lambda_m" << "associated polynomial\n";
    for (int m : ms) {
      const Real l = lambda(m, kRootTol);
      const auto poly = PolynomialSpec::make(PolynomialFamily::Lambda, m);
      if (format == Format::Table) {
        out << std::left << std::setw(6) << m << std::setw(10) << format_fixed(l, 5) << poly.to_unicode() << '\n';
      } else if (format == Format::Csv) {
        out << "lambda," << m << ',' << format_fixed(l, 5) << ',' << poly.to_ascii() << '\n';
      } else {
        out << nlohmann::json{{"record", "table_row"}, {"table", 2}, {"m", m},
                              {"value", format_fixed(l, 5)},
                              {"polynomials", std::vector<std::string>{poly.to_unicode()}}}.dump()
            << '\n';
      }
    }
    return 0;
  }

  if (format == Format::Csv) out << "m,quantity,value,polynomial\n";
  if (format == Format::Table) {
    out << std::left << std::setw(6) << "m" << std::setw(10) << "quantity" << std::setw(24) << "value"
        << "polynomial\n";
  }
  for (int m : ms) {
    const OmegaDetail detail = omega_detail(m, kRootTol);
    const Real l = lambda(m, kRootTol);
    auto emit = [&](const std::string& quantity, const Real& value, const std::string& unicode,
                    const std::string& ascii) {
      if (format == Format::Table) {
        out << std::left << std::setw(6) << m << std::setw(10) << quantity << std::setw(24)
            << format_fixed(value, 18) << unicode << '\n';
      } else if (format == Format::Csv) {
        out << m << ',' << quantity << ',' << format_fixed(value, 18) << ',' << ascii << '\n';
      } else {
        out << nlohmann::json{{"record", "root"}, {"m", m}, {"quantity", quantity},
                              {"value", format_real(value)}, {"polynomial", ascii}}.dump()
            << '\n';
      }
    };
    for (std::size_t i = 0; i < 3; ++i) {
      const auto spec = PolynomialSpec::make(families[i], m);
      emit(family_name(families[i]), detail.family_roots[i], spec.to_unicode(), spec.to_ascii());
    }
    const std::string by = "min over " + family_name(detail.attained_by);
    emit("omega", detail.value, "(" + by + ")", by);
    const auto lspec = PolynomialSpec::make(PolynomialFamily::Lambda, m);
    emit("lambda", l, lspec.to_unicode(), lspec.to_ascii());
  }
  return 0;
}

// ---- count ---------------------------------------------------------------------------

struct CountArgs {
  std::string beta;
  std::string x;
  std::size_t k = 0;
  bool oracle = false;
  bool by_length = false;
  bool list = false;
};

int cmd_count(const CountArgs& a, const Common& common, Format format, std::ostream& out) {
  const BetaContext ctx = make_context(common, resolve_real(a.beta));
  const Real x = resolve_real(a.x);
  if (a.k > kMaxCountLength) {
    throw BetaError(ErrorKind::CapExceeded, "k must be <= " + std::to_string(kMaxCountLength));
  }
  const auto counts = count_prefixes_by_length(ctx, x, a.k);

  std::optional<PrefixSet> branching;
  if (a.oracle) {
    branching = enumerate_prefixes_branching(ctx, x, a.k);
    const PrefixSet direct = enumerate_prefixes_direct(ctx, x, a.k);
    if (branching->words != direct.words || branching->count() != counts.back()) {
      nlohmann::json detail = {{"branching", branching->count()},
                               {"direct", direct.count()},
                               {"counted", counts.back()}};
      throw BetaError(ErrorKind::OracleMismatch, "branching and direct enumeration differ: " + detail.dump());
    }
  }
  if (a.list && !branching) branching = enumerate_prefixes_branching(ctx, x, a.k);

  const std::size_t first = a.by_length ? 0 : a.k;
  if (format == Format::Table) {
    row(out, "beta", format_fixed(ctx.beta(), 15));
    row(out, "x", format_fixed(x, 15));
    for (std::size_t k = first; k <= a.k; ++k) row(out, "N_" + std::to_string(k), std::to_string(counts[k]));
    if (a.oracle) row(out, "oracle", "match (" + std::to_string(branching->count()) + " words)");
    if (a.list) out << to_text(*branching);
  } else if (format == Format::Csv) {
    out << "k,count\n";
    for (std::size_t k = first; k <= a.k; ++k) out << k << ',' << counts[k] << '\n';
  } else {
    for (std::size_t k = first; k <= a.k; ++k) {
      out << nlohmann::json{{"record", "count"}, {"beta", format_real(ctx.beta())}, {"x", format_real(x)},
                            {"k", k}, {"count", counts[k]}}.dump()
          << '\n';
    }
    if (a.oracle) out << nlohmann::json{{"record", "oracle"}, {"result", "match"}}.dump() << '\n';
    if (a.list) write_records(out, *branching);
  }
  return 0;
}

// ---- generate ------------------------------------------------------------------------

struct GenerateArgs {
  std::string beta;
  std::string x;
  std::string mode = "m";
  int m = 1;
  std::size_t blocks = 2;
};

int cmd_generate(const GenerateArgs& a, const Common& common, Format format, std::ostream& out) {
  const BetaContext ctx = make_context(common, resolve_real(a.beta));
  const Real x = resolve_real(a.x);
  GeneratorRun run;
  if (a.mode == "m") {
    run = run_generator_m(ctx, a.m, x, a.blocks);
  } else if (a.mode == "s3") {
    run = run_generator_s3(ctx, a.m, x, a.blocks);
  } else {
    throw BetaError(ErrorKind::InvalidArgument, "mode must be m or s3");
  }
  const RunAudit audit = audit_run(ctx, run);
  nlohmann::json audit_json = {{"record", "audit"},
                               {"count_law", audit.count_law_violations},
                               {"containment", audit.containment_violations},
                               {"bridge", audit.bridge_violations},
                               {"lower_count", audit.lower_count_violations},
                               {"upper_count", audit.upper_count_violations},
                               {"monotonicity", audit.monotonicity_violations},
                               {"soundness", audit.soundness_violations},
                               {"enumeration_mismatches", audit.enumeration_mismatches},
                               {"enumeration_checked", audit.enumeration_checked},
                               {"total", audit.total()}};

  if (format == Format::Table) {
    row(out, "mode", a.mode);
    row(out, "m", std::to_string(a.m));
    row(out, "beta", format_fixed(ctx.beta(), 15));
    row(out, "x", format_fixed(x, 15));
    row(out, "entry steps", std::to_string(run.entry_steps()));
    row(out, "block length", std::to_string(run.block_length));
    out << std::left << std::setw(8) << "stage" << std::setw(12) << "words" << std::setw(22) << "orbit min"
        << "orbit max\n";
    for (std::size_t s = 0; s < run.stages.size(); ++s) {
      const auto& st = run.stages[s];
      out << std::left << std::setw(8) << s << std::setw(12) << st.words.size() << std::setw(22)
          << format_fixed(st.orbit_min, 15) << format_fixed(st.orbit_max, 15) << '\n';
    }
    row(out, "audit violations", std::to_string(audit.total()));
    row(out, "enumeration check", audit.enumeration_checked ? "literal" : "per-word inequality");
  } else if (format == Format::Csv) {
    out << "stage,count,orbit_min,orbit_max\n";
    for (std::size_t s = 0; s < run.stages.size(); ++s) {
      const auto& st = run.stages[s];
      out << s << ',' << st.words.size() << ',' << format_real(st.orbit_min) << ',' << format_real(st.orbit_max)
          << '\n';
    }
  } else {
    write_records(out, run);
    out << audit_json.dump() << '\n';
  }
  if (audit.total() != 0) {
    std::string first = audit.messages.empty() ? "" : ": " + audit.messages.front();
    throw BetaError(ErrorKind::AuditFailure, std::to_string(audit.total()) + " audit violations" + first);
  }
  return 0;
}

// ---- bounds --------------------------------------------------------------------------

int cmd_bounds(const std::string& beta, int m_max, const Common& common, Format format, std::ostream& out) {
  const BetaContext ctx = make_context(common, resolve_real(beta));
  const BoundReport report = bound_report(ctx, m_max);
  if (format == Format::Table) write_table(out, report);
  else if (format == Format::Csv) write_csv(out, report);
  else write_records(out, report);
  return 0;
}

// ---- growth --------------------------------------------------------------------------

int cmd_growth(const std::string& beta, const std::string& x_text, std::size_t k_min, std::size_t k_max,
               const Common& common, Format format, std::ostream& out) {
  const BetaContext ctx = make_context(common, resolve_real(beta));
  const Real x = resolve_real(x_text);
  const GrowthEstimate g = growth_estimate(ctx, x, k_min, k_max);
  const BoundReport report = bound_report(ctx);
  const bool below_sqrt2 = ctx.beta() * ctx.beta() < 2;
  const double expected = std::log2(2.0 / static_cast<double>(ctx.beta()));

  if (format == Format::Csv) {
    out << "k,log2_count,slope\n";
    for (std::size_t i = 0; i < g.k_values.size(); ++i) {
      out << g.k_values[i] << ',' << fixed(g.log2_counts[i], 9) << ','
          << fixed(g.log2_counts[i] / static_cast<double>(g.k_values[i]), 9) << '\n';
    }
    return 0;
  }
  if (format == Format::Records) {
    nlohmann::json head = {{"record", "growth"},
                           {"beta", format_real(ctx.beta())},
                           {"x", format_real(x)},
                           {"lower_slope", g.lower_slope},
                           {"upper_slope", g.upper_slope},
                           {"best_lower", report.best_lower ? nlohmann::json(*report.best_lower) : nlohmann::json()},
                           {"min_upper", report.min_upper()},
                           {"expected_ae", below_sqrt2 ? nlohmann::json(expected) : nlohmann::json()}};
    out << head.dump() << '\n';
    for (std::size_t i = 0; i < g.k_values.size(); ++i) {
      out << nlohmann::json{{"record", "growth_point"}, {"k", g.k_values[i]}, {"log2_count", g.log2_counts[i]}}.dump()
          << '\n';
    }
    return 0;
  }
  out << std::left << std::setw(6) << "k" << std::setw(16) << "N_k" << "log2(N_k)/k\n";
  for (std::size_t i = 0; i < g.k_values.size(); ++i) {
    const double count = std::exp2(g.log2_counts[i]);
    out << std::left << std::setw(6) << g.k_values[i] << std::setw(16) << std::llround(count)
        << fixed(g.log2_counts[i] / static_cast<double>(g.k_values[i])) << '\n';
  }
  row(out, "lower slope", fixed(g.lower_slope));
  row(out, "upper slope", fixed(g.upper_slope));
  if (report.best_lower) {
    row(out, "lower bound", fixed(*report.best_lower) + "  (" + report.best_lower_source + ")  margin " +
                                fixed(g.lower_slope - *report.best_lower));
  }
  row(out, "upper bound", fixed(report.min_upper()) + "  margin " + fixed(report.min_upper() - g.upper_slope));
  if (below_sqrt2) {
    row(out, "expected a.e.", fixed(expected) + "  log2(2/beta)  difference " + fixed(g.upper_slope - expected));
  }
  return 0;
}

// ---- bernoulli -----------------------------------------------------------------------

struct BernoulliArgs {
  std::string beta;
  std::string x;
  std::string radii = "8:20";
  std::string method = "recursion";
  std::string interval;
  int depth = 30;
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 1;
};

std::pair<std::string, std::string> split_pair(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw BetaError(ErrorKind::InvalidArgument, "expected a:b, got '" + text + "'");
  return {text.substr(0, colon), text.substr(colon + 1)};
}

int parse_int(const std::string& text) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) throw BetaError(ErrorKind::InvalidArgument, "not an integer: '" + text + "'");
  return v;
}

int cmd_bernoulli(const BernoulliArgs& a, const Common& common, Format format, std::ostream& out) {
  const BetaContext ctx = make_context(common, resolve_real(a.beta));
  const MeasureMethod method = parse_measure_method(a.method);

  if (!a.interval.empty()) {
    const auto [lo_text, hi_text] = split_pair(a.interval);
    const double lo = static_cast<double>(parse_real(lo_text));
    const double hi = static_cast<double>(parse_real(hi_text));
    const MeasureEstimate m = method == MeasureMethod::Recursion
                                  ? measure_interval(ctx, lo, hi, a.depth)
                                  : measure_monte_carlo(ctx, lo, hi, a.samples, a.depth, a.seed);
    if (format == Format::Records) {
      write_records(out, m);
    } else if (format == Format::Csv) {
      out << "lo,hi,value,half_width,method,depth\n"
          << lo << ',' << hi << ',' << fixed(m.value, 12) << ',' << fixed(m.half_width, 12) << ','
          << to_string(m.method) << ',' << m.depth << '\n';
    } else {
      row(out, "interval", "[" + lo_text + ", " + hi_text + "]");
      row(out, "method", to_string(m.method));
      row(out, "measure", fixed(m.value, 9) + " +- " + fixed(m.half_width, 9));
    }
    return 0;
  }

  const auto [k_lo, k_hi] = split_pair(a.radii);
  LocalDimOptions options;
  options.method = method;
  options.samples = a.samples;
  options.seed = a.seed;
  const double x = static_cast<double>(resolve_real(a.x));
  const LocalDimEstimate e = local_dimension(ctx, x, parse_int(k_lo), parse_int(k_hi), options);
  const auto bound = bound_report(ctx).local_dim_min();

  if (format == Format::Records) {
    write_records(out, e);
    out << nlohmann::json{{"record", "local_dim_bound"},
                          {"value", bound ? nlohmann::json(*bound) : nlohmann::json()}}.dump()
        << '\n';
  } else if (format == Format::Csv) {
    out << "k,radius,log_measure,ratio\n";
    for (std::size_t i = 0; i < e.ks.size(); ++i) {
      out << e.ks[i] << ',' << e.radii[i] << ',' << fixed(e.log_measures[i], 9) << ','
          << fixed(e.log_measures[i] / std::log(e.radii[i]), 9) << '\n';
    }
  } else {
    out << std::left << std::setw(6) << "k" << std::setw(16) << "log mu(ball)" << "log mu / log r\n";
    for (std::size_t i = 0; i < e.ks.size(); ++i) {
      out << std::left << std::setw(6) << e.ks[i] << std::setw(16) << fixed(e.log_measures[i])
          << fixed(e.log_measures[i] / std::log(e.radii[i])) << '\n';
    }
    row(out, "slope lower", fixed(e.slope_lower));
    row(out, "slope upper", fixed(e.slope_upper));
    row(out, "upper bound", bound ? fixed(*bound) : std::string("absent"));
  }
  return 0;
}

void diagnostic(std::ostream& err, const std::string& kind, const std::string& message, int code) {
  err << nlohmann::json{{"record", "error"}, {"kind", kind}, {"message", message}, {"exit_code", code}}.dump()
      << '\n';
}

}  // namespace

Real resolve_real(const std::string& text) {
  for (const char* name : {"omega:", "lambda:"}) {
    const std::string prefix(name);
    if (text.rfind(prefix, 0) == 0) {
      const int m = parse_int(text.substr(prefix.size()));
      if (m < 1) throw BetaError(ErrorKind::InvalidArgument, "threshold index must be >= 1");
      return prefix == "omega:" ? cached_omega(m) : cached_lambda(m);
    }
  }
  return parse_real(text);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"beta-expansion prefix counts, generators and bounds"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--format", common.format, "table, csv or records")->check(CLI::IsMember({"table", "csv", "records"}));
  app.add_option("--precision-bits", common.precision_bits, "mantissa bits (default: $BETAEXP_PRECISION_BITS or 128)");
  app.add_option("--tolerance", common.tolerance, "membership tolerance as a decimal");

  std::function<int(Format)> action;

  std::vector<int> ms{1, 2, 3, 10, 100};
  bool reproduce = false;
  auto* roots = app.add_subcommand("roots", "omega_m and lambda_m with their polynomials");
  roots->add_option("--m", ms, "comma separated m values")->delimiter(',');
  roots->add_flag("--reproduce-tables", reproduce, "print the two published tables");
  roots->callback([&] { action = [&](Format f) { return cmd_roots(ms, reproduce, f, out); }; });

  CountArgs count_args;
  auto* count = app.add_subcommand("count", "number of k-prefixes of x");
  count->add_option("--beta", count_args.beta)->required();
  count->add_option("--x", count_args.x)->required();
  count->add_option("--k", count_args.k)->required();
  count->add_flag("--oracle", count_args.oracle, "cross-check against direct enumeration");
  count->add_flag("--by-length", count_args.by_length, "print N_0 .. N_k");
  count->add_flag("--list", count_args.list, "print the prefixes");
  count->callback([&] { action = [&](Format f) { return cmd_count(count_args, common, f, out); }; });

  GenerateArgs gen_args;
  auto* generate = app.add_subcommand("generate", "run a prefix generator and audit it");
  generate->add_option("--beta", gen_args.beta)->required();
  generate->add_option("--x", gen_args.x)->required();
  generate->add_option("--mode", gen_args.mode, "m (blocks of 2m+1) or s3 (pairs)")
      ->check(CLI::IsMember({"m", "s3"}));
  generate->add_option("--m", gen_args.m)->required();
  generate->add_option("--blocks", gen_args.blocks);
  generate->callback([&] { action = [&](Format f) { return cmd_generate(gen_args, common, f, out); }; });

  std::string bounds_beta;
  int m_max = kDefaultBoundMmax;
  auto* bounds = app.add_subcommand("bounds", "all bounds applicable at beta");
  bounds->add_option("--beta", bounds_beta)->required();
  bounds->add_option("--m-max", m_max);
  bounds->callback([&] { action = [&](Format f) { return cmd_bounds(bounds_beta, m_max, common, f, out); }; });

  std::string growth_beta;
  std::string growth_x;
  std::size_t k_min = 8;
  std::size_t k_max = 28;
  auto* growth = app.add_subcommand("growth", "finite-k growth rate against the bounds");
  growth->add_option("--beta", growth_beta)->required();
  growth->add_option("--x", growth_x)->required();
  growth->add_option("--k-min", k_min);
  growth->add_option("--k-max", k_max);
  growth->callback([&] {
    action = [&](Format f) { return cmd_growth(growth_beta, growth_x, k_min, k_max, common, f, out); };
  });

  BernoulliArgs bern;
  auto* bernoulli = app.add_subcommand("bernoulli", "Bernoulli convolution measure and local dimension");
  bernoulli->add_option("--beta", bern.beta)->required();
  bernoulli->add_option("--x", bern.x);
  bernoulli->add_option("--radii", bern.radii, "k range a:b for radii beta^-k");
  bernoulli->add_option("--method", bern.method)->check(CLI::IsMember({"recursion", "monte-carlo"}));
  bernoulli->add_option("--interval", bern.interval, "measure of [lo:hi] instead of a local dimension");
  bernoulli->add_option("--depth", bern.depth);
  bernoulli->add_option("--samples", bern.samples);
  bernoulli->add_option("--seed", bern.seed);
  bernoulli->callback([&] {
    action = [&](Format f) {
      if (bern.interval.empty() && bern.x.empty()) {
        throw BetaError(ErrorKind::InvalidArgument, "bernoulli needs --x or --interval");
      }
      return cmd_bernoulli(bern, common, f, out);
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    diagnostic(err, "Usage", e.what(), 2);
    return 2;
  }

  try {
    return action(parse_format(common.format));
  } catch (const BetaError& e) {
    const int code = is_invariant_violation(e.kind()) ? 3 : 2;
    diagnostic(err, std::string(to_string(e.kind())), e.what(), code);
    return code;
  }
}

}  // namespace betaexp::cli
