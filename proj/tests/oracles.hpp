#pragma once

// Reference values and brute-force checkers used by the tests.
//
// Frozen numbers come from tests/oracles/generate_oracles.py (mpmath roots at 60 digits,
// exact rational prefix counts). Published table values are kept separately because one
// of them disagrees with its own polynomial.

#include "betaexp/real.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace oracle {

struct RootRow {
  int m;
  const char* p1;
  const char* p2;
  const char* p3;
  const char* lambda;
};

inline constexpr RootRow kRoots[] = {
    {1, "1.074454609809377050317138", "1.220744084605759475361685", "1.167303978261418684256046",
     "1.324717957244746025960909"},
    {2, "1.028379464537770251508046", "1.134724138401519492605446", "1.112775684278705470629704",
     "1.465571231876768026656731"},
    {3, "1.014916534311852918216926", "1.096981557798559817908279", "1.085070245491450828336896",
     "1.53415774491426691543597"},
    {10, "1.001755478047028480018383", "1.032770966441042909329493", "1.031291412479247519263552",
     "1.615749202755210610743642"},
    {100, "1.000019731007836391954977", "1.003445867117152562008065", "1.003428821277082806934185",
     "1.618033988749894848204238"},
};

// Rounded values as printed in the published tables.
struct PublishedRow {
  int m;
  const char* omega;
  const char* lambda;
};

inline constexpr PublishedRow kPublished[] = {
    {1, "1.07445", "1.32472"}, {2, "1.02838", "1.46557"}, {3, "1.01492", "1.53416"},
    {10, "1.00172", "1.61575"}, {100, "1.00003", "1.61804"},
};

// Exact counts over the rationals; tree and all-words enumeration agree where both ran.
struct CountCase {
  const char* beta;
  const char* x;
  std::size_t k;
  std::uint64_t count;
};

inline constexpr CountCase kCounts[] = {
    {"1.5", "1", 10, 28},
    {"1.3", "0.7", 14, 298},
    {"1.1", "0.5", 12, 6},
    {"1.8", "0.666666666666666666666666666666666666666667", 16, 9},
    {"1.05", "3", 12, 588},
    {"1.6", "0.142857142857142857142857142857142857142857", 16, 21},
};

struct KappaCase {
  const char* beta;
  double kappa;
};

inline constexpr KappaCase kKappa[] = {
    {"1.05", 1.0 / 124}, {"1.2", 1.0 / 18}, {"1.3", 0.1},   {"1.41", 1.0 / 6},
    {"1.45", 0.125},     {"1.5", 0.125},    {"1.6", 0.0625},
};

// Every word of length k that keeps x in [0, 1/(beta-1)] (closed, widened by 2^-64) at
// every step, by explicit recursion at 256 bits. Shares nothing with the library kernels.
inline void naive_walk(const betaexp::WideReal& beta, const betaexp::WideReal& c,
                       const betaexp::WideReal& slack, const betaexp::WideReal& y, std::size_t left,
                       std::string& path, std::vector<std::string>& out) {
  if (left == 0) {
    out.push_back(path);
    return;
  }
  for (int d = 0; d <= 1; ++d) {
    const betaexp::WideReal next = beta * y - d;
    if (next < -slack || next > c + slack) continue;
    path.push_back(static_cast<char>('0' + d));
    naive_walk(beta, c, slack, next, left - 1, path, out);
    path.pop_back();
  }
}

inline std::vector<std::string> naive_prefixes(const betaexp::Real& beta, const betaexp::Real& x,
                                               std::size_t k) {
  const betaexp::WideReal b(beta);
  const betaexp::WideReal c = 1 / (b - 1);
  const betaexp::WideReal slack = betaexp::WideReal(1) / betaexp::WideReal("18446744073709551616");
  std::vector<std::string> out;
  std::string path;
  naive_walk(b, c, slack, betaexp::WideReal(x), k, path, out);
  return out;
}

inline betaexp::Real uniform_real(std::mt19937_64& rng, double lo, double hi) {
  return betaexp::Real(std::uniform_real_distribution<double>(lo, hi)(rng));
}

}  // namespace oracle
