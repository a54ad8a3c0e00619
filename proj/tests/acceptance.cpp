// Acceptance gate: `acceptance <criterion>` runs one criterion, no argument runs all.
// Prints one PASS/FAIL line per criterion followed by its sub-checks.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "fracvolt/verify.hpp"

using namespace fracvolt;

namespace {

const char* const kTitles[] = {"",
                               "characteristic function of int f dZ",
                               "exact second moment",
                               "subordinator laws",
                               "fBm covariance and Hölder slope",
                               "fLpMG variogram slope",
                               "fractional-calculus units",
                               "GLS integral",
                               "condition matrix",
                               "Example-1 identity and J1+J2 power law",
                               "determinism across thread counts"};

// Reduced sizes for the rerun; only byte equality is checked.
std::vector<CheckLine> determinism() {
  std::vector<CheckLine> out;
  for (const auto& suite : suite_names()) {
    VerifyOptions a;
    a.N = 2000;
    a.resolution = std::size_t{1} << 9;
    a.threads = 1;
    VerifyOptions b = a;
    b.threads = 3;
    const std::string ja = run_suite(suite, a).to_json();
    const std::string jb = run_suite(suite, b).to_json();
    const std::string jc = run_suite(suite, a).to_json();
    const bool same = ja == jb && ja == jc;
    out.push_back({10, suite + "_byte_identical", same, same ? 0.0 : 1.0, 0.0, "threads 1 vs 3, reruns with seed " +
                                                                             std::to_string(a.seed)});
  }
  return out;
}

bool report(int criterion) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<CheckLine> lines;
  std::string error;
  try {
    lines = criterion == 10 ? determinism() : run_criterion(criterion, VerifyOptions{});
  } catch (const std::exception& e) {
    error = e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool pass = error.empty() && !lines.empty();
  for (const auto& l : lines) pass = pass && l.pass;
  std::printf("criterion %d %s: %s (%.1f s)\n", criterion, kTitles[criterion], pass ? "PASS" : "FAIL", secs);
  if (!error.empty()) std::printf("    error: %s\n", error.c_str());
  for (const auto& l : lines) {
    std::printf("    %-4s %-34s value=%-12.6g bound=%-10.3g %s\n", l.pass ? "ok" : "FAIL", l.name.c_str(), l.value,
                l.bound, l.detail.c_str());
  }
  std::fflush(stdout);
  return pass;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> criteria;
  if (argc > 1) {
    const int c = std::atoi(argv[1]);
    if (c < 1 || c > 10) {
      std::fprintf(stderr, "criterion must be 1..10\n");
      return 2;
    }
    criteria.push_back(c);
  } else {
    for (int c = 1; c <= 10; ++c) criteria.push_back(c);
  }
  bool all = true;
  for (int c : criteria) all = report(c) && all;
  return all ? 0 : 1;
}
