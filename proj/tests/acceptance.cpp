// Acceptance harness: one PASS/FAIL line per criterion, non-zero exit if
// any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "accesskit/cli.hpp"
#include "accesskit/csv.hpp"
#include "accesskit/equity.hpp"
#include "accesskit/fca.hpp"
#include "accesskit/optimize.hpp"
#include "accesskit/spatial_stats.hpp"
#include "test_support.hpp"

using namespace accesskit;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::cout << (o.pass ? "PASS" : "FAIL") << "  [" << id << "] " << name << ": " << o.detail
            << std::endl;
}

double total_supply(const Dataset& ds) {
  double s = 0.0;
  for (const auto& site : ds.supply) s += site.capacity;
  return s;
}

double weighted_access(const Dataset& ds, const std::vector<double>& scores) {
  double s = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) s += ds.demand[i].population * scores[i];
  return s;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

// Shared random instances for criteria 1 and 3.
struct Case {
  testing::Instance inst;
  DecaySpec decay;
};

std::vector<Case> conservation_cases() {
  std::mt19937_64 rng(1001);
  std::vector<Case> cases;
  for (int t = 0; t < 200; ++t) {
    const double d0 = testing::uniform(rng, 5, 60);
    auto inst = testing::random_instance(rng, testing::uniform_index(rng, 1, 200),
                                         testing::uniform_index(rng, 1, 20), d0, true);
    auto decay = testing::random_decay(rng, d0);
    cases.push_back({std::move(inst), decay});
  }
  return cases;
}

Outcome conservation(const std::vector<Case>& cases) {
  const auto start = Clock::now();
  double worst = 0.0;
  for (const auto& c : cases) {
    const auto r = g2sfca(c.inst.dataset, c.inst.matrix, c.decay);
    worst = std::max(worst, rel_err(weighted_access(c.inst.dataset, r.scores), total_supply(c.inst.dataset)));
  }
  const double elapsed = seconds_since(start);
  std::ostringstream d;
  d << cases.size() << " instances, max rel err " << worst << ", " << elapsed << " s";
  return {worst <= 1e-9 && elapsed < 5.0, d.str()};
}

Outcome collapse() {
  std::mt19937_64 rng(2002);
  int g_ok = 0, e_ok = 0, m_ok = 0;
  for (int t = 0; t < 100; ++t) {
    const double d0 = testing::uniform(rng, 5, 60);
    auto inst = testing::random_instance(rng, testing::uniform_index(rng, 1, 100),
                                         testing::uniform_index(rng, 1, 15), d0, false, 0.2);
    const auto ref = two_sfca(inst.dataset, inst.matrix, d0).scores;
    g_ok += g2sfca(inst.dataset, inst.matrix, DecaySpec::binary(d0)).scores == ref;
    e_ok += e2sfca(inst.dataset, inst.matrix, DecaySpec::zonal({d0}, {1.0})).scores == ref;
    m_ok += m2sfca(inst.dataset, inst.matrix, DecaySpec::binary(d0)).scores == ref;
  }
  std::ostringstream d;
  d << "bit-identical g2sfca(binary) " << g_ok << "/100, e2sfca(one zone) " << e_ok
    << "/100, m2sfca(binary) " << m_ok << "/100";
  return {g_ok == 100 && e_ok == 100 && m_ok == 100, d.str()};
}

// Every demand site reaches every supply at the same cost, so every active
// weight equals f(cost).
testing::Instance uniform_cost_instance(std::mt19937_64& rng, double cost) {
  auto inst = testing::random_instance(rng, 40, 6, 30, true, 0.0);
  for (std::size_t i = 0; i < 40; ++i)
    for (std::size_t j = 0; j < 6; ++j) inst.matrix(i, j) = cost;
  return inst;
}

Outcome m2sfca_dominance(const std::vector<Case>& cases) {
  std::size_t violations = 0, checked = 0;
  for (const auto& c : cases) {
    const auto g = g2sfca(c.inst.dataset, c.inst.matrix, c.decay).scores;
    const auto m = m2sfca(c.inst.dataset, c.inst.matrix, c.decay).scores;
    for (std::size_t i = 0; i < g.size(); ++i, ++checked) violations += m[i] > g[i];
  }
  std::mt19937_64 rng(3003);
  // Well configured: f(1e-3) = exp(-1e-6 / 1e3) is one to within 1e-9.
  const auto good = uniform_cost_instance(rng, 1e-3);
  const auto good_m = m2sfca(good.dataset, good.matrix, DecaySpec::gaussian(1e3, 30)).scores;
  const double good_err = rel_err(weighted_access(good.dataset, good_m), total_supply(good.dataset));
  // Poorly configured: exp(-d / beta) = 0.1 at every active pair.
  const double beta = 10.0;
  const auto poor = uniform_cost_instance(rng, beta * std::log(10.0));
  const auto poor_m = m2sfca(poor.dataset, poor.matrix, DecaySpec::exponential(beta, 30)).scores;
  const double deficit = 1.0 - weighted_access(poor.dataset, poor_m) / total_supply(poor.dataset);
  std::ostringstream d;
  d << violations << " pointwise violations over " << checked << " scores; well-configured rel err "
    << good_err << "; poorly configured deficit " << 100.0 * deficit << "%";
  return {violations == 0 && good_err <= 1e-6 && deficit > 0.5, d.str()};
}

SpatialWeights rook_2x2() {
  // 0 1
  // 2 3
  return weights_from_neighbors({{1, 2}, {0, 3}, {0, 3}, {1, 2}}, true);
}

std::vector<Coordinate> random_points(std::mt19937_64& rng, std::size_t n) {
  std::vector<Coordinate> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back({testing::uniform(rng, 0, 1e5), testing::uniform(rng, 0, 1e5)});
  return pts;
}

Outcome moran_exactness() {
  const std::vector<double> board{1, 0, 0, 1};
  const auto m = morans_i(board, rook_2x2(), {.n_permutations = 99, .seed = 42});
  const double i_err = std::abs(m.i + 1.0);
  const bool expected_exact = m.expected_i == -1.0 / 3.0;

  std::mt19937_64 rng(4004);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = testing::uniform_index(rng, 5, 150);
    const auto pts = random_points(rng, n);
    const auto w = build_weights(pts, CoordinateKind::Planar,
                                 WeightsScheme::knn(testing::uniform_index(rng, 1, std::min<std::size_t>(n - 1, 10))),
                                 true);
    std::vector<double> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(testing::uniform(rng, -50, 50));
    const PermutationOptions opts{.n_permutations = 9, .seed = 1};
    const auto gm = morans_i(v, w, opts);
    const auto lm = lisa(v, w, opts);
    double sum = 0.0;
    for (const auto& u : lm.units) sum += u.local_i;
    worst = std::max(worst, std::abs(sum - static_cast<double>(n) * gm.i));
  }
  std::ostringstream d;
  d << "checkerboard |I + 1| = " << i_err << ", E[I] exact: " << (expected_exact ? "yes" : "no")
    << ", max |sum I_i - n I| = " << worst << " over 50 instances";
  return {i_err <= 1e-12 && expected_exact && worst <= 1e-9, d.str()};
}

Outcome permutation_determinism() {
  std::mt19937_64 rng(5005);
  const std::size_t n = 400;
  const auto pts = random_points(rng, n);
  std::vector<double> v;
  for (const auto& p : pts) v.push_back(p.x / 1e4 + testing::uniform(rng, 0, 5));
  const auto w = build_weights(pts, CoordinateKind::Planar, WeightsScheme::knn(8), true);

  const auto m1 = morans_i(v, w, {.n_permutations = 999, .seed = 42, .threads = 1});
  const auto l1 = lisa(v, w, {.n_permutations = 999, .seed = 42, .threads = 1});
  bool same = true;
  for (unsigned threads : {2u, 8u}) {
    const auto m = morans_i(v, w, {.n_permutations = 999, .seed = 42, .threads = threads});
    const auto l = lisa(v, w, {.n_permutations = 999, .seed = 42, .threads = threads});
    same = same && m.p_value == m1.p_value;
    for (std::size_t i = 0; i < n; ++i) same = same && l.units[i].p_value == l1.units[i].p_value;
  }
  std::ostringstream d;
  d << "moran p and " << n << " lisa p-values at 1/2/8 threads " << (same ? "identical" : "differ");
  return {same, d.str()};
}

Outcome hrad_identities() {
  std::mt19937_64 rng(6006);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    std::vector<Region> regions;
    const std::size_t n = testing::uniform_index(rng, 1, 40);
    for (std::size_t r = 0; r < n; ++r) {
      regions.push_back({"r" + std::to_string(r), testing::uniform(rng, 0.1, 1000),
                         r == 0 ? 1.0 : testing::uniform(rng, 0, 5000), std::nullopt});
    }
    const auto h = hrad(regions);
    double area = 0.0, mean = 0.0;
    for (const auto& g : regions) area += g.area_km2;
    for (std::size_t r = 0; r < n; ++r) mean += regions[r].area_km2 / area * h.regions[r].hrad;
    worst = std::max(worst, std::abs(mean - 1.0));
  }
  const auto single = hrad(std::vector<Region>{{"only", 812.5, 37, std::nullopt}});
  const bool single_exact = single.regions[0].hrad == 1.0;

  bool flips = true;
  for (double eps : {0.05, 0.1, 0.2}) {
    flips = flips && classify_hrad(1.0 + eps, eps) == EquityClass::Equal &&
            classify_hrad(std::nextafter(1.0 + eps, 2.0), eps) == EquityClass::RelativelyFair &&
            classify_hrad(1.0 - eps, eps) == EquityClass::Equal &&
            classify_hrad(std::nextafter(1.0 - eps, 0.0), eps) == EquityClass::Unfair;
  }
  std::ostringstream d;
  d << "max |area-weighted mean - 1| = " << worst << " over 100 sets, single region exact: "
    << (single_exact ? "yes" : "no") << ", epsilon boundary flips: " << (flips ? "yes" : "no");
  return {worst <= 1e-12 && single_exact && flips, d.str()};
}

Outcome optimizer_oracle() {
  const auto start = Clock::now();
  std::mt19937_64 rng(7007);
  const int n_instances = 300;
  int better_than_brute = 0, matches = 0, budget_violations = 0;
  int nonmonotone[3] = {0, 0, 0};
  int by_objective[3] = {0, 0, 0};
  for (int t = 0; t < n_instances; ++t) {
    const double d0 = 30.0;
    auto inst = testing::random_instance(rng, testing::uniform_index(rng, 1, 5),
                                         testing::uniform_index(rng, 1, 4), d0, true);
    const std::size_t ns = inst.dataset.supply.size();
    std::vector<std::size_t> all(ns);
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(testing::uniform_index(rng, 1, std::min<std::size_t>(3, ns)));
    // Some candidates are new sites with no capacity yet.
    for (std::size_t c : all) {
      if (testing::uniform(rng, 0, 1) < 0.3) inst.dataset.supply[c].capacity = 0.0;
    }
    if (total_supply(inst.dataset) == 0.0) inst.dataset.supply[all[0]].capacity = 10.0;

    AllocationProblem p{std::move(inst.dataset), std::move(inst.matrix), testing::random_decay(rng, d0)};
    p.candidates = all;
    p.budget = testing::uniform_index(rng, 0, 3);
    p.unit_size = std::round(testing::uniform(rng, 1, 100));
    const auto k = testing::uniform_index(rng, 0, 2);
    p.objective = static_cast<Objective>(k);
    ++by_objective[k];

    const auto plan = local_search_improve(p, greedy_allocate(p), 1000);
    const auto brute = brute_force_allocate(p);
    if (plan.total_units() != p.budget || brute.total_units() != p.budget) ++budget_violations;
    const double a = plan.objective_after, b = brute.objective_after;
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    if (improves(p.objective, a, b) && std::abs(a - b) > 1e-12 * scale) ++better_than_brute;
    if (a == b || std::abs(a - b) <= 1e-12 * scale) ++matches;
    for (std::size_t s = 1; s < plan.trace.size(); ++s) {
      if (improves(p.objective, plan.trace[s - 1], plan.trace[s])) {
        ++nonmonotone[k];
        break;
      }
    }
  }
  const double elapsed = seconds_since(start);
  const int total_nonmonotone = nonmonotone[0] + nonmonotone[1] + nonmonotone[2];
  std::ostringstream d;
  d << n_instances << " instances; better than brute force: " << better_than_brute
    << "; matched brute force: " << matches << "/" << n_instances << " ("
    << 100.0 * matches / n_instances << "%); budget violations: " << budget_violations
    << "; non-monotone traces: max_min " << nonmonotone[0] << "/" << by_objective[0] << ", gini "
    << nonmonotone[1] << "/" << by_objective[1] << ", variance " << nonmonotone[2] << "/"
    << by_objective[2] << "; " << elapsed << " s";
  return {better_than_brute == 0 && budget_violations == 0 && total_nonmonotone == 0 && elapsed < 10.0,
          d.str()};
}

Outcome fca_oracle() {
  std::mt19937_64 rng(8008);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const double d0 = testing::uniform(rng, 5, 60);
    const auto inst = testing::random_instance(rng, testing::uniform_index(rng, 1, 6),
                                               testing::uniform_index(rng, 1, 4), d0, false, 0.25);
    const auto decay = testing::random_decay(rng, d0);
    const auto got = g2sfca(inst.dataset, inst.matrix, decay).scores;
    const auto want = testing::g2sfca_oracle(inst.dataset, inst.matrix, decay);
    for (std::size_t i = 0; i < got.size(); ++i) {
      if (got[i] != want[i]) worst = std::max(worst, rel_err(got[i], want[i]));
    }
  }
  std::ostringstream d;
  d << "max rel err vs direct double loop " << worst << " over 100 instances";
  return {worst <= 1e-12, d.str()};
}

std::string summary_without_timestamp(const fs::path& p) {
  auto doc = nlohmann::json::parse(io::read_text_file(p));
  doc.erase("generated_at");
  return doc.dump();
}

Outcome end_to_end() {
  const fs::path config = fs::path(ACCESSKIT_DATA_DIR) / "synthetic_city" / "config.json";
  testing::TempDir dir;
  double slowest = 0.0;
  for (const char* run : {"a", "b"}) {
    const auto start = Clock::now();
    std::ostringstream out, err;
    const int status = cli::run({"report", "--config", config.string(), "--out", (dir.path() / run).string()},
                                out, err);
    slowest = std::max(slowest, seconds_since(start));
    if (status != 0) return {false, "report exited with " + std::to_string(status) + ": " + err.str()};
  }
  int identical = 0, files = 0;
  std::string differing;
  for (const auto& entry : fs::directory_iterator(dir.path() / "a")) {
    const auto name = entry.path().filename();
    ++files;
    const bool same = name == "summary.json"
                          ? summary_without_timestamp(entry.path()) ==
                                summary_without_timestamp(dir.path() / "b" / name)
                          : io::read_text_file(entry.path()) == io::read_text_file(dir.path() / "b" / name);
    if (same) {
      ++identical;
    } else {
      differing += " " + name.string();
    }
  }
  std::ostringstream d;
  d << identical << "/" << files << " output files identical"
    << (differing.empty() ? "" : " (differ:" + differing + ")") << ", slowest run " << slowest << " s";
  return {files >= 7 && identical == files && slowest < 30.0, d.str()};
}

}  // namespace

int main() {
  const auto cases = conservation_cases();
  report(1, "conservation", [&] { return conservation(cases); });
  report(2, "method collapse", collapse);
  report(3, "m2sfca dominance", [&] { return m2sfca_dominance(cases); });
  report(4, "moran exactness", moran_exactness);
  report(5, "permutation determinism", permutation_determinism);
  report(6, "hrad identities", hrad_identities);
  report(7, "optimizer oracle", optimizer_oracle);
  report(8, "fca oracle", fca_oracle);
  report(9, "end-to-end determinism", end_to_end);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
